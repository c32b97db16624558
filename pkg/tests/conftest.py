from fractions import Fraction

from hypothesis import strategies as st

from gpd.pl_base import PLFunction

small = st.fractions(min_value=-4, max_value=4, max_denominator=12)


class Nodes:
    """Graph of a continuous PL function given by its corner points.

    ``at`` interpolates linearly, which is the reference evaluation the
    library is compared against.
    """

    def __init__(self, xs, ys):
        self.xs, self.ys = list(xs), list(ys)

    @property
    def lo(self):
        return self.xs[0]

    @property
    def hi(self):
        return self.xs[-1]

    def at(self, x):
        if not self.lo < x < self.hi:
            return None
        for (a, fa), (b, fb) in zip(zip(self.xs, self.ys), zip(self.xs[1:], self.ys[1:])):
            if a <= x <= b:
                return fa + (fb - fa) * (x - a) / (b - a)

    def build(self) -> PLFunction:
        rows = []
        for (a, fa), (b, fb) in zip(zip(self.xs, self.ys), zip(self.xs[1:], self.ys[1:])):
            slope = (fb - fa) / (b - a)
            rows.append((a, b, slope, fa - slope * a))
        return PLFunction.from_pieces(rows)


@st.composite
def node_graphs(draw, max_pieces=4, injective=False):
    xs = sorted(set(draw(st.lists(small, min_size=2, max_size=max_pieces + 1))))
    if len(xs) < 2:
        xs = [xs[0], xs[0] + 1]
    if injective:
        sign = draw(st.sampled_from([1, -1]))
        steps = draw(
            st.lists(
                st.fractions(min_value=Fraction(1, 8), max_value=3, max_denominator=8),
                min_size=len(xs) - 1,
                max_size=len(xs) - 1,
            )
        )
        ys = [draw(small)]
        for s in steps:
            ys.append(ys[-1] + sign * s)
    else:
        ys = draw(st.lists(small, min_size=len(xs), max_size=len(xs)))
    return Nodes(xs, ys)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
