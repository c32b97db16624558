"""Brute-force reference computations shared by several test modules."""

import itertools


def closure_oracle(P, length):
    """Words up to ``length`` grouped by the equivalence generated by
    dropping identities and multiplying carrier-adjacent letters."""
    G = P.ambient
    words = []
    for x in G.objects:
        for n in range(length + 1):
            for letters in itertools.product(sorted(P.carrier), repeat=n):
                at, ok = x, True
                for u in letters:
                    if G.src(u) != at:
                        ok = False
                        break
                    at = G.tgt(u)
                if ok:
                    words.append((x, letters))
    index = {w: i for i, w in enumerate(words)}
    parent = list(range(len(words)))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for (x, letters), i in index.items():
        for k, u in enumerate(letters):
            if G.is_identity(u):
                parent[find(i)] = find(index[(x, letters[:k] + letters[k + 1 :])])
        for k in range(len(letters) - 1):
            if G.composable(letters[k], letters[k + 1]):
                uv = G.compose(letters[k], letters[k + 1])
                if uv in P.carrier:
                    parent[find(i)] = find(index[(x, letters[:k] + (uv,) + letters[k + 2 :])])
    classes = {}
    for w, i in index.items():
        classes.setdefault(find(i), []).append(w)
    return list(classes.values())


def mobius_loop_sign(path):
    """Both Moebius edge maps are y -> +y or y -> -y; the composite of a loop
    is y -> (product of signs) y, and it is in J_0 exactly when that is +1."""
    sign = {"1A": 1, "1B": 1, "t0": 1, "t0~": 1, "t1": -1, "t1~": -1}
    s = 1
    for e in path:
        s *= sign[e]
    return s
