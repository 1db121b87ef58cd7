"""Slow reference implementations that share nothing with the package beyond value types."""

from itertools import combinations


def shifted_text(pattern: str, j: int) -> str:
    # sigma(p)_i = p_{sigma^-1(i)} with sigma = t_j
    n = len(pattern)
    return "".join(pattern[(i - j) % n] for i in range(n))


def agrees(p: str, q: str) -> bool:
    return all(a == "*" or b == "*" or a == b for a, b in zip(p, q))


def naive_eval(pattern: str, x: str) -> int:
    return int(any(agrees(shifted_text(pattern, j), x) for j in range(len(pattern))))


def naive_matching(pattern: str, x: str) -> list:
    return [j for j in range(len(pattern)) if agrees(shifted_text(pattern, j), x)]


def flip_text(x: str, block) -> str:
    return "".join(("1" if c == "0" else "0") if i in block else c for i, c in enumerate(x))


def sensitive_blocks(pattern: str, x: str) -> list:
    """All sensitive blocks at x as bitmasks (bit i = position i)."""
    n = len(x)
    v = naive_eval(pattern, x)
    out = []
    for m in range(1, 1 << n):
        block = {i for i in range(n) if m >> i & 1}
        if naive_eval(pattern, flip_text(x, block)) != v:
            out.append(m)
    return out


def minimal_masks(masks: list) -> list:
    s = set(masks)
    out = []
    for m in masks:
        sub = (m - 1) & m
        minimal = True
        while sub:
            if sub in s:
                minimal = False
                break
            sub = (sub - 1) & m
        if minimal:
            out.append(m)
    return out


def max_packing(masks: list) -> int:
    """Exact maximum number of pairwise-disjoint masks, by plain recursion."""
    masks = sorted(set(masks))

    def rec(avail):
        if not avail:
            return 0
        first, rest = avail[0], avail[1:]
        skip = rec(rest)
        take = 1 + rec([m for m in rest if not m & first])
        return max(skip, take)

    return rec(masks)


def brute_bs(pattern: str, x: str) -> int:
    return max_packing(minimal_masks(sensitive_blocks(pattern, x)))


def brute_packing_sets(sets) -> int:
    """Maximum disjoint subfamily size by trying subfamilies from the largest down."""
    sets = [frozenset(s) for s in sets]
    for r in range(len(sets), 0, -1):
        for combo in combinations(sets, r):
            union = set()
            ok = True
            for s in combo:
                if union & s:
                    ok = False
                    break
                union |= s
            if ok:
                return r
    return 0


def balanced_offsets(pattern: str, a) -> list:
    """Offsets u with a + u inside the defined part of the pattern and exactly two 0s there."""
    out = []
    for u in range(-min(a), len(pattern) - max(a)):
        vals = [pattern[x + u] for x in a]
        if "*" not in vals and vals.count("0") == 2:
            out.append(u)
    return out
