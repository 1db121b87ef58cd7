"""Exact sensitivity and block sensitivity.

Shrinking lemma
---------------
Every sensitive block B for x contains an inclusion-minimal sensitive block
(take a minimal sensitive subset of B, which exists because B itself is
sensitive).  Replacing each block of a disjoint family by such a subset keeps
the family disjoint and sensitive, so bs(f; x) equals the maximum packing of
*minimal* sensitive blocks.  All brute-force routines below rely on this.

For a 0-input x of f^{G,p} the minimal sensitive blocks are among the
disagreement sets D_g: if f(x^B) = 1 then x^B agrees with some g(p), which
forces D_g to be a subset of B, and x^{D_g} agrees with g(p).  This gives the
``structured_zero`` mode, usable far beyond the brute-force range.

Maximum packing is NP-hard in general.  Two exact solvers are provided:
branch and bound (``max_disjoint_packing``) for the few hundred minimal
blocks of a brute-force input, and a frontier dynamic program
(``frontier_packing``) for long cyclic inputs, where the disagreement sets
taken in shift order form a band whose width is the pattern's span.  Both
return the lexicographically smallest maximum selection of their input order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import BitString, CyclicGroup, flip, format_block
from .errors import InvalidArgumentError, LogicError, ResourceLimitError
from .functions import MintermFunction

BRUTE_FORCE_MAX_N = 18
GLOBAL_INPUT_LIMIT = 1 << 20
# work budgets for exact packing; exceeding them raises ResourceLimitError
PACKING_NODE_LIMIT = 5_000_000
FRONTIER_STATE_LIMIT = 1_000_000
# up to this N all inputs of a function are processed in one array pass
BATCH_N = 12
BATCH_ROWS = 512


@dataclass(frozen=True)
class BlockSensitivityWitness:
    """An input plus pairwise-disjoint sensitive blocks; certifies bs(f; x) >= len(blocks)."""

    input: BitString
    blocks: tuple
    value_at_input: int

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for b in blocks:
            if not b:
                raise LogicError("witness contains an empty block")
            if seen & b:
                raise LogicError("witness blocks are not pairwise disjoint")
            seen |= b

    @classmethod
    def build(cls, f: MintermFunction, x: BitString, blocks) -> "BlockSensitivityWitness":
        """Construct and re-verify every block against ``f.eval``."""
        w = cls(x, tuple(blocks), f.eval(x))
        for b in w.blocks:
            if f.eval(flip(x, b)) == w.value_at_input:
                raise LogicError(f"block {format_block(b)} is not sensitive at {x}")
        return w

    @property
    def count(self) -> int:
        return len(self.blocks)

    def verify(self, f: MintermFunction) -> bool:
        if f.eval(self.input) != self.value_at_input:
            return False
        union = set()
        for b in self.blocks:
            if not b or union & b:
                return False
            union |= b
            if f.eval(flip(self.input, b)) == self.value_at_input:
                return False
        return True

    def blocks_text(self) -> str:
        return ";".join(format_block(b) for b in self.blocks)


@dataclass
class SensitivityReport:
    n: int
    s: int
    bs0: int
    bs1: int
    bs: int
    witnesses: dict = field(default_factory=dict)
    explored_inputs: int = 0

    def to_record(self) -> dict:
        w = self.witnesses["bs"]
        return {
            "n": self.n,
            "s": self.s,
            "bs0": self.bs0,
            "bs1": self.bs1,
            "bs": self.bs,
            "witness_input": str(w.input),
            "witness_blocks": w.blocks_text(),
        }


def sensitivity_at(f: MintermFunction, x: BitString) -> int:
    v = f.eval(x)
    return sum(f.eval(flip(x, (i,))) != v for i in range(f.n))


@lru_cache(maxsize=4)
def _index_tuples(n: int) -> list:
    return [tuple(i for i in range(n) if (m >> (n - 1 - i)) & 1) for m in range(1 << n)]


def _strip_non_minimal(sens: np.ndarray, n: int) -> np.ndarray:
    """Keep the masks (last axis) that are sensitive with no sensitive proper subset."""
    shape = sens.shape[:-1]
    # below[m]: some subset of m (m included) is sensitive
    below = sens.copy()
    for b in range(n):
        v = below.reshape(*shape, -1, 2, 1 << b)
        v[..., 1, :] |= v[..., 0, :]
    strict = np.zeros_like(sens)
    for b in range(n):
        st = strict.reshape(*shape, -1, 2, 1 << b)
        st[..., 1, :] |= below.reshape(*shape, -1, 2, 1 << b)[..., 0, :]
    return sens & ~strict


def _minimal_matrix(f: MintermFunction) -> np.ndarray:
    """Row ``code``: minimality flags of every mask at that input; cached on f."""
    cached = f.__dict__.get("_minimal_matrix")
    if cached is None:
        n = f.n
        table = f.truth_table
        masks = np.arange(1 << n, dtype=np.int32)
        rows = []
        for start in range(0, 1 << n, BATCH_ROWS):
            codes = masks[start:start + BATCH_ROWS, None]
            sens = table[codes ^ masks[None, :]] != table[codes]
            rows.append(_strip_non_minimal(sens, n))
        cached = np.concatenate(rows)
        cached.flags.writeable = False
        f.__dict__["_minimal_matrix"] = cached
    return cached


def _minimal_masks(f: MintermFunction, code: int, size_cap: int) -> list:
    """Index tuples of inclusion-minimal sensitive blocks at ``code``, sorted by (size, indices)."""
    n = f.n
    if n <= BATCH_N:
        minimal = _minimal_matrix(f)[code]
    else:
        table = f.truth_table
        masks = np.arange(1 << n, dtype=np.int64)
        minimal = _strip_non_minimal(table[masks ^ code] != table[code], n)
    tuples = _index_tuples(n)
    found = [tuples[m] for m in np.flatnonzero(minimal).tolist()]
    found = [t for t in found if len(t) <= size_cap]
    found.sort(key=lambda t: (len(t), t))
    return found


def minimal_sensitive_blocks(f: MintermFunction, x: BitString, size_cap: int | None = None,
                             limit: int = BRUTE_FORCE_MAX_N) -> list:
    """All inclusion-minimal sensitive blocks of size <= size_cap, by exhaustive search."""
    n = f.n
    if n > limit:
        raise ResourceLimitError(f"brute-force block enumeration limited to N <= {limit}, got {n}")
    if len(x) != n:
        raise InvalidArgumentError(f"input length {len(x)} != {n}")
    cap = n if size_cap is None else size_cap
    if cap <= 0:
        return []
    return [frozenset(t) for t in _minimal_masks(f, x.code, cap)]


def _masks(sets, universe=None) -> list:
    """Bitmask per set; bit k stands for ``universe[k]`` (default: sorted elements)."""
    if universe is None:
        universe = sorted(set().union(*sets)) if sets else []
    bit = {e: 1 << k for k, e in enumerate(universe)}
    masks = []
    for st in sets:
        m = 0
        for e in st:
            m |= bit[e]
        masks.append(m)
    return masks


def max_disjoint_packing(sets, node_limit: int | None = None) -> tuple:
    """Maximum number of pairwise-disjoint members of ``sets``.

    Returns ``(count, selection)`` with ``selection`` a sorted list of indices.
    Branch and bound: the greedy disjoint family gives the initial lower bound,
    and a node is cut when the sets still available cannot beat the incumbent
    (bounded by their number and by the number of uncovered elements they
    touch, divided by their smallest size).  Branches are explored
    include-first in index order, so the first maximum found is the
    lexicographically smallest selection; callers get the fastest search by
    passing sets sorted by size.  ``node_limit`` caps the number of search
    nodes (ResourceLimitError when exceeded).
    """
    sets = [frozenset(s) for s in sets]
    masks = _masks(sets)
    sizes = [len(s) for s in sets]
    nodes = 0

    empties = [i for i, m in enumerate(masks) if m == 0]
    items = [i for i, m in enumerate(masks) if m != 0]

    greedy, used = [], 0
    for i in items:
        if not masks[i] & used:
            greedy.append(i)
            used |= masks[i]
    best = list(greedy)
    chosen = []

    def bound(cands, start, suffix_union, suffix_min):
        left = len(cands) - start
        return min(left, bin(suffix_union[start]).count("1") // suffix_min[start])

    def search(cands):
        nonlocal best, nodes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise ResourceLimitError(f"packing search exceeded {node_limit} nodes")
        if len(chosen) > len(best):
            best = list(chosen)
        r = len(cands)
        if r == 0:
            return
        suffix_union = [0] * (r + 1)
        suffix_min = [1 << 30] * (r + 1)
        for k in range(r - 1, -1, -1):
            suffix_union[k] = suffix_union[k + 1] | masks[cands[k]]
            suffix_min[k] = min(suffix_min[k + 1], sizes[cands[k]])
        for k in range(r):
            if len(chosen) + bound(cands, k, suffix_union, suffix_min) <= len(best):
                return
            i = cands[k]
            mi = masks[i]
            chosen.append(i)
            search([j for j in cands[k + 1:] if not masks[j] & mi])
            chosen.pop()

    search(items)
    selection = sorted(empties + best)
    return len(selection), selection


def frontier_packing(sets, state_limit: int | None = FRONTIER_STATE_LIMIT) -> tuple:
    """Exact maximum disjoint packing by dynamic programming over the set order.

    Before deciding set k, the only relevant part of the chosen union is its
    intersection with the union of sets k, k+1, ...; states are those
    intersections.  A forward pass collects reachable states, a backward pass
    scores them, and the selection is rebuilt taking each set whenever that
    keeps the optimum, which yields the lexicographically smallest maximum.
    Same contract as ``max_disjoint_packing``; fast when each element's sets
    are close together in the order.
    """
    sets = [frozenset(s) for s in sets]
    empties = [i for i, st in enumerate(sets) if not st]
    idx = [i for i, st in enumerate(sets) if st]
    last = {}
    for k, i in enumerate(idx):
        for e in sets[i]:
            last[e] = k
    # latest-leaving elements get the low bits, so every state is a small integer
    universe = sorted(last, key=lambda e: (-last[e], e))
    masks = _masks([sets[i] for i in idx], universe)
    r = len(masks)
    suffix = [0] * (r + 1)
    for k in range(r - 1, -1, -1):
        suffix[k] = suffix[k + 1] | masks[k]

    layers = [{0}]
    total = 1
    for k in range(r):
        m, keep = masks[k], suffix[k + 1]
        nxt = set()
        for key in layers[k]:
            nxt.add(key & keep)
            if not key & m:
                nxt.add((key | m) & keep)
            if state_limit is not None and total + len(nxt) > state_limit:
                raise ResourceLimitError(f"frontier packing exceeded {state_limit} states")
        total += len(nxt)
        layers.append(nxt)

    value = [None] * (r + 1)
    value[r] = {key: 0 for key in layers[r]}
    for k in range(r - 1, -1, -1):
        m, keep, after = masks[k], suffix[k + 1], value[k + 1]
        cur = {}
        for key in layers[k]:
            v = after[key & keep]
            if not key & m:
                v = max(v, 1 + after[(key | m) & keep])
            cur[key] = v
        value[k] = cur

    chosen, key = [], 0
    for k in range(r):
        m, keep = masks[k], suffix[k + 1]
        if not key & m and 1 + value[k + 1][(key | m) & keep] == value[k][key]:
            chosen.append(idx[k])
            key = (key | m) & keep
        else:
            key &= keep
    selection = sorted(empties + chosen)
    return len(selection), selection


def bs_at(f: MintermFunction, x: BitString, mode: str = "bruteforce",
          limit: int = BRUTE_FORCE_MAX_N) -> BlockSensitivityWitness:
    """Exact bs(f; x) as a verified witness.

    ``bruteforce`` packs all minimal sensitive blocks (N <= limit);
    ``structured_zero`` packs the distinct disagreement sets and needs f(x) = 0.
    Within the brute-force range blocks are ordered by (size, indices) and
    packed by branch and bound; beyond it the disagreement sets are kept in
    group-element order and packed by ``frontier_packing``.
    """
    if mode == "bruteforce":
        blocks = minimal_sensitive_blocks(f, x, limit=limit)
    elif mode == "structured_zero":
        if f.eval(x) != 0:
            raise InvalidArgumentError("structured_zero mode needs a 0-input")
        distinct = list(dict.fromkeys(d for d in f.disagreement_sets(x).values() if d))
        if f.n > limit:
            _, sel = frontier_packing(distinct)
            return BlockSensitivityWitness.build(f, x, [distinct[i] for i in sel])
        blocks = sorted(distinct, key=lambda b: (len(b), tuple(sorted(b))))
    else:
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    _, sel = max_disjoint_packing(blocks, PACKING_NODE_LIMIT)
    return BlockSensitivityWitness.build(f, x, [blocks[i] for i in sel])


def _orbit_representatives(f: MintermFunction, codes: np.ndarray) -> np.ndarray:
    """Boolean mask: code is the smallest code in its orbit under the group."""
    n = f.n
    full = (1 << n) - 1
    canon = codes.copy()
    if isinstance(f.group, CyclicGroup):
        for r in range(1, n):
            rot = ((codes << r) | (codes >> (n - r))) & full
            np.minimum(canon, rot, out=canon)
    else:
        for g in f.elements:
            img = np.zeros_like(codes)
            for i in range(n):
                img |= ((codes >> (n - 1 - i)) & 1) << (n - 1 - g(i))
            np.minimum(canon, img, out=canon)
    return canon == codes


def global_measures(f: MintermFunction, input_limit: int = GLOBAL_INPUT_LIMIT,
                    limit: int = BRUTE_FORCE_MAX_N) -> SensitivityReport:
    """Exact s, bs0, bs1, bs by sweeping every input.

    bs is invariant under the group, so only the smallest code of each orbit
    is examined; sweeping codes upward keeps the reported witness the
    lexicographically smallest input attaining each maximum.  0-inputs use the
    structured method.  The bs1 sweep stops once it reaches |dom(p)|, which no
    1-input can exceed.
    """
    n = f.n
    if (1 << n) > input_limit:
        raise ResourceLimitError(f"2^{n} inputs exceed the sweep limit {input_limit}")
    if n > limit:
        raise ResourceLimitError(f"brute-force block enumeration limited to N <= {limit}, got {n}")
    table = f.truth_table
    codes = np.arange(1 << n, dtype=np.int64)

    flips = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        flips += table[codes ^ (1 << (n - 1 - i))] != table
    s_code = int(np.argmax(flips))
    s = int(flips[s_code])
    x_s = BitString.from_code(s_code, n)
    s_witness = BlockSensitivityWitness.build(
        f, x_s, [(i,) for i in range(n) if table[s_code ^ (1 << (n - 1 - i))] != table[s_code]])

    reps = _orbit_representatives(f, codes)
    best = {0: None, 1: None}
    explored = 0
    cap1 = f.pattern.dom_size
    for value in (0, 1):
        for code in np.flatnonzero(reps & (table == bool(value))):
            x = BitString.from_code(int(code), n)
            w = bs_at(f, x, "structured_zero" if value == 0 else "bruteforce", limit)
            explored += 1
            if best[value] is None or w.count > best[value].count:
                best[value] = w
            if value == 1 and best[1].count >= cap1:
                break
    bs0, bs1 = best[0].count, best[1].count
    witnesses = {"s": s_witness, "bs0": best[0], "bs1": best[1],
                 "bs": best[1] if bs1 > bs0 else best[0]}
    return SensitivityReport(n, s, bs0, bs1, max(bs0, bs1), witnesses, explored)
