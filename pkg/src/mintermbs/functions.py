"""Pattern-matching functions f^{G,p}(x) = 1 iff x agrees with some shift g(p), g in G."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .core import (
    BitString,
    CyclicGroup,
    ExplicitGroup,
    GroupSpec,
    Pattern,
    Permutation,
    enumerate_group,
)
from .errors import InvalidArgumentError, ResourceLimitError

TRUTH_TABLE_MAX_N = 22
# below this length a plain Python scan beats numpy call overhead
SMALL_N = 32


class MintermFunction:
    """f^{G,p} for a group spec G and a pattern p with nonempty domain.

    For cyclic groups shift t_j is identified with its offset j.  Evaluation
    filters candidate offsets one defined position at a time: the first
    position acts as the anchor and later positions are tested only on the
    offsets that survived, so a typical evaluation touches about 2N entries.
    """

    def __init__(self, group: GroupSpec, pattern: Pattern):
        if group.n != pattern.n:
            raise InvalidArgumentError(
                f"group acts on {group.n} points but pattern has length {pattern.n}")
        if not pattern.domain:
            raise InvalidArgumentError("pattern has empty domain; f would be constant")
        self.group = group
        self.pattern = pattern
        self.n = pattern.n
        self._dom = np.array(pattern.domain, dtype=np.int64)
        self._vals = np.array(pattern.values(), dtype=np.uint8)
        self._pairs = tuple(zip(pattern.domain, pattern.values()))

    @classmethod
    def cyclic(cls, pattern, n: int | None = None) -> "MintermFunction":
        if isinstance(pattern, str):
            pattern = Pattern.from_str(pattern, n)
        return cls(CyclicGroup(pattern.n), pattern)

    @property
    def is_cyclic(self) -> bool:
        return isinstance(self.group, CyclicGroup)

    def __repr__(self):
        kind = "cyclic" if self.is_cyclic else "explicit"
        return f"MintermFunction({kind}, {str(self.pattern)!r})"

    def __eq__(self, other):
        if not isinstance(other, MintermFunction):
            return NotImplemented
        return self.group == other.group and self.pattern == other.pattern

    def __hash__(self):
        return hash((self.group, self.pattern))

    @cached_property
    def elements(self) -> tuple:
        return enumerate_group(self.group)

    @cached_property
    def _explicit_positions(self) -> np.ndarray:
        # row e lists sigma_e(dom p); sigma(p) takes value p_k at sigma(k)
        imgs = np.array([e.images for e in self.elements], dtype=np.int64)
        return imgs[:, self._dom]

    def _check(self, x: BitString) -> np.ndarray:
        if len(x) != self.n:
            raise InvalidArgumentError(f"input length {len(x)} != {self.n}")
        return x.array()

    def _matching_indices(self, arr: np.ndarray, first_only: bool = False) -> np.ndarray:
        """Indices into ``elements`` (offsets for cyclic groups) whose shift agrees with arr."""
        if self.is_cyclic:
            n = self.n
            if n <= SMALL_N:
                bits = arr.tobytes()
                pairs = self._pairs
                hits = []
                for j in range(n):
                    for k, v in pairs:
                        if bits[(k + j) % n] != v:
                            break
                    else:
                        hits.append(j)
                        if first_only:
                            break
                return np.array(hits, dtype=np.int64)
            cand = np.arange(n, dtype=np.int64)
            for k, v in zip(self._dom, self._vals):
                cand = cand[arr[(cand + k) % n] == v]
                if cand.size == 0:
                    break
            return cand
        pos = self._explicit_positions
        ok = np.all(arr[pos] == self._vals, axis=1)
        return np.flatnonzero(ok)

    def _element(self, idx: int) -> Permutation:
        if self.is_cyclic:
            return Permutation.shift(self.n, int(idx))
        return self.elements[int(idx)]

    def eval(self, x: BitString) -> int:
        return int(self._matching_indices(self._check(x), first_only=True).size > 0)

    __call__ = eval

    def matching_shifts(self, x: BitString) -> list:
        """Group elements g with x agreeing with g(p), in enumeration order."""
        idx = self._matching_indices(self._check(x))
        return [self._element(i) for i in idx]

    def shifted_positions(self, sigma: Permutation) -> np.ndarray:
        """sigma(dom p) in the order of dom p (aligned with the pattern's values)."""
        if sigma.offset is not None:
            return (self._dom + sigma.offset) % self.n
        return np.array(sigma.images, dtype=np.int64)[self._dom]

    def disagreement_set(self, x: BitString, sigma: Permutation) -> frozenset:
        arr = self._check(x)
        pos = self.shifted_positions(sigma)
        return frozenset(int(i) for i in pos[arr[pos] != self._vals])

    def disagreement_sets(self, x: BitString) -> dict:
        """{g: D_g} with D_g = {i in dom g(p) : x_i != g(p)_i} for every group element g."""
        arr = self._check(x)
        if self.is_cyclic:
            n = self.n
            pos = (np.arange(n, dtype=np.int64)[:, None] + self._dom[None, :]) % n
        else:
            pos = self._explicit_positions
        bad = arr[pos] != self._vals
        out = {}
        for e, (row, mask) in enumerate(zip(pos, bad)):
            out[self._element(e)] = frozenset(row[mask].tolist())
        return out

    def covering_elements(self, i: int) -> list:
        """Group elements g with i in g(dom p)."""
        if self.is_cyclic:
            return sorted({Permutation.shift(self.n, i - k) for k in self.pattern.domain},
                          key=lambda s: s.offset)
        rows = np.flatnonzero(np.any(self._explicit_positions == i, axis=1))
        return [self.elements[r] for r in rows]

    @cached_property
    def truth_table(self) -> np.ndarray:
        """Boolean array over integer codes (see ``core``) computed by marking subcubes.

        Independent of ``eval``: each distinct shifted pattern contributes the
        subcube of codes that agree with it on its domain.
        """
        n = self.n
        if n > TRUTH_TABLE_MAX_N:
            raise ResourceLimitError(f"truth table needs N <= {TRUTH_TABLE_MAX_N}, got {n}")
        codes = np.arange(1 << n, dtype=np.int64)
        table = np.zeros(1 << n, dtype=bool)
        seen = set()
        for e in range(len(self.elements) if not self.is_cyclic else n):
            pos = self.shifted_positions(self._element(e))
            care = val = 0
            for i, v in zip(pos.tolist(), self._vals.tolist()):
                bit = 1 << (n - 1 - i)
                care |= bit
                if v:
                    val |= bit
            if (care, val) in seen:
                continue
            seen.add((care, val))
            table |= (codes & care) == val
        table.flags.writeable = False
        return table


def explicit(generators, pattern, cap: int | None = None) -> MintermFunction:
    """Convenience constructor for an explicit group given image sequences or Permutations."""
    if isinstance(pattern, str):
        pattern = Pattern.from_str(pattern)
    gens = tuple(g if isinstance(g, Permutation) else Permutation(g) for g in generators)
    group = ExplicitGroup(gens) if cap is None else ExplicitGroup(gens, cap)
    return MintermFunction(group, pattern)
