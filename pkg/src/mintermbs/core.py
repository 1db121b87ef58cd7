"""Patterns, bit strings, blocks and permutations over Z_N.

Text formats
------------
* Pattern: one character per position from ``0``, ``1``, ``*``; index 0 is leftmost.
* BitString: same, without ``*``.
* Block: sorted comma-separated indices, e.g. ``"0,3,7"``; the empty block is ``""``.

Integer codes
-------------
Small-N routines index the 2^N inputs by an integer ``code`` obtained by reading
the text form as a binary numeral, so position ``i`` is bit ``N - 1 - i``.  Counting
codes upward therefore visits inputs in lexicographic order of their text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError

STAR = 2
_CHAR_TO_SYM = {"0": 0, "1": 1, "*": STAR}
_SYM_TO_CHAR = "01*"

DEFAULT_GROUP_CAP = 100_000

Block = frozenset


@dataclass(frozen=True)
class Pattern:
    """A string over {0, 1, *}; ``symbols`` holds one byte per position (2 = star)."""

    symbols: bytes
    domain: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.symbols, bytes):
            object.__setattr__(self, "symbols", bytes(self.symbols))
        if len(self.symbols) < 1:
            raise InvalidArgumentError("pattern length must be at least 1")
        if self.symbols.translate(None, b"\x00\x01\x02"):
            raise InvalidArgumentError("pattern entries must be 0, 1 or star")
        dom = tuple(i for i, s in enumerate(self.symbols) if s != STAR)
        object.__setattr__(self, "domain", dom)

    @classmethod
    def from_str(cls, text: str, n: int | None = None) -> "Pattern":
        """Parse text; if ``n`` is given, pad on the right with stars up to length n."""
        try:
            syms = bytes(_CHAR_TO_SYM[c] for c in text.strip())
        except KeyError as exc:
            raise InvalidArgumentError(f"bad pattern character {exc.args[0]!r}") from None
        if n is not None:
            if len(syms) > n:
                raise InvalidArgumentError(f"pattern longer than n={n}")
            syms += bytes([STAR]) * (n - len(syms))
        return cls(syms)

    @classmethod
    def from_values(cls, n: int, values: dict) -> "Pattern":
        syms = bytearray([STAR]) * n
        for i, v in values.items():
            if not 0 <= i < n or v not in (0, 1):
                raise InvalidArgumentError(f"bad entry {i}:{v}")
            syms[i] = v
        return cls(bytes(syms))

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __str__(self):
        return "".join(_SYM_TO_CHAR[s] for s in self.symbols)

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def dom_size(self) -> int:
        return len(self.domain)

    def values(self) -> tuple:
        """Defined values, aligned with ``domain``."""
        return tuple(self.symbols[i] for i in self.domain)

    def count(self, value: int) -> int:
        return self.symbols.count(value)


@dataclass(frozen=True)
class BitString:
    bits: bytes

    def __post_init__(self):
        if not isinstance(self.bits, bytes):
            object.__setattr__(self, "bits", bytes(self.bits))
        if len(self.bits) < 1:
            raise InvalidArgumentError("bit string length must be at least 1")
        if self.bits.translate(None, b"\x00\x01"):
            raise InvalidArgumentError("bits must be 0 or 1")

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise InvalidArgumentError(f"bad bit string {text!r}")
        return cls(bytes(int(c) for c in text))

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(bytes(n))

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(bytes([1]) * n)

    @classmethod
    def from_code(cls, code: int, n: int) -> "BitString":
        return cls(bytes((code >> (n - 1 - i)) & 1 for i in range(n)))

    @property
    def code(self) -> int:
        return int(str(self), 2)

    @property
    def n(self) -> int:
        return len(self.bits)

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __str__(self):
        return "".join("1" if b else "0" for b in self.bits)

    def array(self) -> np.ndarray:
        """Read-only uint8 view of the bits."""
        return np.frombuffer(self.bits, dtype=np.uint8)


def make_block(indices: Iterable[int], n: int) -> frozenset:
    block = frozenset(int(i) for i in indices)
    if any(not 0 <= i < n for i in block):
        raise InvalidArgumentError(f"block {sorted(block)} not inside Z_{n}")
    return block


def format_block(block: Iterable[int]) -> str:
    return ",".join(str(i) for i in sorted(block))


def parse_block(text: str, n: int | None = None) -> frozenset:
    text = text.strip()
    items = [int(t) for t in text.split(",") if t.strip()] if text else []
    if n is None:
        return frozenset(items)
    return make_block(items, n)


def block_mask(block: Iterable[int], n: int) -> int:
    """Integer-code mask of a block (position i is bit n-1-i)."""
    m = 0
    for i in block:
        m |= 1 << (n - 1 - i)
    return m


def mask_block(mask: int, n: int) -> frozenset:
    return frozenset(i for i in range(n) if (mask >> (n - 1 - i)) & 1)


class Permutation:
    """Bijection of Z_N stored by its image sequence.

    Cyclic shifts t_j (image(i) = i + j mod N) are kept in compact form with
    ``offset`` set and images materialized only on demand; a permutation built
    from images that happens to be a shift is recognized and gets ``offset`` too.
    Equality and hashing depend only on the mapping.
    """

    __slots__ = ("n", "offset", "_images")

    def __init__(self, images):
        imgs = tuple(int(v) for v in images)
        n = len(imgs)
        if n < 1 or sorted(imgs) != list(range(n)):
            raise InvalidArgumentError("images must be a permutation of Z_N")
        j = imgs[0]
        cyc = all(imgs[i] == (i + j) % n for i in range(n))
        self.n = n
        self.offset = j if cyc else None
        self._images = imgs

    @classmethod
    def shift(cls, n: int, j: int) -> "Permutation":
        if n < 1:
            raise InvalidArgumentError("permutation degree must be positive")
        obj = cls.__new__(cls)
        obj.n = n
        obj.offset = j % n
        obj._images = None
        return obj

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls.shift(n, 0)

    @property
    def images(self) -> tuple:
        if self._images is None:
            j, n = self.offset, self.n
            self._images = tuple((i + j) % n for i in range(n))
        return self._images

    def __call__(self, i: int) -> int:
        if self.offset is not None:
            return (i + self.offset) % self.n
        return self._images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) = self(other(i))
        if self.n != other.n:
            raise InvalidArgumentError("permutation lengths differ")
        if self.offset is not None and other.offset is not None:
            return Permutation.shift(self.n, self.offset + other.offset)
        mine = self.images
        return Permutation(tuple(mine[k] for k in other.images))

    def inverse(self) -> "Permutation":
        if self.offset is not None:
            return Permutation.shift(self.n, -self.offset)
        inv = [0] * self.n
        for i, v in enumerate(self._images):
            inv[v] = i
        return Permutation(tuple(inv))

    def _key(self):
        return ("t", self.n, self.offset) if self.offset is not None else self._images

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        return self.images < other.images

    def __repr__(self):
        if self.offset is not None:
            return f"Permutation.shift({self.n}, {self.offset})"
        return f"Permutation({self._images!r})"

    def __str__(self):
        if self.offset is not None:
            return f"t_{self.offset}"
        return "[" + ",".join(map(str, self._images)) + "]"


def _symbols(obj) -> bytes:
    if isinstance(obj, Pattern):
        return obj.symbols
    if isinstance(obj, BitString):
        return obj.bits
    raise InvalidArgumentError(f"expected Pattern or BitString, got {type(obj).__name__}")


def agree(p: Union[Pattern, BitString], q: Union[Pattern, BitString]) -> bool:
    """True iff no position is defined in both with different values."""
    a, b = _symbols(p), _symbols(q)
    if len(a) != len(b):
        raise InvalidArgumentError(f"length mismatch: {len(a)} vs {len(b)}")
    return all(u == v or u == STAR or v == STAR for u, v in zip(a, b))


def apply_permutation(obj, sigma: Permutation):
    """sigma(p)_i = p_{sigma^-1(i)} for patterns/strings; sigma(B) = {sigma(b)} for blocks."""
    n = sigma.n
    if isinstance(obj, (frozenset, set)):
        if any(not 0 <= b < n for b in obj):
            raise InvalidArgumentError(f"block not inside Z_{n}")
        return frozenset(sigma(b) for b in obj)
    syms = _symbols(obj)
    if len(syms) != n:
        raise InvalidArgumentError(f"length mismatch: {len(syms)} vs permutation on {n}")
    if sigma.offset is not None:
        j = sigma.offset % n
        out = syms[n - j:] + syms[:n - j] if j else syms
    else:
        buf = bytearray(n)
        for k, img in enumerate(sigma.images):
            buf[img] = syms[k]
        out = bytes(buf)
    return type(obj)(out)


def flip(x: BitString, block: Iterable[int]) -> BitString:
    """x^B: complement the bits indexed by the block."""
    n = len(x)
    buf = bytearray(x.bits)
    for i in block:
        if not 0 <= i < n:
            raise InvalidArgumentError(f"index {i} outside Z_{n}")
        buf[i] ^= 1
    return BitString(bytes(buf))


@dataclass(frozen=True)
class CyclicGroup:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("group degree must be positive")


@dataclass(frozen=True)
class ExplicitGroup:
    """Group generated by explicit permutations; enumeration stops at ``cap`` elements."""

    generators: tuple
    cap: int = DEFAULT_GROUP_CAP

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise InvalidArgumentError("explicit group needs at least one generator")
        if len({g.n for g in gens}) != 1:
            raise InvalidArgumentError("generators act on different sets")
        object.__setattr__(self, "generators", gens)

    @property
    def n(self) -> int:
        return self.generators[0].n


GroupSpec = Union[CyclicGroup, ExplicitGroup]


@lru_cache(maxsize=64)
def enumerate_group(g: GroupSpec) -> tuple:
    """All group elements, deduplicated, sorted by image sequence.

    For a finite group, closure under composition with the generators already
    contains every inverse, so a plain breadth-first closure suffices.
    """
    if isinstance(g, CyclicGroup):
        return tuple(Permutation.shift(g.n, j) for j in range(g.n))
    ident = Permutation.identity(g.n)
    seen = {ident: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for gen in g.generators:
                e = gen * h
                if e not in seen:
                    seen[e] = e
                    if len(seen) > g.cap:
                        raise ResourceLimitError(
                            f"group closure exceeds cap of {g.cap} elements")
                    nxt.append(e)
        frontier = nxt
    return tuple(sorted(seen.values()))


def is_transitive(g: GroupSpec) -> bool:
    if isinstance(g, CyclicGroup):
        return True
    orbit = {e(0) for e in enumerate_group(g)}
    return len(orbit) == g.n


def random_pattern(n: int, dom_size: int, rng: np.random.Generator) -> Pattern:
    """Pattern with ``dom_size`` uniformly placed positions holding fair random bits."""
    if not 1 <= dom_size <= n:
        raise InvalidArgumentError(f"domain size {dom_size} not in [1, {n}]")
    pos = rng.choice(n, size=dom_size, replace=False)
    vals = rng.integers(0, 2, size=dom_size)
    return Pattern.from_values(n, {int(i): int(v) for i, v in zip(pos, vals)})
