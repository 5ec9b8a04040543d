"""Bit-level primitives: bit strings, self-delimiting codes, prefix-free
sets, intervals, and the canonical encodings shared by every module.

Bit strings are plain Python ``str`` over the alphabet ``{'0', '1'}``; the
empty string is a first-class value.  Fixed conventions, documented once and
used everywhere:

* natural numbers map to bit strings as binary without leading zeros, with
  0 mapping to the empty string (1 -> "1", 2 -> "10", 3 -> "11", ...);
* the self-delimiting code of a string x is ``1^len(x) 0 x``;
* canonical order on strings is length-then-lexicographic;
* a finite string set encodes as the count code followed by each member's
  self-delimiting code, members in canonical order;
* an elementary measure with dyadic weights encodes as the count code
  followed by, per support element in canonical order, the element's code,
  the numerator's code, and the exponent's code (numerator/2^exponent).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .dyadic import Dyadic, ceil_neg_log2, dyadic_sum  # noqa: F401  (re-exported)


class DecodeError(ValueError):
    """A bit stream does not parse under the canonical encodings."""


# ---------------------------------------------------------------------------
# bit-string basics
# ---------------------------------------------------------------------------

def assert_bits(x: str) -> str:
    if x.strip("01"):
        raise ValueError(f"not a bit string: {x!r}")
    return x


def canon_key(x: str) -> tuple[int, str]:
    """Sort key for the canonical length-then-lexicographic order."""
    return (len(x), x)


def canonical_sorted(strings: Iterable[str]) -> list[str]:
    return sorted(set(strings), key=canon_key)


def all_strings_upto(n: int) -> Iterator[str]:
    """Every bit string of length <= n in canonical order (2^(n+1)-1 of them)."""
    yield ""
    for length in range(1, n + 1):
        for v in range(1 << length):
            yield format(v, f"0{length}b")


def is_prefix(p: str, x: str) -> bool:
    return x.startswith(p)

def is_proper_prefix(p: str, x: str) -> bool:
    return len(p) < len(x) and x.startswith(p)


def left_of(x: str, y: str) -> bool:
    """The left-of relation: some z with z0 a prefix of x and z1 a prefix of y.

    Prefix-comparable strings are never left-of each other; for
    prefix-incomparable strings exactly one of left_of(x, y), left_of(y, x)
    holds.
    """
    m = min(len(x), len(y))
    for i in range(m):
        if x[i] != y[i]:
            return x[i] == "0"
    return False


def nat_to_bits(n: int) -> str:
    if n < 0:
        raise ValueError("negative natural")
    return "" if n == 0 else format(n, "b")


def bits_to_nat(x: str) -> int:
    """Inverse of nat_to_bits; rejects non-canonical forms (leading zero)."""
    if x == "":
        return 0
    if x[0] == "0":
        raise DecodeError(f"non-canonical natural: {x!r}")
    return int(x, 2)


# ---------------------------------------------------------------------------
# self-delimiting codes
# ---------------------------------------------------------------------------

def encode_self_delim(x: str) -> str:
    """1^len(x) 0 x; the image over all strings is prefix-free."""
    assert_bits(x)
    return "1" * len(x) + "0" + x


def decode_self_delim_from(s: str, pos: int = 0) -> tuple[str, int]:
    n = 0
    i = pos
    while i < len(s) and s[i] == "1":
        n += 1
        i += 1
    if i >= len(s):
        raise DecodeError("unterminated unary header")
    i += 1  # the '0' terminator
    if i + n > len(s):
        raise DecodeError("truncated payload")
    return s[i:i + n], i + n


def decode_self_delim(s: str) -> str:
    x, end = decode_self_delim_from(s, 0)
    if end != len(s):
        raise DecodeError("trailing bits after self-delimiting code")
    return x


def encode_nat(n: int) -> str:
    return encode_self_delim(nat_to_bits(n))


def decode_nat_from(s: str, pos: int = 0) -> tuple[int, int]:
    bits, end = decode_self_delim_from(s, pos)
    return bits_to_nat(bits), end


# ---------------------------------------------------------------------------
# string sets
# ---------------------------------------------------------------------------

def encode_string_set(members: Iterable[str]) -> str:
    """Count code then each member's code, members canonicalized first."""
    ordered = canonical_sorted(assert_bits(m) for m in members)
    return encode_nat(len(ordered)) + "".join(encode_self_delim(m) for m in ordered)


def decode_string_set(s: str) -> list[str]:
    n, pos = decode_nat_from(s, 0)
    members = []
    for _ in range(n):
        m, pos = decode_self_delim_from(s, pos)
        members.append(m)
    if pos != len(s):
        raise DecodeError("trailing bits after set encoding")
    if members != canonical_sorted(members) or len(set(members)) != n:
        raise DecodeError("set members not canonical")
    return members


# ---------------------------------------------------------------------------
# prefix-free sets and intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrefixFreeSet:
    """A finite set of bit strings, none a proper prefix of another."""

    members: tuple[str, ...]

    def __init__(self, members: Iterable[str]):
        ordered = canonical_sorted(assert_bits(m) for m in members)
        for i, a in enumerate(ordered):
            for b in ordered[i + 1:]:
                if is_proper_prefix(a, b):
                    raise ValueError(f"{a!r} is a proper prefix of {b!r}")
        object.__setattr__(self, "members", tuple(ordered))

    def __iter__(self) -> Iterator[str]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, x: str) -> bool:
        return x in self.members

    def kraft_sum(self) -> Dyadic:
        return dyadic_sum(Dyadic(1, len(m)) for m in self.members)


def is_prefix_free(strings: Sequence[str]) -> bool:
    ordered = sorted(strings)
    return not any(is_proper_prefix(a, b) for a, b in zip(ordered, ordered[1:]))


@dataclass(frozen=True)
class OpenInterval:
    """Open dyadic subinterval of [0, 1]."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        if not (self.lo < self.hi and self.hi <= Dyadic.one()):
            raise ValueError(f"bad interval ({self.lo}, {self.hi})")

    def contains(self, other: "OpenInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def disjoint(self, other: "OpenInterval") -> bool:
        return self.hi <= other.lo or other.hi <= self.lo

    def entirely_left_of(self, other: "OpenInterval") -> bool:
        return self.hi <= other.lo

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo


def interval_of(p: str) -> OpenInterval:
    """The open interval ([p] 2^-len(p), ([p]+1) 2^-len(p)); [p] is p's binary value."""
    assert_bits(p)
    if not p:
        raise ValueError("the empty string has no associated interval")
    v = int(p, 2)
    n = len(p)
    return OpenInterval(Dyadic(v, n), Dyadic(v + 1, n))


# ---------------------------------------------------------------------------
# dyadic-weight measures as bit strings
# ---------------------------------------------------------------------------

def encode_measure_entries(entries: Sequence[tuple[str, int, int]]) -> str:
    """Encode (element, numerator, exponent) triples, canonical element order.

    Weights must be positive dyadics in canonical form (numerator odd).
    """
    ordered = sorted(entries, key=lambda e: canon_key(e[0]))
    if len({e[0] for e in ordered}) != len(ordered):
        raise ValueError("duplicate support element")
    out = [encode_nat(len(ordered))]
    for x, num, exp in ordered:
        if num <= 0 or exp < 0 or (num % 2 == 0 and exp > 0):
            raise ValueError(f"non-canonical weight {num}/2^{exp}")
        out.append(encode_self_delim(assert_bits(x)))
        out.append(encode_nat(num))
        out.append(encode_nat(exp))
    return "".join(out)


def decode_measure_entries(s: str) -> list[tuple[str, int, int]]:
    n, pos = decode_nat_from(s, 0)
    entries: list[tuple[str, int, int]] = []
    for _ in range(n):
        x, pos = decode_self_delim_from(s, pos)
        num, pos = decode_nat_from(s, pos)
        exp, pos = decode_nat_from(s, pos)
        if num <= 0 or (num % 2 == 0 and exp > 0):
            raise DecodeError(f"non-canonical weight {num}/2^{exp}")
        entries.append((x, num, exp))
    if pos != len(s):
        raise DecodeError("trailing bits after measure encoding")
    keys = [canon_key(e[0]) for e in entries]
    if keys != sorted(keys) or len(set(keys)) != len(keys):
        raise DecodeError("measure entries not in canonical order")
    return entries
