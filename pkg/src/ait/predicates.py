"""Binary predicates, their encodings, cylinder sets, and the complete-
extension search.

A predicate fixes bits at 1-based positions.  Its cylinder is every string
of length max-index agreeing with it, so the cylinder's uniform measure is
exactly 2^-|domain|.  A complete extension comes from the shortest program
whose output has a prefix in the cylinder, padded with zeros beyond the
output: a strictly desk-scale surrogate for extension complexity, and
reports say so.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .codec import PrefixFreeSet, encode_nat, decode_nat_from, DecodeError
from .complexity import km_t
from .machine import MachineConfig, P_EPSILON, min_program_for_output


@dataclass(frozen=True)
class BinaryPredicate:
    """A finite map from 1-based positions to bits."""

    pairs: tuple[tuple[int, int], ...]

    def __init__(self, pairs):
        items = sorted(dict(pairs).items())
        for idx, bit in items:
            if idx < 1 or bit not in (0, 1):
                raise ValueError(f"bad predicate entry ({idx}, {bit})")
        object.__setattr__(self, "pairs", tuple(items))

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __call__(self, i: int) -> Optional[int]:
        return dict(self.pairs).get(i)

    def agrees_with(self, bits: str) -> bool:
        """Does an infinite word starting with ``bits`` (then zeros) agree?"""
        return all(
            (bits[i - 1] if i <= len(bits) else "0") == str(b) for i, b in self.pairs
        )


def encode_predicate(g: BinaryPredicate) -> str:
    """Count code then, per entry in index order, the index and value codes
    (the interleaved index/value list under the set-encoding scheme)."""
    out = [encode_nat(2 * len(g))]
    for idx, bit in g.pairs:
        out.append(encode_nat(idx))
        out.append(encode_nat(bit))
    return "".join(out)


def decode_predicate(bits: str) -> BinaryPredicate:
    n2, pos = decode_nat_from(bits, 0)
    if n2 % 2:
        raise DecodeError("odd interleaved count")
    pairs = []
    for _ in range(n2 // 2):
        idx, pos = decode_nat_from(bits, pos)
        bit, pos = decode_nat_from(bits, pos)
        pairs.append((idx, bit))
    if pos != len(bits):
        raise DecodeError("trailing bits after predicate encoding")
    if pairs != sorted(pairs) or len({i for i, _ in pairs}) != len(pairs):
        raise DecodeError("predicate entries not in canonical index order")
    return BinaryPredicate(pairs)


def cylinder(g: BinaryPredicate) -> PrefixFreeSet:
    """All strings of length max-index agreeing with g at every defined
    index; the empty domain leaves the length undefined and is rejected."""
    if not len(g):
        raise ValueError("the empty predicate has no cylinder length")
    n = max(g.domain)
    fixed = dict(g.pairs)
    members = []
    free = [i for i in range(1, n + 1) if i not in fixed]
    for v in range(1 << len(free)):
        word = ["0"] * n
        for i, bit in fixed.items():
            word[i - 1] = str(bit)
        for j, i in enumerate(free):
            word[i - 1] = "1" if (v >> j) & 1 else "0"
        members.append("".join(word))
    return PrefixFreeSet(members)


def predicate_of_cylinder(members: PrefixFreeSet) -> BinaryPredicate:
    """Inverse construction: the positions where every member agrees...
    valid when the set is a full cylinder, which round-trip tests assert."""
    strings = list(members)
    n = len(strings[0])
    pairs = []
    for i in range(1, n + 1):
        bits = {s[i - 1] for s in strings}
        if len(bits) == 1:
            pairs.append((i, int(bits.pop())))
    return BinaryPredicate(pairs)


@dataclass(frozen=True)
class ExtensionResult:
    program: str
    raw_output: str
    extension_rule: str  # always "output bits then zeros"
    bound_slack: int     # len(program) - |domain|

    def extension_bit(self, i: int) -> int:
        if i < 1:
            raise ValueError("positions are 1-based")
        return int(self.raw_output[i - 1]) if i <= len(self.raw_output) else 0


class ExtensionNotFound(RuntimeError):
    """No fuel-bounded program reaches the cylinder; enlarge the bounds."""


def complete_extension_search(g: BinaryPredicate, cfg: MachineConfig) -> ExtensionResult:
    """The prefix-set complexity witness for the cylinder, read as a complete
    extension by zero-padding its output.

    The empty predicate constrains nothing: any halting program works and
    the search returns the cheapest one.
    """
    if not len(g):
        rec = min_program_for_output("", cfg)
        program, output = (rec.program, rec.output) if rec else (P_EPSILON, "")
        return ExtensionResult(program, output, "output bits then zeros", len(program))
    cyl = cylinder(g)
    witness = km_t(cyl, cfg)
    if not witness.is_finite:
        raise ExtensionNotFound(
            f"no program within {cfg} outputs a string extending the cylinder"
        )
    from .machine import run

    output = run(witness.witness, "", cfg.fuel).output
    result = ExtensionResult(
        witness.witness, output, "output bits then zeros", witness.value - len(g)
    )
    if not g.agrees_with(result.raw_output):
        raise AssertionError("witness output disagrees with the predicate")
    return result
