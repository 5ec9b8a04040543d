"""Fuel-bounded estimators: program-length complexity, algorithmic
probability of strings and sets, prefix-set (monotone) complexity, mutual
information, the halting-sequence proxy, and the chain-rule report.

Conditioning convention: a single string condition y is placed on the
auxiliary tape as-is; tuples are paired as the concatenation of
self-delimiting codes, with numbers first mapped to bit strings by the
package's natural-number convention.  Reports always state that set
conditions use the canonical set encoding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .codec import (
    all_strings_upto,
    canonical_sorted,
    encode_self_delim,
    encode_string_set,
    nat_to_bits,
)
from .dyadic import Dyadic, ceil_neg_log2, dyadic_sum
from .machine import (
    MachineConfig,
    get_enumeration,
    min_program_for_output,
    min_program_with_prefix_in,
    programs_for_output,
)


class InformationUndefined(ValueError):
    """Mutual information needs a finite unconditional complexity."""


@dataclass(frozen=True)
class ComplexityValue:
    """min program length within bounds; None means nothing reached the target."""

    value: Optional[int]
    witness: Optional[str]
    config: MachineConfig

    @property
    def is_finite(self) -> bool:
        return self.value is not None


def pair_aux(x: str, y: str) -> str:
    """The fixed pairing <x, y>: concatenation of self-delimiting codes."""
    return encode_self_delim(x) + encode_self_delim(y)


def pair_aux_nat(x: str, n: int) -> str:
    return encode_self_delim(x) + encode_self_delim(nat_to_bits(n))


def k_t(x: str, y: str = "", cfg: MachineConfig = None) -> ComplexityValue:
    """Length of the shortest fuel-bounded program computing x from aux y."""
    rec = min_program_for_output(x, cfg, y)
    if rec is None:
        return ComplexityValue(None, None, cfg)
    return ComplexityValue(len(rec.program), rec.program, cfg)


def m_t(x: str, y: str = "", cfg: MachineConfig = None) -> Dyadic:
    """Total 2^-len mass of fuel-bounded programs computing x from aux y."""
    return dyadic_sum(Dyadic(1, len(r.program)) for r in programs_for_output(x, cfg, y))


def m_set(members: Iterable[str], y: str = "", cfg: MachineConfig = None) -> Dyadic:
    """Algorithmic probability of a finite set: the sum of its members' masses."""
    return dyadic_sum(m_t(x, y, cfg) for x in set(members))


def km_t(members, cfg: MachineConfig, y: str = "") -> ComplexityValue:
    """Shortest program whose output has a prefix in the (nonempty) set."""
    targets = list(members)
    if not targets:
        raise ValueError("prefix set must be nonempty")
    rec = min_program_with_prefix_in(targets, cfg, y)
    if rec is None:
        return ComplexityValue(None, None, cfg)
    return ComplexityValue(len(rec.program), rec.program, cfg)


def mutual_info_t(x: str, y: str, cfg: MachineConfig) -> int:
    """k_t(x) - k_t(x|y); negative desk-scale values are reported, not clamped."""
    base = k_t(x, "", cfg)
    if not base.is_finite:
        raise InformationUndefined(f"no program within bounds outputs {x!r}")
    cond = k_t(x, y, cfg)
    if not cond.is_finite:
        raise InformationUndefined("conditional complexity infinite at these bounds")
    return base.value - cond.value


@dataclass(frozen=True)
class HaltingProxy:
    """Fuel-bounded characteristic sequence of the machine's domain, one bit
    per string of length <= L in canonical order."""

    bits: str
    config: MachineConfig


def halting_proxy(cfg: MachineConfig, aux: str = "") -> HaltingProxy:
    programs = {r.program for r in get_enumeration(cfg, aux)}
    out = []
    for s in all_strings_upto(cfg.max_program_len):
        halts = any(s[:i] in programs for i in range(len(s) + 1))
        out.append("1" if halts else "0")
    return HaltingProxy("".join(out), cfg)


def info_with_halting(x: str, cfg: MachineConfig) -> Optional[int]:
    """I(x : H_t) proxy: k_t(x) - k_t(x | proxy bits); None when either side
    is infinite at these bounds."""
    base = k_t(x, "", cfg)
    if not base.is_finite:
        return None
    cond = k_t(x, halting_proxy(cfg).bits, cfg)
    if not cond.is_finite:
        return None
    return base.value - cond.value


def info_with_set(x: str, members, cfg: MachineConfig) -> Optional[int]:
    """I_t(x ; <D>) with the set condition under its canonical encoding."""
    base = k_t(x, "", cfg)
    cond = k_t(x, encode_string_set(members), cfg)
    if not (base.is_finite and cond.is_finite):
        return None
    return base.value - cond.value


@dataclass(frozen=True)
class ChainRuleReport:
    x: str
    y: str
    k_pair: ComplexityValue
    k_x: ComplexityValue
    k_y_given: ComplexityValue
    gap: Optional[int]          # k_t(x,y) - (k_t(x) + k_t(y | <x, k_t(x)>))

    def bound_holds(self, c_chain: int) -> Optional[bool]:
        return None if self.gap is None else self.gap <= c_chain


def chain_rule_report(x: str, y: str, cfg: MachineConfig) -> ChainRuleReport:
    """Both sides of the chain rule at these bounds, with the signed gap."""
    pair = encode_self_delim(x) + encode_self_delim(y)
    k_pair = k_t(pair, "", cfg)
    k_x = k_t(x, "", cfg)
    if k_x.is_finite:
        k_y_given = k_t(y, pair_aux_nat(x, k_x.value), cfg)
    else:
        k_y_given = ComplexityValue(None, None, cfg)
    gap = None
    if k_pair.is_finite and k_x.is_finite and k_y_given.is_finite:
        gap = k_pair.value - (k_x.value + k_y_given.value)
    return ChainRuleReport(x, y, k_pair, k_x, k_y_given, gap)


def reachable_outputs(cfg: MachineConfig, aux: str = "") -> list[str]:
    """Every distinct output of the fuel-bounded enumeration, canonical order."""
    return canonical_sorted(r.output for r in get_enumeration(cfg, aux))


def output_stats(cfg: MachineConfig, aux: str = "") -> dict[str, tuple[int, Dyadic]]:
    """Per reachable output: (shortest program length, total program mass),
    straight from the full enumeration (the dual route to the targeted
    searches)."""
    stats: dict[str, tuple[int, Dyadic]] = {}
    for rec in get_enumeration(cfg, aux):
        best, mass = stats.get(rec.output, (None, Dyadic.zero()))
        new_best = len(rec.program) if best is None else min(best, len(rec.program))
        stats[rec.output] = (new_best, mass + Dyadic(1, len(rec.program)))
    return stats


def coding_direction_holds(cfg: MachineConfig, aux: str = "") -> bool:
    """ceil(-log m_t(x)) <= k_t(x) over every reachable output, exactly."""
    for _x, (best, mass) in output_stats(cfg, aux).items():
        if ceil_neg_log2(mass) > best:
            return False
    return True
