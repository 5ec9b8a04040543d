"""Elementary measures and the machinery built on them: tests, deficiency
of randomness, Shannon-Fano codes, image and conditioned measures, the
bounded stochasticity search, and the derandomized hitting vector.

Weights are exact rationals.  Machine-facing encodings require dyadic
weights (the only kind the codec serializes); conditioning a measure may
leave the dyadic ring, which is why the weight type widens to ``Fraction``
internally while every machine-side object stays dyadic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

from .codec import (
    assert_bits,
    canon_key,
    canonical_sorted,
    decode_measure_entries,
    encode_measure_entries,
)
from .complexity import k_t, pair_aux
from .machine import MachineConfig, search_programs

SEMIMEASURE = "semimeasure"
PROBABILITY = "probability"


@dataclass(frozen=True)
class ElementaryMeasure:
    """Finite-support rational measure over bit strings."""

    weights: Mapping[str, Fraction]
    kind: str = PROBABILITY

    def __post_init__(self):
        object.__setattr__(
            self,
            "weights",
            {assert_bits(x): Fraction(w) for x, w in dict(self.weights).items()},
        )
        if self.kind not in (SEMIMEASURE, PROBABILITY):
            raise ValueError(f"unknown measure kind {self.kind!r}")

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(canonical_sorted(self.weights))

    def __call__(self, x: str) -> Fraction:
        return self.weights.get(x, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def mass_of(self, members: Iterable[str]) -> Fraction:
        return sum((self(x) for x in set(members)), Fraction(0))

    def is_dyadic(self) -> bool:
        return all(w.denominator & (w.denominator - 1) == 0 for w in self.weights.values())


def measure_violations(w: ElementaryMeasure) -> list[str]:
    """Which constraints fail: support positivity, then the kind's sum rule."""
    problems = []
    for x, weight in w.weights.items():
        if weight <= 0:
            problems.append(f"weight of {x!r} is {weight} (must be positive)")
    total = w.total()
    if w.kind == PROBABILITY and total != 1:
        problems.append(f"total mass {total} != 1")
    if w.kind == SEMIMEASURE and total > 1:
        problems.append(f"total mass {total} > 1")
    return problems


def validate_measure(w: ElementaryMeasure) -> bool:
    return not measure_violations(w)


def uniform_measure(n: int) -> ElementaryMeasure:
    """The uniform probability measure on all strings of length n."""
    return ElementaryMeasure(
        {format(v, f"0{n}b") if n else "": Fraction(1, 1 << n) for v in range(1 << n)}
    )


def point_mass(x: str) -> ElementaryMeasure:
    return ElementaryMeasure({x: Fraction(1)})


def encode_measure(w: ElementaryMeasure) -> str:
    """Canonical bit-string encoding; weights must be dyadic."""
    entries = []
    for x in w.support:
        weight = w(x)
        den = weight.denominator
        if den & (den - 1):
            raise ValueError(f"weight {weight} of {x!r} is not dyadic")
        entries.append((x, weight.numerator, den.bit_length() - 1))
    return encode_measure_entries(entries)


def decode_measure(bits: str, kind: str = PROBABILITY) -> ElementaryMeasure:
    entries = decode_measure_entries(bits)
    return ElementaryMeasure(
        {x: Fraction(num, 1 << exp) for x, num, exp in entries}, kind
    )


# ---------------------------------------------------------------------------
# tests and deficiency
# ---------------------------------------------------------------------------

def is_w_test(s: Mapping[str, int], w: ElementaryMeasure) -> bool:
    """Exact check of sum 2^s(x) W(x) <= 1 over the support."""
    total = Fraction(0)
    for x in w.support:
        e = s[x]
        total += w(x) * (Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e))
    return total <= 1


@dataclass(frozen=True)
class DeficiencyValue:
    value: int
    floor_neg_log_weight: int
    conditional_k: int


class UnreachableSupport(ValueError):
    """No fuel-bounded program reaches the element, so its deficiency has no
    finite conditional term at these bounds."""


def deficiency(a: str, w: ElementaryMeasure, y: str, cfg: MachineConfig) -> DeficiencyValue:
    """floor(-log W(a)) - k_t(a|y), for a in the support of W."""
    weight = w(a)
    if weight <= 0:
        raise ValueError(f"{a!r} is not in the support")
    if weight > 1:
        raise ValueError("weights above 1 have no log-weight")
    num, den = weight.numerator, weight.denominator
    # floor(-log2 (num/den)) = len(bin den) - len(bin num) - [den's bits <= num's bits shifted]
    fl = _floor_neg_log2_fraction(weight)
    cond = k_t(a, y, cfg)
    if not cond.is_finite:
        raise UnreachableSupport(a)
    return DeficiencyValue(fl - cond.value, fl, cond.value)


def _floor_neg_log2_fraction(q: Fraction) -> int:
    """floor(-log2 q) for rational q in (0, 1]: the k with 2^-(k+1) < q <= 2^-k."""
    if q <= 0 or q > 1:
        raise ValueError("argument must be in (0, 1]")
    num, den = q.numerator, q.denominator
    k = den.bit_length() - num.bit_length()  # within 1 of the answer, k >= 0
    if (num << k) > den:
        k -= 1
    elif (num << (k + 1)) <= den:
        k += 1
    return k


def deficiency_test_sum(w: ElementaryMeasure, y: str, cfg: MachineConfig) -> Fraction:
    """sum over the support of 2^d(a|W,y) W(a); elements with no program
    within bounds contribute 0 (their deficiency is -infinity)."""
    total = Fraction(0)
    for a in w.support:
        try:
            d = deficiency(a, w, y, cfg).value
        except UnreachableSupport:
            continue
        total += w(a) * (Fraction(1 << d) if d >= 0 else Fraction(1, 1 << -d))
    return total


# ---------------------------------------------------------------------------
# Shannon-Fano codes
# ---------------------------------------------------------------------------

def shannon_fano(p: ElementaryMeasure) -> dict[str, str]:
    """A prefix-free code with len(code(x)) = ceil(-log P(x)) + 1.

    The +1 makes the Kraft sum at most 1/2, so the canonical assignment
    below always succeeds; decoding is a prefix-map lookup.
    """
    if measure_violations(p):
        raise ValueError("code source must be a valid measure")
    lengths = []
    for x in p.support:
        fl = _floor_neg_log2_fraction(p(x))
        ceil = fl if (Fraction(1, 1 << fl) == p(x)) else fl + 1
        lengths.append((ceil + 1, canon_key(x), x))
    lengths.sort()
    code: dict[str, str] = {}
    value, prev_len = 0, 0
    for length, _, x in lengths:
        value <<= (length - prev_len)
        code[x] = format(value, f"0{length}b")
        value += 1
        prev_len = length
    return code


def shannon_fano_decode(code: Mapping[str, str], bits: str) -> str:
    inverse = {v: k for k, v in code.items()}
    for i in range(1, len(bits) + 1):
        if bits[:i] in inverse and i == len(bits):
            return inverse[bits]
        if bits[:i] in inverse:
            raise ValueError("trailing bits after a complete codeword")
    raise ValueError("not a codeword")


# ---------------------------------------------------------------------------
# image and conditioned measures
# ---------------------------------------------------------------------------

def image_measure(w: ElementaryMeasure, g) -> ElementaryMeasure:
    """Exact pushforward along a total map (callable or mapping)."""
    apply = g.__getitem__ if isinstance(g, Mapping) else g
    out: dict[str, Fraction] = {}
    for x in w.support:
        target = assert_bits(apply(x))
        out[target] = out.get(target, Fraction(0)) + w(x)
    return ElementaryMeasure(out, w.kind)


def condition_measure(q: ElementaryMeasure, members: Iterable[str]) -> ElementaryMeasure:
    """Restrict to the set and renormalize exactly; the division may leave
    the dyadic ring, which the Fraction weights absorb."""
    keep = set(members)
    mass = q.mass_of(keep)
    if mass == 0:
        raise ValueError("conditioning on a set of measure zero")
    return ElementaryMeasure(
        {x: q(x) / mass for x in q.support if x in keep}, PROBABILITY
    )


# ---------------------------------------------------------------------------
# stochasticity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StochBounds:
    max_v_len: int
    fuel: int


@dataclass(frozen=True)
class StochasticityResult:
    value: int
    witness_program: str
    witness_measure: ElementaryMeasure
    deficiency: DeficiencyValue
    search_bounds: StochBounds


class StochasticityNotFound(RuntimeError):
    """No fuel-bounded program within the bounds outputs a valid elementary
    probability measure covering the string."""


def _int_log_score(k: int, scoring: str) -> int:
    """3 * ceil(log2 max(k, 1)) (default), or the flat alternative max(k, 0)."""
    if scoring == "k":
        return max(k, 0)
    k = max(k, 1)
    return 3 * ((k - 1).bit_length())


def _measure_prefix_state(bits: str, a: str) -> str:
    """Classify a candidate output prefix: 'dead', 'viable', or 'complete'.

    The grammar is the canonical measure encoding; a prefix is viable while
    some extension could still decode to a valid probability measure whose
    support contains ``a``.
    """
    pos = 0
    blocks: list[str] = []
    while True:
        n = 0
        i = pos
        while i < len(bits) and bits[i] == "1":
            n += 1
            i += 1
        if i >= len(bits) or i + 1 + n > len(bits):
            return _classify_partial(blocks, a, final=False)
        blocks.append(bits[i + 1:i + 1 + n])
        pos = i + 1 + n
        verdict = _classify_partial(blocks, a, final=pos == len(bits))
        if verdict in ("dead", "complete"):
            return verdict
        if pos == len(bits):
            return verdict


def _classify_partial(blocks: list[str], a: str, final: bool) -> str:
    if not blocks:
        return "viable"
    if blocks[0].startswith("0"):
        return "dead"  # non-canonical count
    n = int(blocks[0], 2) if blocks[0] else 0
    if n == 0:
        return "dead"  # a probability measure needs support
    entry_blocks = blocks[1:]
    if len(entry_blocks) > 3 * n:
        return "dead"
    total = Fraction(0)
    seen_a = False
    prev_key = None
    for j in range(0, len(entry_blocks) - len(entry_blocks) % 3, 3):
        x, num_bits, exp_bits = entry_blocks[j:j + 3]
        if num_bits.startswith("0") or exp_bits.startswith("0"):
            return "dead"  # non-canonical numbers
        num = int(num_bits, 2) if num_bits else 0
        exp = int(exp_bits, 2) if exp_bits else 0
        if num <= 0 or (num % 2 == 0 and exp > 0):
            return "dead"
        key = canon_key(x)
        if prev_key is not None and key <= prev_key:
            return "dead"
        prev_key = key
        seen_a = seen_a or x == a
        total += Fraction(num, 1 << exp)
        if total > 1:
            return "dead"
    entries_done = len(entry_blocks) // 3
    if not seen_a:
        # canonical order: once past a's position, a can no longer appear
        if entries_done and prev_key is not None and prev_key > canon_key(a):
            return "dead"
        if entries_done == n:
            return "dead"
    if entries_done == n and len(entry_blocks) % 3 == 0:
        if total != 1:
            return "dead"
        return "complete" if final else "dead"
    if final:
        return "viable"  # complete blocks so far but the encoding is unfinished
    return "viable"


def stochasticity(
    a: str,
    y: str,
    bounds: StochBounds,
    cfg: MachineConfig,
    scoring: str = "3logk",
) -> StochasticityResult:
    """min over programs v (len <= max_v_len) outputting a valid elementary
    probability measure W with a in supp(W), of len(v) + 3 log max(d, 1)
    where d = deficiency(a | W, <v, y>).

    The program scan is exhaustive over the bounded space: the walk only
    prunes branches whose output can no longer extend to a valid encoding,
    so it finds exactly the programs a naive scan over all 2^max_v_len
    strings would find.  Ties break toward shorter then lexicographically
    smaller v.
    """
    search_cfg = MachineConfig(bounds.max_v_len, bounds.fuel)
    if bounds.max_v_len > cfg.max_program_len:
        raise ValueError("search bounds exceed the governing config")
    candidates = search_programs(
        search_cfg, y,
        viable=lambda out: _measure_prefix_state(out, a) != "dead",
        accept=lambda out: _measure_prefix_state(out, a) == "complete",
        mode="all",
    )
    best: Optional[tuple[int, int, str]] = None
    best_payload = None
    for rec in candidates:
        w = decode_measure(rec.output, PROBABILITY)
        try:
            d = deficiency(a, w, pair_aux(rec.program, y), cfg)
        except UnreachableSupport:
            continue
        value = len(rec.program) + _int_log_score(d.value, scoring)
        key = (value, len(rec.program), rec.program)
        if best is None or key < best:
            best = key
            best_payload = (rec, w, d)
    if best_payload is None:
        raise StochasticityNotFound(
            f"no measure covering {a!r} is reachable within {bounds}"
        )
    rec, w, d = best_payload
    return StochasticityResult(best[0], rec.program, w, d, bounds)


# ---------------------------------------------------------------------------
# hitting vectors by the method of conditional expectations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HittingVector:
    elements: tuple[str, ...]
    params: tuple[int, int, int]  # (c, d, i)


class HittingInfeasible(RuntimeError):
    pass


def hitting_vector(
    q: ElementaryMeasure,
    m: ElementaryMeasure,
    i: int,
    c: int,
    d: int,
    decode: Callable[[str], frozenset] = None,
) -> HittingVector:
    """A vector z of exactly c*d*2^(i+1) support elements of m such that
    sum_F Q(<F>) t_z(F) <= 1, where t_z(F) = 2^(c*d) if F and z are disjoint
    and 0 otherwise.

    Every encoded set in the support of Q must be i-heavy: m(F) >= 2^-i.
    The greedy choice by conditional expectations keeps the exact potential
    sum_F Q(<F>) (1 - m(F))^r 2^(c*d) nonincreasing, and the 2^(c*d) scoring
    (in place of e^(c*d)) keeps the starting potential below 1 because
    (1 - 2^-i)^(c*d*2^(i+1)) <= e^(-2cd) <= 2^(-2cd).
    """
    if decode is None:
        from .codec import decode_string_set

        decode = lambda bits: frozenset(decode_string_set(bits))
    sets: list[tuple[Fraction, frozenset]] = []
    for enc in q.support:
        members = decode(enc)
        mass = m.mass_of(members)
        if mass < Fraction(1, 1 << i):
            raise ValueError(f"support set {sorted(members)} is not {i}-heavy")
        sets.append((q(enc), members))

    size = c * d * (1 << (i + 1))
    scale = Fraction(1 << (c * d))
    # potential with r draws left: sum of q * (1 - m(F))^r * 2^cd over live sets
    chosen: list[str] = []
    alive = [(qw, members, 1 - m.mass_of(members)) for qw, members in sets]
    for r in range(size, 0, -1):
        contrib = [qw * miss ** (r - 1) for qw, _members, miss in alive]
        total = sum(contrib, Fraction(0))
        best_elem, best_pot = None, None
        for w in m.support:
            pot = total
            for idx, (_qw, members, _miss) in enumerate(alive):
                if w in members:
                    pot -= contrib[idx]
            if best_pot is None or pot < best_pot:
                best_pot = pot
                best_elem = w
        chosen.append(best_elem)
        alive = [entry for entry in alive if best_elem not in entry[1]]
    score = sum((qw for qw, _m, _f in alive), Fraction(0)) * scale
    if score > 1:
        raise HittingInfeasible(f"greedy expectation bound failed: {score} > 1")
    return HittingVector(tuple(chosen), (c, d, i))


def hitting_score(z: HittingVector, q: ElementaryMeasure, m: ElementaryMeasure,
                  decode=None) -> Fraction:
    """sum_F Q(<F>) t_z(F), recomputed independently of the greedy run."""
    if decode is None:
        from .codec import decode_string_set

        decode = lambda bits: frozenset(decode_string_set(bits))
    c, d, _i = z.params
    hit = set(z.elements)
    total = Fraction(0)
    for enc in q.support:
        if not (decode(enc) & hit):
            total += q(enc) * (1 << (c * d))
    return total
