"""Continuous semimeasures as staged approximation tables, the compiler
from a table to a total string-monotonic transducer, preimage counting,
the two-sided threshold, and prefix-set complexity relative to a table.

A table assigns each (string, stage) a dyadic value, nondecreasing in the
stage, superadditive over children within a stage, and 1 at most at the
root.  The compiler maintains, per stage k and string x, disjoint sets
S[x] of current-length strings plus a gift ledger T[x]; the stage invariant
is that the code mass of S[x] union T[x] matches the table value through
its ceiling log.  Gifting always brings a child to the exact bracket
minimum 2^-ceil(-log theta), choosing lexicographically smallest strings,
so compiled transducers are byte-stable.

The bracket-minimum gift can be infeasible for some valid tables (a parent
holding its own bracket minimum cannot always fund both children's
minima); such tables raise InsufficientMass.  Tables whose values are all
powers of two are always feasible: every set mass then equals its table
value exactly, and superadditivity is precisely the funding condition.
The fixture generators below only produce such tables.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .codec import canon_key, canonical_sorted
from .dyadic import Dyadic, ceil_log2, ceil_neg_log2, dyadic_sum


class InsufficientMass(RuntimeError):
    """The parent's set cannot fund a child's bracket minimum."""


class DepthExceeded(ValueError):
    """The input outruns the built stages."""


@dataclass(frozen=True)
class ThetaTable:
    """Staged dyadic approximation of a continuous semimeasure."""

    entries: dict
    max_stage: int

    def theta(self, x: str, k: int) -> Dyadic:
        return self.entries.get((x, k), Dyadic.zero())

    def support(self, k: int) -> list[str]:
        return canonical_sorted(x for (x, j), v in self.entries.items()
                                if j == k and not v.is_zero)

    def serialize(self) -> str:
        rows = sorted(self.entries.items(), key=lambda kv: (kv[0][1], canon_key(kv[0][0])))
        return "".join(f"{x}\t{k}\t{v}\n" for (x, k), v in rows if not v.is_zero)

    @classmethod
    def parse(cls, text: str) -> "ThetaTable":
        entries = {}
        max_stage = 0
        for line in text.splitlines():
            if not line.strip():
                continue
            x, k, val = line.split("\t")
            entries[(x, int(k))] = Dyadic.parse(val)
            max_stage = max(max_stage, int(k))
        return cls(entries, max_stage)


def theta_violations(t: ThetaTable) -> list[str]:
    """First-failure descriptions for the three table invariants."""
    problems = []
    for k in range(t.max_stage + 1):
        for x in t.support(k):
            v = t.theta(x, k)
            if x == "" and v > Dyadic.one():
                problems.append(f"theta(eps,{k}) = {v} exceeds 1")
            if k > 0 and v < t.theta(x, k - 1):
                problems.append(f"theta({x!r},{k}) decreased across stages")
            if v < t.theta(x + "0", k) + t.theta(x + "1", k):
                problems.append(f"theta({x!r},{k}) below its children's sum")
            if x and t.theta(x[:-1], k).is_zero:
                problems.append(f"theta({x[:-1]!r},{k}) is 0 under a positive child")
    return problems


def validate_theta(t: ThetaTable) -> bool:
    return not theta_violations(t)


@dataclass(frozen=True)
class Stage:
    k: int
    n: int                      # all members of S sets have this length
    s_sets: dict                # x -> tuple of sorted strings, disjoint across x
    t_sets: dict                # x -> tuple of sorted strings (mixed lengths)

    def owner_index(self) -> dict:
        return {y: x for x, ys in self.s_sets.items() for y in ys}


@dataclass(frozen=True)
class MonotoneTransducer:
    stages: tuple
    origin: ThetaTable

    @property
    def depth(self) -> int:
        return self.stages[-1].n

    def serialize(self) -> str:
        payload = [
            {
                "k": st.k,
                "N": st.n,
                "S": {x: list(ys) for x, ys in sorted(st.s_sets.items()) if ys},
                "T": {x: list(ys) for x, ys in sorted(st.t_sets.items()) if ys},
            }
            for st in self.stages
        ]
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def mass_of(strings: Iterable[str]) -> Dyadic:
    return dyadic_sum(Dyadic(1, len(y)) for y in strings)


def xi(stage: Stage, x: str) -> Optional[int]:
    """ceil(-log mass(S[x] union T[x])) at a completed stage; None on empty."""
    members = set(stage.s_sets.get(x, ())) | set(stage.t_sets.get(x, ()))
    if not members:
        return None
    return ceil_neg_log2(mass_of(members))


def _expand(strings: Iterable[str], n: int) -> list[str]:
    """All length-n extensions of each string (lengths must not exceed n)."""
    out = []
    for s in strings:
        pad = n - len(s)
        if pad < 0:
            raise AssertionError("expansion below current length")
        out.extend(s + format(v, f"0{pad}b") if pad else s for v in range(1 << pad))
    return out


N0 = 1  # the stage-0 constant: S[eps] starts as all strings of this length


def build_nu(t: ThetaTable) -> MonotoneTransducer:
    """Run the staged construction, parent before child, gifting children to
    their exact bracket minima; raises InsufficientMass when a valid table
    demands more than the parent's set holds."""
    problems = theta_violations(t)
    if problems:
        raise ValueError(f"invalid table: {problems[0]}")

    s_now: dict[str, list[str]] = {"": _expand([""], N0)}
    t_now: dict[str, list[str]] = {}
    stages = [Stage(0, N0, {"": tuple(s_now[""])}, {})]
    n_prev = N0

    for k in range(1, t.max_stage + 1):
        support = t.support(k)
        n_k = n_prev + 1
        for x in support:
            n_k = max(n_k, ceil_neg_log2(t.theta(x, k)) + 2)

        s_new: dict[str, list[str]] = {}
        t_new: dict[str, list[str]] = {x: list(ys) for x, ys in t_now.items()}
        pending: dict[str, list[str]] = {}
        mass_cache: dict[str, Dyadic] = {}

        for x in support:
            base = _expand(s_now.get(x, ()), n_k)
            base.extend(pending.pop(x, ()))
            base.sort()
            s_new[x] = base
            mass_cache[x] = mass_of(base) + mass_of(t_new.get(x, ()))

            for b in "01":
                child = x + b
                value = t.theta(child, k)
                if value.is_zero:
                    continue
                target = ceil_neg_log2(value)
                have = mass_of(s_now.get(child, ())) + mass_of(t_now.get(child, ())) \
                    + mass_of(pending.get(child, ()))
                goal = Dyadic(1, target)
                if have >= goal:
                    continue
                need = goal - have
                count = need.num << (n_k - need.exp)
                donors = s_new[x]
                if count > len(donors):
                    raise InsufficientMass(
                        f"stage {k}: {x!r} holds {len(donors)} strings but "
                        f"{child!r} needs {count} more"
                    )
                gift = donors[:count]
                s_new[x] = donors[count:]
                t_new.setdefault(x, []).extend(gift)
                pending.setdefault(child, []).extend(gift)

        if pending:
            raise AssertionError("gifts addressed outside the support tree")
        s_now = s_new
        t_now = {x: sorted(ys) for x, ys in t_new.items()}
        stages.append(Stage(
            k, n_k,
            {x: tuple(ys) for x, ys in s_now.items()},
            {x: tuple(ys) for x, ys in t_now.items()},
        ))
        n_prev = n_k

    return MonotoneTransducer(tuple(stages), t)


@dataclass
class NuFunction:
    """The compiled total string-monotonic function, with lookup indexes."""

    transducer: MonotoneTransducer
    _owners: list = field(default_factory=list, repr=False)
    _sorted_sets: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        for st in self.transducer.stages:
            self._owners.append(st.owner_index())
            self._sorted_sets.append({x: list(ys) for x, ys in st.s_sets.items()})

    @property
    def depth(self) -> int:
        return self.transducer.depth

    def apply(self, y: str) -> str:
        return nu_apply(self, y)


def _has_extension(sorted_strings: list[str], y: str) -> bool:
    """Any member extending y?  Fixed-length members with prefix y form a
    contiguous lexicographic range."""
    i = bisect_left(sorted_strings, y)
    return i < len(sorted_strings) and sorted_strings[i].startswith(y)


def nu_apply(nu: NuFunction, y: str) -> str:
    """First stage whose sets place y: directly a member of S[x]; or strictly
    between a member of S[x] at k and one at k+1; or between a member of
    S[x] at k and one of S[x+b] at k+1.  Inputs shorter than the stage-0
    length map to the empty string."""
    stages = nu.transducer.stages
    if len(y) < stages[0].n:
        return ""
    if len(y) > stages[-1].n:
        raise DepthExceeded(f"input length {len(y)} exceeds built depth {stages[-1].n}")
    for idx, st in enumerate(stages):
        if len(y) == st.n:
            return nu._owners[idx][y]
        if st.n < len(y) and idx + 1 < len(stages) and len(y) < stages[idx + 1].n:
            x = nu._owners[idx][y[:st.n]]
            nxt = nu._sorted_sets[idx + 1]
            if _has_extension(nxt.get(x, []), y):
                return x
            for b in "01":
                if _has_extension(nxt.get(x + b, []), y):
                    return x
            raise AssertionError("every extension must stay within the child sets")
    raise DepthExceeded(f"input length {len(y)} falls outside built stages")


def preimage_count(nu, members: Iterable[str], n: int) -> int:
    """|{y of length n : nu(y) extends some member}| by exhaustive evaluation.

    Accepts any total evaluator with ``apply`` and ``depth`` (the compiled
    NuFunction, or a hand-built stand-in in tests)."""
    targets = tuple(set(members))
    if n > nu.depth:
        raise DepthExceeded(f"length {n} exceeds built depth {nu.depth}")
    count = 0
    for v in range(1 << n):
        y = format(v, f"0{n}b") if n else ""
        image = nu.apply(y)
        if any(image.startswith(x) for x in targets):
            count += 1
    return count


class ThresholdNotFound(RuntimeError):
    pass


def threshold_N(nu, members: Iterable[str], i: Optional[int] = None
                ) -> tuple[int, int]:
    """The least N' with 2^(-i+2) > count(N') 2^-N' > 2^-i, verifying the
    one-sided bound below N' and the two-sided bound up to the built depth.
    Returns (N', i); i defaults to 1 + ceil(-log of the deepest preimage mass).
    """
    targets = tuple(set(members))
    depth = nu.depth
    counts = {n: preimage_count(nu, targets, n) for n in range(1, depth + 1)}
    if i is None:
        deepest = counts[depth]
        if deepest == 0:
            raise ThresholdNotFound("the preimage has measure zero at depth")
        i = 1 + ceil_neg_log2(Dyadic(deepest, depth))
    lo = Dyadic(1, i)
    hi = Dyadic(1, i).shifted(2)  # 2^(-i+2)
    n_prime = None
    for n in range(1, depth + 1):
        massn = Dyadic(counts[n], n)
        if lo < massn and massn < hi:
            n_prime = n
            break
    if n_prime is None:
        raise ThresholdNotFound("no length satisfies the two-sided bound in depth")
    for n in range(1, n_prime):
        if Dyadic(counts[n], n) > lo:
            raise AssertionError("one-sided bound fails below the threshold")
    for n in range(n_prime, depth + 1):
        massn = Dyadic(counts[n], n)
        if not (lo < massn and massn < hi):
            raise AssertionError("two-sided bound fails above the threshold")
    return n_prime, i


class ZeroMeasureSet(ValueError):
    pass


def km_sigma(members: Iterable[str], t: ThetaTable, stage: Optional[int] = None) -> int:
    """1 - ceil(log2 of the table mass of the set) at the given stage."""
    k = t.max_stage if stage is None else stage
    total = dyadic_sum(t.theta(x, k) for x in set(members))
    if total.is_zero:
        raise ZeroMeasureSet("the set has zero table mass at this stage")
    return 1 - ceil_log2(total)


# ---------------------------------------------------------------------------
# fixture tables (all power-of-two valued, hence always feasible)
# ---------------------------------------------------------------------------

def uniform_table(stages: int) -> ThetaTable:
    """theta(x, k) = 2^-len(x) for len(x) <= k: the uniform-measure ladder."""
    entries = {}
    for k in range(stages + 1):
        for length in range(k + 1):
            for v in range(1 << length):
                x = format(v, f"0{length}b") if length else ""
                entries[(x, k)] = Dyadic(1, length)
    return ThetaTable(entries, stages)


def point_mass_table(stages: int) -> ThetaTable:
    """theta(0^j, k) = 1 for j <= k: all mass funnels down the zero path."""
    entries = {}
    for k in range(stages + 1):
        for j in range(k + 1):
            entries[("0" * j, k)] = Dyadic.one()
    return ThetaTable(entries, stages)


def random_pow2_table(seed: int, stages: int, max_exp: int = 6) -> ThetaTable:
    """A deterministic pseudo-random power-of-two table: the final tree is
    drawn once from a fixed linear-congruential stream, then revealed one
    level per stage (which keeps stage monotonicity trivially exact)."""
    state = seed * 2 + 1

    def rng(bound: int) -> int:
        nonlocal state
        state = (state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        return (state >> 33) % bound

    tree: dict[str, Dyadic] = {"": Dyadic.one()}
    frontier = [""]
    for _depth in range(stages):
        nxt = []
        for x in frontier:
            v = tree[x]
            if v.exp >= max_exp:
                continue
            style = rng(4)
            if style == 0:
                continue  # leaf: mass stops subdividing
            if style == 1:
                tree[x + "0"] = v.halved()
                tree[x + "1"] = v.halved()
                nxt.extend((x + "0", x + "1"))
            elif style == 2:
                tree[x + "0"] = v.halved()
                nxt.append(x + "0")
            else:
                tree[x + "0"] = v.halved().halved()
                tree[x + "1"] = v.halved()
                nxt.extend((x + "0", x + "1"))
        frontier = nxt
    entries = {}
    for k in range(stages + 1):
        for x, v in tree.items():
            if len(x) <= k:
                entries[(x, k)] = v
    return ThetaTable(entries, stages)


def measure_matching_gap(t: ThetaTable) -> int:
    """max over supported x of |ceil(-log theta(x)) - ceil(-log preimage mass)|
    at the deepest built length: the two-sided transducer fidelity figure."""
    nu = NuFunction(build_nu(t))
    n = nu.depth
    worst = 0
    for x in t.support(t.max_stage):
        count = preimage_count(nu, [x], n)
        if count == 0:
            raise ZeroMeasureSet(f"{x!r} has an empty preimage at depth {n}")
        lhs = ceil_neg_log2(t.theta(x, t.max_stage))
        rhs = ceil_neg_log2(Dyadic(count, n))
        worst = max(worst, abs(lhs - rhs))
    return worst
