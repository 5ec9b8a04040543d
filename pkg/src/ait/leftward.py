"""The left-total transform: interval assignment over convergence-ordered
halting programs, totality testing, the border prefix, bb, m_b, the
shortest-total-string search, and the halting-probability pair.

The transform orders the machine's fuel-bounded halting programs by
(convergence time, program) and assigns them consecutive open intervals of
width 2^-len(p) starting at 0.  The transformed machine outputs U(p) on the
shortest input whose interval sits inside p's interval.  Interval endpoints
are multiples of 2^-L (every program is at most L bits), so each tile splits
exactly into maximal dyadic pieces — the minimal transformed programs — and
all mass bookkeeping below happens in integer grid units of 2^-L.

Desk-scale totality is relative to the bounds: a string is total when every
leaf of the depth-L tree under it has a prefix on which the machine halts
within fuel.  For the transformed machine the tiles cover [0, omega)
contiguously on the 2^-L grid, so a nonempty string is total exactly when
its interval's right endpoint is at most omega; the brute-force tree walk is
kept alongside as an independent oracle.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Optional

from .codec import OpenInterval, interval_of, left_of
from .dyadic import Dyadic
from .machine import (
    ExecOutcome,
    MachineConfig,
    ProgramRecord,
    Status,
    get_enumeration,
    kraft_sum,
)


class TotalSearchNotFound(RuntimeError):
    """No total string within bounds satisfies the predicate."""


class UniquenessViolation(AssertionError):
    """A second total string of the same length satisfied the predicate."""


@dataclass(frozen=True)
class BorderPrefix:
    bits: str
    config: MachineConfig


@dataclass(frozen=True)
class Piece:
    """A minimal transformed program: one maximal dyadic block of a tile."""

    lo: int          # grid units of 2^-L
    hi: int
    program: str
    output: str
    steps: int


@dataclass
class IntervalTable:
    """Consecutive open intervals over the enumeration order."""

    config: MachineConfig
    aux: str
    entries: list[tuple[ProgramRecord, OpenInterval]]
    omega: Dyadic                      # total assigned width = Kraft sum
    pieces: list[Piece] = field(repr=False, default_factory=list)
    _grid: int = 0
    _tile_lo: list[int] = field(repr=False, default_factory=list)
    _piece_lo: list[int] = field(repr=False, default_factory=list)
    _piece_hi: list[int] = field(repr=False, default_factory=list)
    _prefix_maxlen: list[int] = field(repr=False, default_factory=list)
    _prefix_mass: list[int] = field(repr=False, default_factory=list)
    _by_output: dict = field(repr=False, default_factory=dict)
    _rmq: list = field(repr=False, default_factory=list)

    @property
    def omega_grid(self) -> int:
        return self.omega.num << (self.config.max_program_len - self.omega.exp)

    def serialize(self) -> str:
        lines = [f"{rec.program}\t{iv.lo}\t{iv.hi}" for rec, iv in self.entries]
        return "\n".join(lines) + ("\n" if lines else "")


def _decompose(lo: int, hi: int, grid_bits: int) -> list[tuple[int, int]]:
    """Maximal dyadic blocks tiling [lo, hi) in 2^-grid_bits units."""
    blocks = []
    a = lo
    while a < hi:
        size = a & -a if a else 1 << grid_bits
        while size > hi - a:
            size >>= 1
        blocks.append((a, a + size))
        a += size
    return blocks


def build_interval_table(cfg: MachineConfig, aux: str = "") -> IntervalTable:
    records = get_enumeration(cfg, aux)
    L = cfg.max_program_len
    total = kraft_sum(records)
    if total > Dyadic.one():
        raise AssertionError("Kraft sum exceeded 1; the machine domain is broken")

    entries = []
    pieces = []
    pos = 0  # grid units
    for rec in records:
        width = 1 << (L - len(rec.program))
        iv = OpenInterval(Dyadic(pos, L), Dyadic(pos + width, L))
        entries.append((rec, iv))
        for blo, bhi in _decompose(pos, pos + width, L):
            size = bhi - blo
            plen = L - (size.bit_length() - 1)
            prog = format(blo >> (size.bit_length() - 1), f"0{plen}b") if plen else ""
            pieces.append(Piece(blo, bhi, prog, rec.output, rec.steps))
        pos += width

    table = IntervalTable(cfg, aux, entries, total, pieces)
    table._grid = L
    table._tile_lo = []
    pos = 0
    for rec in records:
        table._tile_lo.append(pos)
        pos += 1 << (L - len(rec.program))

    table._piece_lo = [p.lo for p in pieces]
    table._piece_hi = [p.hi for p in pieces]
    running_max, running_mass = 0, 0
    pmax, pmass = [0], [0]
    for p in pieces:
        running_max = max(running_max, len(p.output))
        running_mass += p.hi - p.lo
        pmax.append(running_max)
        pmass.append(running_mass)
    table._prefix_maxlen = pmax
    table._prefix_mass = pmass

    by_output: dict[str, tuple[list[int], list[int], list[int]]] = {}
    for p in pieces:
        slot = by_output.setdefault(p.output, ([], [], [0]))
        slot[0].append(p.lo)
        slot[1].append(p.hi)
        slot[2].append(slot[2][-1] + (p.hi - p.lo))
    table._by_output = by_output

    # sparse table for range-max of output lengths over pieces
    lens = [len(p.output) for p in pieces]
    rmq = [lens]
    span = 1
    while span * 2 <= len(lens):
        prev = rmq[-1]
        rmq.append([max(prev[i], prev[i + span]) for i in range(len(lens) - 2 * span + 1)])
        span *= 2
    table._rmq = rmq
    return table


_TABLE_CACHE: dict[tuple[int, int, str], IntervalTable] = {}


def get_interval_table(cfg: MachineConfig, aux: str = "") -> IntervalTable:
    key = (cfg.max_program_len, cfg.fuel, aux)
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = build_interval_table(cfg, aux)
    return _TABLE_CACHE[key]


def _grid_interval(x: str, grid_bits: int) -> tuple[int, int]:
    """x's open interval in 2^-grid_bits units (len(x) may exceed grid_bits)."""
    if len(x) <= grid_bits:
        width = 1 << (grid_bits - len(x))
        lo = int(x, 2) * width if x else 0
        return lo, lo + (width if x else 1 << grid_bits)
    raise ValueError(f"string longer than the grid: {x!r}")


def _range_max(table: IntervalTable, i: int, j: int) -> int:
    """Max output length over pieces[i:j]; 0 when empty."""
    if i >= j:
        return 0
    k = (j - i).bit_length() - 1
    row = table._rmq[k]
    return max(row[i], row[j - (1 << k)])


# ---------------------------------------------------------------------------
# the transformed machine
# ---------------------------------------------------------------------------

def run_left_total(p_prime: str, table: IntervalTable) -> ExecOutcome:
    """Transformed execution: halt once the consumed prefix's interval sits
    inside a tile (the parent prefix's interval does not, so the consumed
    prefixes form a prefix-free domain); reading past every tile diverges.
    """
    L = table.config.max_program_len
    los = table._tile_lo
    for k in range(1, min(len(p_prime), L) + 1):
        r = p_prime[:k]
        lo, hi = _grid_interval(r, L)
        idx = bisect_right(los, lo) - 1
        if idx < 0:
            continue
        rec, iv = table.entries[idx]
        t_lo = los[idx]
        t_hi = t_lo + (1 << (L - len(rec.program)))
        if t_lo <= lo and hi <= t_hi:
            return ExecOutcome(Status.HALTED, rec.output, bits_read=k, steps=rec.steps)
    return ExecOutcome(Status.NEEDS_MORE_INPUT)


def left_total_domain(table: IntervalTable) -> list[Piece]:
    """The minimal transformed programs, ordered by interval position."""
    return table.pieces


# ---------------------------------------------------------------------------
# totality
# ---------------------------------------------------------------------------

class UTotality:
    """Desk-scale totality for the base machine, from its enumeration."""

    def __init__(self, cfg: MachineConfig, aux: str = ""):
        self.cfg = cfg
        self.programs = {r.program for r in get_enumeration(cfg, aux)}
        self._memo: dict[str, bool] = {}

    def covered(self, x: str) -> bool:
        return any(x[:i] in self.programs for i in range(len(x) + 1))

    def is_total(self, x: str) -> bool:
        if len(x) > self.cfg.max_program_len:
            raise ValueError("string exceeds the length bound")
        return self._total(x, self.covered(x))

    def _total(self, x: str, covered: bool) -> bool:
        if covered:
            return True
        if x in self._memo:
            return self._memo[x]
        if len(x) == self.cfg.max_program_len:
            result = False
        else:
            result = all(
                self._total(x + b, (x + b) in self.programs) for b in "01"
            )
        self._memo[x] = result
        return result


def is_total_uprime(x: str, table: IntervalTable) -> bool:
    """Tile coverage is contiguous from 0, so totality is one comparison."""
    if x == "":
        return table.omega == Dyadic.one()
    if len(x) > table.config.max_program_len:
        # finer than the grid: the interval sits inside one grid cell
        head = x[: table.config.max_program_len]
        return is_total_uprime(head, table)
    lo, hi = _grid_interval(x, table.config.max_program_len)
    return hi <= table.omega_grid


def is_total(x: str, cfg: MachineConfig, machine: str = "U", aux: str = "") -> bool:
    """Fuel-bounded totality of x for the base ("U") or transformed ("U'") machine."""
    if len(x) > cfg.max_program_len:
        raise ValueError("string exceeds the length bound")
    if machine == "U":
        return UTotality(cfg, aux).is_total(x)
    if machine == "U'":
        return is_total_uprime(x, get_interval_table(cfg, aux))
    raise ValueError(f"unknown machine {machine!r}")


def is_total_uprime_by_walk(x: str, table: IntervalTable, depth: Optional[int] = None) -> bool:
    """Independent oracle: walk the depth-(L+1) tree under x checking that
    every leaf path hits a transformed halting prefix."""
    depth = depth if depth is not None else table.config.max_program_len + 1
    if len(x) > depth:
        raise ValueError("string deeper than the walk")

    def down(y: str) -> bool:
        if run_left_total(y, table).halted:
            return True
        if len(y) == depth:
            return False
        return down(y + "0") and down(y + "1")

    return down(x)


# ---------------------------------------------------------------------------
# border prefix and the halting-probability pair
# ---------------------------------------------------------------------------

def border_prefix(cfg: MachineConfig, aux: str = "") -> BorderPrefix:
    """Deepest prefix whose subtree still holds both total and non-total
    expansions of the transformed machine: descend right while the right
    child has halting mass and is not total, else descend left while the
    left child is mixed."""
    table = get_interval_table(cfg, aux)
    L = cfg.max_program_len
    omega = table.omega_grid
    x = ""
    while len(x) < L:
        lo1, hi1 = _grid_interval(x + "1", L)
        if lo1 < omega < hi1:
            x += "1"
            continue
        lo0, hi0 = _grid_interval(x + "0", L)
        if lo0 < omega < hi0:
            x += "0"
            continue
        break
    return BorderPrefix(x, cfg)


def omega_pair(b: BorderPrefix | str, cfg: MachineConfig, aux: str = "") -> tuple[Dyadic, Dyadic]:
    """(omega_t, omega_hat): total fuel-bounded halting mass, and the mass of
    transformed programs strictly left of b.  For a border prefix the gap is
    at most 2^-len(b), exactly."""
    bits = b.bits if isinstance(b, BorderPrefix) else b
    table = get_interval_table(cfg, aux)
    L = cfg.max_program_len
    if bits == "":
        return table.omega, Dyadic.zero()
    lo_b, _ = _grid_interval(bits, L)
    count = bisect_right(table._piece_hi, lo_b)
    return table.omega, Dyadic(table._prefix_mass[count], L)


# ---------------------------------------------------------------------------
# bb and m_b (programs left of b, or extending b)
# ---------------------------------------------------------------------------

def _split_ranges(table: IntervalTable, b: str) -> tuple[int, int, int]:
    """Piece indexes: count strictly left of b, then [i, j) inside b's interval."""
    L = table.config.max_program_len
    lo_b, hi_b = _grid_interval(b, L)
    left_count = bisect_right(table._piece_hi, lo_b)
    i = bisect_left(table._piece_lo, lo_b)
    j = bisect_left(table._piece_lo, hi_b)
    if i < j and table._piece_hi[i] > hi_b:
        i += 1  # that piece is a proper prefix of b: neither left-of nor extending
    return left_count, i, j


def bb(b: str, cfg: MachineConfig, aux: str = "") -> int:
    """Length of the longest output among transformed programs left of b or
    extending b; 0 when b is not total."""
    table = get_interval_table(cfg, aux)
    if not is_total_uprime(b, table):
        return 0
    if b == "":
        return table._prefix_maxlen[-1]
    left_count, i, j = _split_ranges(table, b)
    return max(table._prefix_maxlen[left_count], _range_max(table, i, j))


def m_b(b: str, x: str, y: str, cfg: MachineConfig) -> Dyadic:
    """Algorithmic weight of x from transformed programs left of b or
    extending b, conditional to aux y; 0 for non-total b."""
    table = get_interval_table(cfg, y)
    if not is_total_uprime(b, table):
        return Dyadic.zero()
    return mass_filtered(b, x, table)


def mass_filtered(b: str, x: str, table: IntervalTable) -> Dyadic:
    """The left-of-or-extending program mass for output x, without the
    totality gate (the gate belongs to m_b; the raw filter is exercised
    separately, e.g. with b = "" it excludes nothing and equals m_t)."""
    slot = table._by_output.get(x)
    if slot is None:
        return Dyadic.zero()
    los, his, mass = slot
    L = table.config.max_program_len
    if b == "":
        return Dyadic(mass[-1], L)
    lo_b, hi_b = _grid_interval(b, L)
    total = mass[bisect_right(his, lo_b)]
    i = bisect_left(los, lo_b)
    j = bisect_left(los, hi_b)
    if i < j and his[i] > hi_b:
        i += 1
    total += mass[j] - mass[i]
    return Dyadic(total, L)


def m_b_set(b: str, members, y: str, cfg: MachineConfig) -> Dyadic:
    total = Dyadic.zero()
    for x in set(members):
        total = total + m_b(b, x, y, cfg)
    return total


# ---------------------------------------------------------------------------
# shortest total string satisfying a predicate
# ---------------------------------------------------------------------------

def total_strings_of_length(n: int, table: IntervalTable) -> list[str]:
    """All transformed-total strings of length n, in left-to-right order."""
    if n == 0:
        return [""] if table.omega == Dyadic.one() else []
    L = table.config.max_program_len
    if n > L:
        raise ValueError("length exceeds the bound")
    count = table.omega_grid >> (L - n)
    return [format(v, f"0{n}b") for v in range(count)]


def shortest_total_satisfying(
    pred: Callable[[str], bool],
    cfg: MachineConfig,
    aux: str = "",
    assert_unique: bool = True,
) -> str:
    """The shortest transformed-total string satisfying ``pred``; asserts the
    satisfier is unique at its length (scanning the whole level).

    For the parent-dominated predicates this search exists for (weight and
    longest-output thresholds), the result's parent is never total: a total
    parent would satisfy the predicate one level earlier.  That standing
    assumption is asserted on every return.
    """
    table = get_interval_table(cfg, aux)
    for n in range(cfg.max_program_len + 1):
        hits = [b for b in total_strings_of_length(n, table) if pred(b)]
        if hits:
            if assert_unique and len(hits) > 1:
                raise UniquenessViolation(
                    f"{len(hits)} total strings of length {n} satisfy the predicate"
                )
            found = hits[0]
            if found and is_total_uprime(found[:-1], table):
                raise AssertionError(
                    "the result's parent is total: the predicate is not "
                    "parent-dominated"
                )
            return found
    raise TotalSearchNotFound("no total string within bounds satisfies the predicate")


def left_of_pairs_consistent(x: str, y: str) -> bool:
    """x left-of y agrees with interval order for prefix-incomparable x, y."""
    if x.startswith(y) or y.startswith(x):
        return True
    ix, iy = interval_of(x), interval_of(y)
    return left_of(x, y) == ix.entirely_left_of(iy)
