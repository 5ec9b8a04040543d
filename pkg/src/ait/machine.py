"""The reference prefix-free machine: on-demand input, an auxiliary
read-only tape, fuel-bounded deterministic execution, and the enumerators
of its halting programs.

Every measured constant in this package depends on the machine below, so its
definition is frozen bit-exactly here.

Opcode table (a complete prefix code; bits are read on demand, so the
machine's halting inputs form a prefix-free set by construction):

    0      EMIT_HALT   read a literal block, append it to the output, halt
    100    EMIT        read a literal block, append it, continue
    101    RAW8_HALT   read the next 8 input bits verbatim, append, halt
    110    POW_HALT    read a number block m, then a literal block y;
                       append y repeated m**m times (0 times when m = 0), halt
    1110   COPY_N      read a number block k; copy k auxiliary data bits
                       (zero fill past the end of the aux string), continue
    11110  COPY_ALL    copy auxiliary data bits up to the sentinel, continue
    11111  HALT        halt with the output produced so far

Literal block: ``1^n 0 y`` with ``len(y) = n``.  Number block: a literal
block whose payload is read as a plain binary value (the empty payload is 0;
leading zeros are allowed and read as the same value, so the machine is total
on every bit stream).

Auxiliary tape: a finite aux string ``a`` is presented as one pair-cell per
data bit, ``(1, a[i])``, followed by an endless fill of sentinel cells
``(0, 0)`` — the readable encoding of an end marker followed by zero fill.
COPY_N appends the data bit of each cell read (so cells past the end yield
0 bits); COPY_ALL stops at, and consumes, the first sentinel cell.

Step accounting ("fuel"): one step per input bit consumed, per aux cell
read, per output bit appended, and per completed opcode dispatch.  The fuel
check precedes every step, so the outcome is a pure function of the program
prefix actually read, the aux string, and the fuel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional

from .dyadic import Dyadic, dyadic_sum

# ---------------------------------------------------------------------------
# configuration and outcomes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MachineConfig:
    """Desk-scale resource bounds: program length cap and step budget."""

    max_program_len: int
    fuel: int

    def __post_init__(self):
        if self.max_program_len < 1 or self.fuel < 1:
            raise ValueError("bounds must be at least 1")


class Status(Enum):
    HALTED = "halted"
    OUT_OF_FUEL = "out-of-fuel"
    NEEDS_MORE_INPUT = "needs-more-input"
    STUCK = "stuck"  # unreachable under the frozen table (it is complete)


@dataclass(frozen=True)
class ExecOutcome:
    status: Status
    output: Optional[str] = None
    bits_read: Optional[int] = None
    steps: Optional[int] = None

    @property
    def halted(self) -> bool:
        return self.status is Status.HALTED


@dataclass(frozen=True)
class ProgramRecord:
    """A minimal halting program with its output and convergence time."""

    program: str
    output: str
    steps: int
    aux: str


# fixture located by exhaustive enumeration at L=16, t=4096: the shortest
# program emitting the empty string is EMIT_HALT with an empty literal.
P_EPSILON = "00"

_OPCODES = {
    "0": "EMIT_HALT",
    "100": "EMIT",
    "101": "RAW8_HALT",
    "110": "POW_HALT",
    "1110": "COPY_N",
    "11110": "COPY_ALL",
    "11111": "HALT",
}
_OPCODE_PREFIXES = {code[:i] for code in _OPCODES for i in range(len(code))}

# phases of the operand reader
_PH_OPCODE = 0
_PH_UNARY = 1
_PH_PAYLOAD = 2
_PH_RAW = 3

# terminal / non-input internal states
_RUNNING = 0
_NEED_INPUT = 1
_HALTED = 2
_OUT_OF_FUEL = 3
_DEAD = 4  # targeted searches only: output can no longer match

_HUGE = object()  # repeat count certainly exceeding any desk-scale fuel


def _pow_reps(m: int):
    """m**m with a cutoff: anything at least 2**64 behaves as 'never within fuel'."""
    if m == 0:
        return 0
    if m > 15:
        return _HUGE
    return m ** m


class _Cpu:
    """Resumable interpreter state; ``feed`` consumes exactly one input bit."""

    __slots__ = (
        "aux", "fuel", "steps", "bits_read", "state", "phase", "opbuf",
        "op", "block", "unary", "need", "paybuf", "num_val", "pieces",
        "out_len", "aux_pos", "copy_left", "out_cap",
    )

    def __init__(self, aux: str, fuel: int, out_cap: Optional[int] = None):
        self.aux = aux
        self.fuel = fuel
        self.steps = 0
        self.bits_read = 0
        self.state = _RUNNING
        self.phase = _PH_OPCODE
        self.opbuf = ""
        self.op = ""
        self.block = 0
        self.unary = 0
        self.need = 0
        self.paybuf: list[str] = []
        self.num_val = 0
        self.pieces: list[str] = []
        self.out_len = 0
        self.aux_pos = 0
        self.copy_left = 0
        self.out_cap = out_cap
        self._advance()

    def copy(self) -> "_Cpu":
        c = _Cpu.__new__(_Cpu)
        c.aux = self.aux
        c.fuel = self.fuel
        c.steps = self.steps
        c.bits_read = self.bits_read
        c.state = self.state
        c.phase = self.phase
        c.opbuf = self.opbuf
        c.op = self.op
        c.block = self.block
        c.unary = self.unary
        c.need = self.need
        c.paybuf = self.paybuf[:]
        c.num_val = self.num_val
        c.pieces = self.pieces[:]
        c.out_len = self.out_len
        c.aux_pos = self.aux_pos
        c.copy_left = self.copy_left
        c.out_cap = self.out_cap
        return c

    @property
    def output(self) -> str:
        return "".join(self.pieces)

    # -- step helpers ---------------------------------------------------

    def _charge(self) -> bool:
        """Spend one fuel unit; False means the budget just ran out."""
        if self.steps >= self.fuel:
            self.state = _OUT_OF_FUEL
            return False
        self.steps += 1
        return True

    def _emit_run(self, pattern: str, reps) -> bool:
        """Append pattern repeated reps times, one step per bit; False on fuel out."""
        if not pattern:
            return True
        budget = self.fuel - self.steps
        total = None if reps is _HUGE else len(pattern) * reps
        if total is not None and total <= budget:
            self.pieces.append(pattern * reps)
            self.out_len += total
            self.steps += total
            if self.out_cap is not None and self.out_len > self.out_cap:
                self.state = _DEAD
                return False
            return True
        whole, part = divmod(budget, len(pattern))
        self.pieces.append(pattern * whole + pattern[:part])
        self.out_len += budget
        self.steps = self.fuel
        self.state = _OUT_OF_FUEL
        return False

    def _aux_cell(self) -> tuple[int, str]:
        i = self.aux_pos
        self.aux_pos += 1
        if i < len(self.aux):
            return 1, self.aux[i]
        return 0, "0"

    # -- instruction completion ------------------------------------------

    def _begin_operands(self):
        op = self.op
        if op == "HALT":
            self.state = _HALTED
        elif op == "COPY_ALL":
            self._run_copy_all()
        elif op == "RAW8_HALT":
            self.phase = _PH_RAW
            self.need = 8
            self.paybuf = []
        elif op in ("EMIT_HALT", "EMIT"):
            self.phase = _PH_UNARY
            self.unary = 0
            self.block = 0
        elif op in ("POW_HALT", "COPY_N"):
            self.phase = _PH_UNARY
            self.unary = 0
            self.block = 0

    def _block_done(self, payload: str):
        op = self.op
        if op == "EMIT_HALT":
            if self._emit_run(payload, 1):
                self.state = _HALTED
        elif op == "EMIT":
            if self._emit_run(payload, 1):
                self.phase = _PH_OPCODE
                self.opbuf = ""
        elif op == "RAW8_HALT":
            if self._emit_run(payload, 1):
                self.state = _HALTED
        elif op == "POW_HALT":
            if self.block == 0:
                self.num_val = int(payload, 2) if payload else 0
                self.block = 1
                self.phase = _PH_UNARY
                self.unary = 0
            else:
                if self._emit_run(payload, _pow_reps(self.num_val)):
                    self.state = _HALTED
        elif op == "COPY_N":
            self.num_val = int(payload, 2) if payload else 0
            self._run_copy_n()

    def _run_copy_n(self):
        while self.copy_left or self.num_val:
            if self.copy_left == 0:
                self.copy_left = self.num_val
                self.num_val = 0
            if not self._charge():  # read one aux cell
                return
            _, bit = self._aux_cell()
            if not self._charge():  # append its data bit
                return
            self.pieces.append(bit)
            self.out_len += 1
            self.copy_left -= 1
            if self.out_cap is not None and self.out_len > self.out_cap:
                self.state = _DEAD
                return
        self.phase = _PH_OPCODE
        self.opbuf = ""

    def _run_copy_all(self):
        while True:
            if not self._charge():
                return
            flag, bit = self._aux_cell()
            if flag == 0:
                self.phase = _PH_OPCODE
                self.opbuf = ""
                return
            if not self._charge():
                return
            self.pieces.append(bit)
            self.out_len += 1
            if self.out_cap is not None and self.out_len > self.out_cap:
                self.state = _DEAD
                return

    def _advance(self):
        # run everything that does not need an input bit
        if self.state == _RUNNING:
            self.state = _NEED_INPUT

    # -- the input feed ----------------------------------------------------

    def feed(self, bit: str) -> int:
        """Consume one input bit and run ahead; returns the resulting state."""
        if self.state != _NEED_INPUT:
            raise RuntimeError("machine is not waiting for input")
        if not self._charge():
            return self.state
        self.bits_read += 1
        self.state = _RUNNING

        if self.phase == _PH_OPCODE:
            self.opbuf += bit
            if self.opbuf in _OPCODES:
                if self._charge():  # opcode dispatch
                    self.op = _OPCODES[self.opbuf]
                    self._begin_operands()
            elif self.opbuf not in _OPCODE_PREFIXES:
                self.state = _DEAD  # unreachable: the table is complete
                return self.state
        elif self.phase == _PH_UNARY:
            if bit == "1":
                self.unary += 1
            else:
                self.need = self.unary
                self.paybuf = []
                if self.need == 0:
                    self._block_done("")
                else:
                    self.phase = _PH_PAYLOAD
        elif self.phase in (_PH_PAYLOAD, _PH_RAW):
            self.paybuf.append(bit)
            self.need -= 1
            if self.need == 0:
                self._block_done("".join(self.paybuf))

        if self.state == _RUNNING:
            self.state = _NEED_INPUT
        return self.state


# ---------------------------------------------------------------------------
# running single programs
# ---------------------------------------------------------------------------

def run(program: str, aux: str = "", fuel: int = 2048) -> ExecOutcome:
    """Execute ``program`` left to right with on-demand reading.

    If the machine halts after consuming k <= len(program) bits, the outcome
    is Halted with bits_read = k: every extension of the consumed prefix
    yields the same outcome, and no proper prefix of it halts, so the domain
    of minimal programs is prefix-free by construction.
    """
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    cpu = _Cpu(aux, fuel)
    i = 0
    while cpu.state == _NEED_INPUT and i < len(program):
        cpu.feed(program[i])
        i += 1
    if cpu.state == _HALTED:
        return ExecOutcome(Status.HALTED, cpu.output, cpu.bits_read, cpu.steps)
    if cpu.state == _OUT_OF_FUEL:
        return ExecOutcome(Status.OUT_OF_FUEL)
    return ExecOutcome(Status.NEEDS_MORE_INPUT)


# ---------------------------------------------------------------------------
# exhaustive enumeration of the fuel-bounded domain
# ---------------------------------------------------------------------------

def enumerate_halting(cfg: MachineConfig, aux: str = "") -> list[ProgramRecord]:
    """All minimal halting programs with len <= L and steps <= fuel.

    Sorted by (convergence time, lexicographic program) ascending; ties in
    convergence time are broken lexicographically so enumeration order is a
    total deterministic order.
    """
    records: list[ProgramRecord] = []
    root = _Cpu(aux, cfg.fuel)
    stack: list[tuple[str, _Cpu]] = [("", root)]
    while stack:
        prefix, cpu = stack.pop()
        if len(prefix) >= cfg.max_program_len:
            continue
        for bit in ("1", "0"):
            child = cpu.copy() if bit == "1" else cpu
            state = child.feed(bit)
            program = prefix + bit
            if state == _HALTED:
                records.append(ProgramRecord(program, child.output, child.steps, aux))
            elif state == _NEED_INPUT:
                stack.append((program, child))
    records.sort(key=lambda r: (r.steps, r.program))
    return records


_ENUM_CACHE: dict[tuple[int, int, str], list[ProgramRecord]] = {}


def get_enumeration(cfg: MachineConfig, aux: str = "") -> list[ProgramRecord]:
    key = (cfg.max_program_len, cfg.fuel, aux)
    if key not in _ENUM_CACHE:
        _ENUM_CACHE[key] = enumerate_halting(cfg, aux)
    return _ENUM_CACHE[key]


def kraft_sum(records: Iterable[ProgramRecord]) -> Dyadic:
    return dyadic_sum(Dyadic(1, len(r.program)) for r in records)


# ---------------------------------------------------------------------------
# targeted searches (equivalent to filtering the full enumeration, but the
# output-viability prune keeps the walked tree small)
# ---------------------------------------------------------------------------

def _hopeless_for_target(cpu: "_Cpu", target: str, mode: str) -> bool:
    """Target-aware prunes that look inside an operand block in progress.

    Payload bits of the emit-family instructions reach the output verbatim,
    so a mismatch against the target is fatal before the block completes.
    A partially read repeat or copy count already bounds the bits the
    instruction must emit; once that lower bound exceeds what the target has
    room for, no completion can work (the zero-count null completions either
    produce a wrong output or, in "min" mode, are beaten by the two-bit
    empty-literal halt from the same position).
    """
    op, phase = cpu.op, cpu.phase
    remaining = len(target) - cpu.out_len
    if op in ("EMIT", "EMIT_HALT", "RAW8_HALT"):
        if phase == _PH_UNARY:
            return cpu.unary > remaining
        if phase in (_PH_PAYLOAD, _PH_RAW):
            if len(cpu.paybuf) > remaining:
                return True
            return not target.startswith("".join(cpu.paybuf), cpu.out_len)
    if op == "POW_HALT":
        if cpu.block == 1:
            reps = _pow_reps(cpu.num_val)
            if reps == 0:
                # zero repeats: the instruction halts with the output
                # unchanged, so the whole y block is junk unless the target
                # is already complete; even then the two-bit empty-literal
                # halt beats it in a minimality search
                return remaining > 0 or mode == "min"
            if phase == _PH_UNARY:
                return cpu.unary >= 1 and (reps is _HUGE or reps * cpu.unary > remaining)
            if phase == _PH_PAYLOAD:
                if len(cpu.paybuf) > remaining:
                    return True
                return not target.startswith("".join(cpu.paybuf), cpu.out_len)
        if cpu.block == 0 and phase == _PH_PAYLOAD:
            v_min = int("".join(cpu.paybuf), 2) << cpu.need if cpu.paybuf else 0
            if v_min >= 1 and (remaining > 0 or mode == "min"):
                reps = _pow_reps(v_min)
                return reps is _HUGE or reps > remaining
    if op == "COPY_N" and phase == _PH_PAYLOAD:
        v_min = int("".join(cpu.paybuf), 2) << cpu.need if cpu.paybuf else 0
        return v_min > remaining
    return False


def search_programs(
    cfg: MachineConfig,
    aux: str,
    viable: Callable[[str], bool],
    accept: Callable[[str], bool],
    mode: str = "all",
    out_cap: Optional[int] = None,
    exact_target: Optional[str] = None,
    target_len: Optional[int] = None,
) -> list[ProgramRecord]:
    """Walk the program tree keeping only branches whose output stays viable.

    ``viable(out)`` must be monotone: once false it stays false for every
    extension of the output (output only ever grows).  ``accept(out)``
    classifies a halting output.  mode "all" returns every accepted minimal
    program; mode "min" returns at most one record, the (length, lex)-least
    accepted program, pruning branches that cannot beat the best found.

    In "min" mode a dominance prune runs at instruction boundaries: a prefix
    reaching a machine state (output, aux position) already reached by some
    no-longer and no-costlier prefix cannot start a minimal program, because
    the earlier prefix accepts every continuation of the later one.  This
    collapses chains of no-effect instructions, which would otherwise make
    the walk exponential in the length bound.  Aux positions past the tape
    end are one state (every later cell is the sentinel), and once a prefix
    keeps more fuel in reserve than any accepted completion can spend, the
    steps coordinate stops mattering (``target_len`` feeds that reserve
    bound; it is only sound when completions cannot emit past the target,
    which holds for exact-output searches and not for prefix-set ones).
    """
    results: list[ProgramRecord] = []
    best_len: Optional[int] = None
    seen: dict[tuple[str, int], list[tuple[int, int]]] = {}
    if target_len is None and exact_target is not None:
        target_len = len(exact_target)
    ample = None
    if target_len is not None:
        ample = 3 * cfg.max_program_len + 2 * target_len + 8
    root = _Cpu(aux, cfg.fuel, out_cap)
    if not viable(""):
        return results
    # depth-first in lexicographic order: "0" branch explored before "1"
    stack: list[tuple[str, str, _Cpu]] = [("", "1", root), ("", "0", root)]
    while stack:
        prefix, bit, parent = stack.pop()
        if len(prefix) >= cfg.max_program_len:
            continue
        if mode == "min" and best_len is not None and len(prefix) >= best_len:
            continue
        cpu = parent.copy()
        state = cpu.feed(bit)
        if state in (_OUT_OF_FUEL, _DEAD):
            continue
        out = cpu.output
        if not viable(out):
            continue
        if exact_target is not None and state == _NEED_INPUT \
                and _hopeless_for_target(cpu, exact_target, mode):
            continue
        program = prefix + bit
        if state == _HALTED:
            if accept(out):
                rec = ProgramRecord(program, out, cpu.steps, aux)
                if mode == "min":
                    if best_len is None or len(program) < best_len:
                        best_len = len(program)
                        results = [rec]
                else:
                    results.append(rec)
            continue
        if mode == "min" and cpu.phase == _PH_OPCODE and cpu.opbuf == "":
            key = (out, min(cpu.aux_pos, len(aux)))
            steps = cpu.steps
            if ample is not None and cfg.fuel - steps >= ample:
                steps = 0
            pareto = seen.setdefault(key, [])
            if any(l <= len(program) and s <= steps for l, s in pareto):
                continue
            pareto[:] = [(l, s) for l, s in pareto
                         if not (len(program) <= l and steps <= s)]
            pareto.append((len(program), steps))
        stack.append((program, "1", cpu))
        stack.append((program, "0", cpu))
    if mode == "all":
        results.sort(key=lambda r: (r.steps, r.program))
    return results


def programs_for_output(x: str, cfg: MachineConfig, aux: str = "") -> list[ProgramRecord]:
    """Every minimal halting program (within bounds) whose output equals x."""
    return search_programs(
        cfg, aux,
        viable=lambda out: x.startswith(out),
        accept=lambda out: out == x,
        mode="all",
        out_cap=len(x),
        exact_target=x,
    )


def min_program_for_output(x: str, cfg: MachineConfig, aux: str = "") -> Optional[ProgramRecord]:
    """The (length, lex)-least program computing exactly x, or None."""
    found = search_programs(
        cfg, aux,
        viable=lambda out: x.startswith(out),
        accept=lambda out: out == x,
        mode="min",
        out_cap=len(x),
        exact_target=x,
    )
    return found[0] if found else None


def min_program_with_prefix_in(members: Iterable[str], cfg: MachineConfig,
                               aux: str = "") -> Optional[ProgramRecord]:
    """The (length, lex)-least program whose output extends a member."""
    targets = tuple(members)

    def viable(out: str) -> bool:
        return any(x.startswith(out) or out.startswith(x) for x in targets)

    def accept(out: str) -> bool:
        return any(out.startswith(x) for x in targets)

    # no ample-fuel collapse here: a minimal prefix witness may overshoot the
    # members via a repeat jump, so completion costs are not bounded by the
    # member lengths the way exact-output completions are
    found = search_programs(cfg, aux, viable, accept, mode="min")
    return found[0] if found else None


# ---------------------------------------------------------------------------
# enumeration cache files
# ---------------------------------------------------------------------------

class CacheIntegrityError(RuntimeError):
    pass


def cache_digest(records: Iterable[ProgramRecord]) -> str:
    import hashlib

    body = "".join(f"{r.program}\t{r.output}\t{r.steps}\n" for r in records)
    return hashlib.sha256(body.encode("ascii")).hexdigest()


def write_cache(path, cfg: MachineConfig, aux: str, records: list[ProgramRecord]) -> str:
    digest = cache_digest(records)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# max_len={cfg.max_program_len} fuel={cfg.fuel} aux={aux} sha256={digest}\n")
        for r in records:
            fh.write(f"{r.program}\t{r.output}\t{r.steps}\n")
    return digest


def read_cache(path, cfg: MachineConfig, aux: str = "") -> list[ProgramRecord]:
    """Load a cache file, aborting on any header or digest mismatch."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        rows = fh.readlines()
    fields = dict(part.split("=", 1) for part in header.lstrip("# ").split(" "))
    if int(fields["max_len"]) != cfg.max_program_len or int(fields["fuel"]) != cfg.fuel \
            or fields["aux"] != aux:
        raise CacheIntegrityError(f"cache {path} was built for a different config")
    records = []
    for row in rows:
        program, output, steps = row.rstrip("\n").split("\t")
        records.append(ProgramRecord(program, output, int(steps), aux))
    if cache_digest(records) != fields["sha256"]:
        raise CacheIntegrityError(f"cache {path} failed its digest check")
    return records
