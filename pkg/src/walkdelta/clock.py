"""Circuit-to-rewriting compiler.

Encodes a layered {H, Swap, Toffoli} circuit as a string-rewriting system on
a 224-symbol cell alphabet.  Each cell stacks four tracks: a program symbol
(gate code plus control markers), a data symbol (qubit values and formatting
marks), an auxiliary bit, and a sign-simulator bit.  The local update
operator acts on three adjacent cells; its nonzero matrix entries, all equal
to one, define a symmetric window-3 relation whose walk counts encode the
circuit's return amplitude.

The control flow on the program band: an execution marker sweeps right past
the gate symbols, applying each gate to the data cells beneath it; at the
right end it turns around and sends a marking signal left; each round trip
shifts the program one cell left, until the next gate block is aligned with
the data register and a fresh execution marker is created.  The run ends
when the execution marker meets the terminating boundary symbol above the
register.

Every sweep step also applies a Hadamard: a real one on a data cell when a
Hadamard gate fires, otherwise a dummy one on the auxiliary bit of the
window's middle cell.  Negative Hadamard entries are replaced by a bit flip
on the simulator track, keeping all matrix entries in {0, 1}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .circuits import Circuit, CircuitError, Gate, validate
from .rewriting import Alphabet
from . import spectral


class CompileError(Exception):
    """Layout or control-simulation failure."""


# program symbols: plain gate codes, marked gate codes, and control markers
GATE_I, GATE_H, GATE_S, GATE_T, GATE_B = range(5)
MARK_I, MARK_H, MARK_S, MARK_T, MARK_B = range(5, 10)
HOLE, EXEC, TURN, BLANK = range(10, 14)

PLAIN = frozenset(range(5))
MARKED = frozenset(range(5, 10))
N_PROGRAM = 14

# data symbols
D0, D1, SEP, DOT = range(4)
BINARY = frozenset((D0, D1))
N_DATA = 4

ALPHABET_SIZE = N_PROGRAM * N_DATA * 2 * 2  # 224
WINDOW = 3

PROGRAM_NAMES = (
    "I", "H", "S", "T", "B",
    "MI", "MH", "MS", "MT", "MB",
    "HOLE", "EXEC", "TURN", "BLANK",
)
DATA_NAMES = ("D0", "D1", "SEP", "DOT")

GATE_CODE = {"h": GATE_H, "swap": GATE_S, "toffoli": GATE_T}

# aux/sim transport tags: RIGHT swaps the aux and sim bits of cells 0,1,
# LEFT swaps cells -1,0.  The carried bits must land wherever the next
# step's Hadamard acts, so the turn-around rules transport as well: rule 2
# hands the bits leftward to the marking signal and rule 6 hands them
# rightward to the fresh sweep marker, even though the turn symbol itself
# stays in place.
RIGHT, LEFT, STAY = range(3)


def make_cell(p: int, d: int, a: int, s: int) -> int:
    return ((p * N_DATA + d) * 2 + a) * 2 + s


def split_cell(c: int) -> tuple[int, int, int, int]:
    return c >> 4, (c >> 2) & 3, (c >> 1) & 1, c & 1


def cell_token(c: int) -> str:
    p, d, a, s = split_cell(c)
    return f"{PROGRAM_NAMES[p]}.{DATA_NAMES[d]}.{a}.{s}"


@lru_cache(maxsize=1)
def clock_alphabet() -> Alphabet:
    return Alphabet(tuple(cell_token(c) for c in range(ALPHABET_SIZE)))


def parse_cell_token(token: str) -> int:
    try:
        pn, dn, an, sn = token.split(".")
        return make_cell(
            PROGRAM_NAMES.index(pn), DATA_NAMES.index(dn), int(an), int(sn)
        )
    except (ValueError, IndexError):
        raise CompileError(f"bad cell token {token!r}") from None


def transition_match(
    p_left: int, p0: int, p1: int, d0: int, d1: int
) -> tuple[tuple[int, int, int], int] | None:
    """Match the window against the six transition rules.

    The rules read and rewrite program cells 0 and 1 (cell -1 is context).
    Rules 2 and 6 additionally condition on the data symbol under their left
    and right box respectively.  Returns the rewritten program triple and the
    movement tag, or None when no rule applies.
    """
    if p0 in (HOLE, EXEC):
        if p1 in PLAIN:  # rule 1: marker swaps right past a gate symbol
            return (p_left, p1, p0), RIGHT
        if p1 == BLANK:  # rule 2: marker past the program end turns around
            if p0 == HOLE and d0 != SEP:
                return (p_left, TURN, BLANK), LEFT
            if p0 == EXEC and d0 == SEP:
                return (p_left, TURN, BLANK), LEFT
        return None
    if p0 in PLAIN:
        if p1 == TURN:  # rule 3: turn symbol starts the leftward marking
            return (p_left, p0 + 5, BLANK), LEFT
        if p1 in MARKED:  # rule 4: marking propagates left
            return (p_left, p0 + 5, p1 - 5), LEFT
        return None
    if p0 == BLANK:
        if p1 in MARKED:  # rule 5: marking reaches the program start
            return (p_left, TURN, p1 - 5), LEFT
        if p1 == TURN:  # rule 6: new sweep marker created
            if d1 != SEP:
                return (p_left, BLANK, HOLE), RIGHT
            return (p_left, BLANK, EXEC), RIGHT
    return None


# execution classes
X_NONE, X_TOFFOLI, X_SWAP, X_HADAMARD, X_BOUNDARY = range(5)


def execution_class(p0: int, p1: int, dm: int, d0: int, d1: int) -> int:
    """Which gate fires in the window, per the execution conditions.

    The execution marker must sit in program cell 0 with the gate symbol in
    cell 1, and the data cells the gate touches must hold qubit values.
    Everything else falls through to the no-gate class (dummy Hadamard).
    """
    if p0 != EXEC:
        return X_NONE
    if p1 == GATE_T and dm in BINARY and d0 in BINARY and d1 in BINARY:
        return X_TOFFOLI
    if p1 == GATE_S and d0 in BINARY and d1 in BINARY:
        return X_SWAP
    if p1 == GATE_H and d1 in BINARY:
        return X_HADAMARD
    if p1 == GATE_B and d1 in BINARY:
        return X_BOUNDARY
    return X_NONE


def _images(cells: tuple[int, int, int]) -> tuple[tuple[int, int, int], ...]:
    p = []
    d = []
    a = []
    s = []
    for c in cells:
        cp, cd, ca, cs = split_cell(c)
        p.append(cp)
        d.append(cd)
        a.append(ca)
        s.append(cs)

    xc = execution_class(p[1], p[2], d[0], d[1], d[2])
    if xc == X_BOUNDARY:
        return ()

    # execution phase: gate action plus one Hadamard branch; a real Hadamard
    # branches the data bit of cell 1, anything else branches the auxiliary
    # bit of cell 0 (dummy Hadamard); the simulator bit of cell 0 flips
    # exactly on the 1 -> 1 branch, standing in for the negative entry
    branches: list[tuple[list[int], list[int], list[int]]] = []
    if xc == X_HADAMARD:
        for new_bit in (0, 1):
            nd = d.copy()
            nd[2] = new_bit
            ns = s.copy()
            ns[1] ^= d[2] == D1 and new_bit == 1
            branches.append((nd, a.copy(), ns))
    else:
        nd = d.copy()
        if xc == X_TOFFOLI and d[0] == D1 and d[1] == D1:
            nd[2] ^= 1
        elif xc == X_SWAP:
            nd[1], nd[2] = nd[2], nd[1]
        for new_bit in (0, 1):
            na = a.copy()
            na[1] = new_bit
            ns = s.copy()
            ns[1] ^= a[1] == 1 and new_bit == 1
            branches.append((nd.copy(), na, ns))

    # transition phase: rewrite the program cells and move the carried
    # aux/sim bits with the signal
    match = transition_match(p[0], p[1], p[2], d[1], d[2])
    if match is None:
        return ()
    new_p, move = match
    out = []
    for nd, na, ns in branches:
        if move == RIGHT:
            na[1], na[2] = na[2], na[1]
            ns[1], ns[2] = ns[2], ns[1]
        elif move == LEFT:
            na[0], na[1] = na[1], na[0]
            ns[0], ns[1] = ns[1], ns[0]
        out.append(
            tuple(make_cell(new_p[i], nd[i], na[i], ns[i]) for i in range(3))
        )
    return tuple(out)


forward_images = lru_cache(maxsize=None)(_images)


def _reverse_candidates(p: tuple[int, int, int]) -> list[tuple[tuple[int, int, int], int]]:
    """Program triples and movement tags whose transition could produce p."""
    pl, p0, p1 = p
    cands = []
    if p0 in PLAIN and p1 in (HOLE, EXEC):  # rule 1 output
        cands.append(((pl, p1, p0), RIGHT))
    if p0 == TURN and p1 == BLANK:  # rule 2 output
        cands.append(((pl, HOLE, BLANK), LEFT))
        cands.append(((pl, EXEC, BLANK), LEFT))
    if p0 in MARKED and p1 == BLANK:  # rule 3 output
        cands.append(((pl, p0 - 5, TURN), LEFT))
    if p0 in MARKED and p1 in PLAIN:  # rule 4 output
        cands.append(((pl, p0 - 5, p1 + 5), LEFT))
    if p0 == TURN and p1 in PLAIN:  # rule 5 output
        cands.append(((pl, BLANK, p1 + 5), LEFT))
    if p0 == BLANK and p1 in (HOLE, EXEC):  # rule 6 output
        cands.append(((pl, BLANK, TURN), RIGHT))
    return cands


def _backward_images(cells: tuple[int, int, int]) -> tuple[tuple[int, int, int], ...]:
    """All triples tau with cells in forward_images(tau).

    Candidate predecessors are generated by inverting the program rewrite and
    the aux/sim movement, then enumerating the few tracks the execution phase
    can change; each candidate is confirmed by a forward check.
    """
    p = []
    d = []
    a = []
    s = []
    for c in cells:
        cp, cd, ca, cs = split_cell(c)
        p.append(cp)
        d.append(cd)
        a.append(ca)
        s.append(cs)

    out = []
    seen = set()
    for prog, move in _reverse_candidates(tuple(p)):
        ua, us = a.copy(), s.copy()
        if move == RIGHT:
            ua[1], ua[2] = ua[2], ua[1]
            us[1], us[2] = us[2], us[1]
        elif move == LEFT:
            ua[0], ua[1] = ua[1], ua[0]
            us[0], us[1] = us[1], us[0]
        # execution can only have changed d1, d2, a1, s1
        for d1c in range(4):
            for d2c in range(4):
                for a1c in (0, 1):
                    for s1c in (0, 1):
                        cand = (
                            make_cell(prog[0], d[0], ua[0], us[0]),
                            make_cell(prog[1], d1c, a1c, s1c),
                            make_cell(prog[2], d2c, ua[2], us[2]),
                        )
                        if cand in seen:
                            continue
                        if cells in forward_images(cand):
                            seen.add(cand)
                            out.append(cand)
    return tuple(out)


backward_images = lru_cache(maxsize=None)(_backward_images)


class ClockSystem:
    """Window-3 rewriting system over the 224 cell symbols.

    The rule relation is generated procedurally from forward_images and
    backward_images rather than stored as an explicit pair list; with both
    directions of every branch the list would run into the millions.
    Interface-compatible with rewriting.RewritingSystem for walk counting.
    """

    window = WINDOW

    def __init__(self):
        self.alphabet = clock_alphabet()

    def neighbors(self, s: tuple[int, ...]) -> set[tuple[int, ...]]:
        out: set[tuple[int, ...]] = set()
        for j in range(len(s) - 2):
            triple = s[j : j + 3]
            for img in forward_images(triple):
                out.add(s[:j] + img + s[j + 3 :])
            for img in backward_images(triple):
                out.add(s[:j] + img + s[j + 3 :])
        out.discard(s)
        return out

    def weighted_neighbors(self, s: tuple[int, ...]) -> dict[tuple[int, ...], int]:
        """Neighbors with the number of distinct window derivations."""
        out: dict[tuple[int, ...], int] = {}
        for j in range(len(s) - 2):
            triple = s[j : j + 3]
            for img in forward_images(triple) + backward_images(triple):
                t = s[:j] + img + s[j + 3 :]
                out[t] = out.get(t, 0) + 1
        out.pop(s, None)
        return out

    def to_json(self) -> dict:
        return {
            "alphabet": list(self.alphabet.tokens),
            "window": WINDOW,
            "rules": "clock-v1",
        }


@dataclass(frozen=True)
class ScanReport:
    """Structural properties of the full rule relation."""

    triples_total: int
    windows_matched: int  # (program, data) window classes with images
    directed_pairs: int  # count of (sigma, tau) with tau in forward(sigma)
    max_images: int
    self_pairs: int
    bidirectional: int  # triples with forward and backward images both nonempty

    @property
    def ok(self) -> bool:
        return self.max_images <= 2 and self.self_pairs == 0 and self.bidirectional == 0


def scan_rules(spot_checks: int = 20000, seed: int = 0) -> ScanReport:
    """Exhaustive structural scan of the rule relation over all 224^3 triples.

    The image count of a window depends only on its program and data symbols:
    the aux/sim tracks enter the pipeline exclusively through bijections
    (branch over a fresh bit value, conditional flips, swaps).  The scan
    therefore walks all 14^3 x 4^3 program/data classes, verifies each with a
    representative full pipeline call, and accounts for the 64 aux/sim
    settings per class in bulk; ``spot_checks`` randomly sampled triples are
    additionally run through the full pipeline to confirm the factorization.
    """
    import random

    max_images = 0
    self_pairs = 0
    windows_matched = 0
    directed = 0
    inputs: set[tuple[int, int, int]] = set()
    outputs: set[tuple[int, int, int]] = set()

    prog_range = range(N_PROGRAM)
    data_range = range(N_DATA)
    for pl in prog_range:
        for p0 in prog_range:
            for p1 in prog_range:
                ptrip = (pl, p0, p1)
                for dm in data_range:
                    for d0 in data_range:
                        for d1 in data_range:
                            xc = execution_class(p0, p1, dm, d0, d1)
                            # rules 2 and 6 condition on data the execution
                            # phase cannot have altered (no gate fires there)
                            match = transition_match(pl, p0, p1, d0, d1)
                            expect = 0 if xc == X_BOUNDARY or match is None else 2
                            rep = (
                                make_cell(pl, dm, 0, 0),
                                make_cell(p0, d0, 0, 1),
                                make_cell(p1, d1, 1, 0),
                            )
                            imgs = _images(rep)
                            if len(imgs) != expect:
                                raise CompileError(
                                    f"scan mismatch at {rep}: {len(imgs)} != {expect}"
                                )
                            if not imgs:
                                continue
                            windows_matched += 1
                            max_images = max(max_images, len(imgs))
                            new_p = match[0]
                            if new_p == ptrip:
                                self_pairs += 1
                            inputs.add(ptrip)
                            outputs.add(new_p)
                            directed += expect * 64  # aux/sim settings
    # no triple may admit both a forward and a backward step; since the rule
    # patterns constrain only the program track (plus data symbols no rule
    # rewrites), program-level disjointness of inputs and outputs settles it
    bidirectional = len(inputs & outputs)

    rng = random.Random(seed)
    for _ in range(spot_checks):
        trip = tuple(rng.randrange(ALPHABET_SIZE) for _ in range(3))
        imgs = _images(trip)
        ps = [split_cell(c)[0] for c in trip]
        ds = [split_cell(c)[1] for c in trip]
        xc = execution_class(ps[1], ps[2], ds[0], ds[1], ds[2])
        match = transition_match(ps[0], ps[1], ps[2], ds[1], ds[2])
        expect = 0 if xc == X_BOUNDARY or match is None else 2
        if len(imgs) != expect:
            raise CompileError(f"spot check mismatch at {trip}")
        for img in imgs:
            if img == trip:
                self_pairs += 1
            if trip not in backward_images(img):
                raise CompileError(f"reverse lookup failed for {trip} -> {img}")

    return ScanReport(
        triples_total=ALPHABET_SIZE**3,
        windows_matched=windows_matched,
        directed_pairs=directed,
        max_images=max_images,
        self_pairs=self_pairs,
        bidirectional=bidirectional,
    )


@dataclass(frozen=True)
class Layout:
    """Initial program and data bands for one compiled circuit."""

    block: int  # cells per block: one separator slot plus one per qubit
    width: int  # number of program blocks
    program: tuple[int, ...]
    data: tuple[int, ...]
    register_start: int  # index of the first qubit cell
    exec_pos: int  # index of the initial execution marker
    n_qubits: int

    @property
    def length(self) -> int:
        return len(self.data)


def _gate_slot(gate: Gate) -> int:
    # slot q+1 sits above qubit q; a gate's symbol goes above the rightmost
    # cell it acts on (its target for Toffoli)
    if gate.kind == "h":
        return gate.qubit + 1
    if gate.kind == "swap":
        return gate.qubit + 2
    return gate.qubit + 3


def layout(circuit: Circuit, x: Sequence[int]) -> Layout:
    validate(circuit)
    nq = circuit.n_qubits
    if len(x) > nq:
        raise CompileError(f"input has {len(x)} bits for {nq} qubits")
    if any(b not in (0, 1) for b in x):
        raise CompileError("input bits must be 0 or 1")
    n = nq + 1

    layers: list[dict[int, int]] = []
    for layer in circuit.layers:
        slots: dict[int, int] = {}
        for gate in layer:
            slot = _gate_slot(gate)
            if slot in slots:
                raise CompileError(f"slot collision at {slot}")
            slots[slot] = GATE_CODE[gate.kind]
        layers.append(slots)

    # the initial execution marker occupies slot 1 of the first block; if the
    # first layer needs that slot, push everything one layer back
    if 1 in layers[0]:
        layers.insert(0, {})

    # terminating boundary symbol: earliest slot of the last block strictly
    # after its gates, above a register cell; spill into a fresh block if the
    # last layer ends on the final qubit
    last_slot = max(layers[-1], default=0)
    if last_slot + 1 <= n - 1:
        b_slot = last_slot + 1
    else:
        layers.append({})
        b_slot = 1
    if b_slot in layers[-1]:
        raise CompileError("terminating boundary collides with a gate")
    layers[-1][b_slot] = GATE_B

    w = len(layers)
    program_code: list[int] = []
    for i, slots in enumerate(layers):
        for slot in range(n):
            if i == 0 and slot == 0:
                program_code.append(GATE_B)
            elif i == 0 and slot == 1:
                program_code.append(EXEC)
            else:
                program_code.append(slots.get(slot, GATE_I))
    program_code.append(GATE_I)  # program must end above a separator

    # data band: two-cell margins, separator-led spacer blocks on both sides,
    # register block in the middle holding x padded with zeros
    bits = list(x) + [0] * (nq - len(x))
    data: list[int] = [DOT, DOT]
    for _ in range(w - 1):
        data.extend([SEP] + [DOT] * (n - 1))
    register_start = len(data) + 1
    data.extend([SEP] + [D1 if b else D0 for b in bits])
    for _ in range(w - 1):
        data.extend([SEP] + [DOT] * (n - 1))
    data.extend([SEP, DOT, DOT])

    p_start = 2 + (w - 1) * n  # initial program start: above the register separator
    program = [BLANK] * len(data)
    for i, sym in enumerate(program_code):
        program[p_start + i] = sym
    assert p_start + len(program_code) == len(data) - 2

    return Layout(
        block=n,
        width=w,
        program=tuple(program),
        data=tuple(data),
        register_start=register_start,
        exec_pos=p_start + 1,
        n_qubits=nq,
    )


@dataclass(frozen=True)
class ControlRun:
    """Deterministic program-band trajectory of a layout."""

    ell: int
    configs: tuple[tuple[int, ...], ...]  # program bands, one per step
    d_parity: int  # parity of the number of dummy-Hadamard steps


def control_simulate(lay: Layout, max_steps: int = 1_000_000) -> ControlRun:
    """Run the program band forward until the terminating annihilation.

    Only the program track moves; the data track enters through its fixed
    formatting (separator positions and register extent).  Exactly one window
    must admit a transition at every step; the run ends at the configuration
    whose unique matching window is the boundary-gate annihilation.
    """
    data = lay.data
    prog = list(lay.program)
    configs = [tuple(prog)]
    dummy_steps = 0
    for _ in range(max_steps):
        applicable = []
        annihilating = False
        for j in range(len(prog) - 2):
            p0, p1 = prog[j + 1], prog[j + 2]
            if p0 == BLANK and p1 == BLANK:
                continue
            dm, d0, d1 = data[j], data[j + 1], data[j + 2]
            xc = execution_class(p0, p1, dm, d0, d1)
            if xc == X_BOUNDARY:
                annihilating = True
                continue
            match = transition_match(prog[j], p0, p1, d0, d1)
            if match is not None:
                applicable.append((j, match, xc))
        if not applicable:
            if annihilating:
                return ControlRun(len(configs), tuple(configs), dummy_steps % 2)
            raise CompileError(
                f"no transition applies at step {len(configs) - 1} and no "
                "termination in sight"
            )
        if len(applicable) > 1:
            raise CompileError(
                f"{len(applicable)} transitions apply at step {len(configs) - 1}: "
                f"windows {[j for j, _, _ in applicable]}"
            )
        j, (new_p, _move), xc = applicable[0]
        if xc != X_HADAMARD:
            dummy_steps += 1
        prog[j + 1], prog[j + 2] = new_p[1], new_p[2]
        configs.append(tuple(prog))
    raise CompileError(f"no termination within {max_steps} steps")


def build_strings(
    lay: Layout, run: ControlRun
) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Assemble the three walk endpoints (s, t, t').

    s is the final configuration with the data register reset to the circuit
    input (so a walk reaching it reads off the return amplitude); t and t'
    are the initial configuration with simulator bit 1 respectively 0 above
    the execution marker.  Aux tracks are all zero.
    """
    final_prog = run.configs[-1]
    s = tuple(
        make_cell(p, d, 0, 0) for p, d in zip(final_prog, lay.data)
    )
    t = tuple(
        make_cell(p, d, 0, 1 if i == lay.exec_pos else 0)
        for i, (p, d) in enumerate(zip(lay.program, lay.data))
    )
    t_prime = tuple(
        make_cell(p, d, 0, 0) for p, d in zip(lay.program, lay.data)
    )
    return s, t, t_prime


SQRT2 = math.sqrt(2.0)


@dataclass
class CompiledInstance:
    system: ClockSystem
    s: tuple[int, ...]
    t: tuple[int, ...]
    t_prime: tuple[int, ...]
    m: int
    ell: int
    d_parity: int
    c: float
    epsilon: float
    block: int

    @property
    def length(self) -> int:
        return len(self.s)

    def to_json(self) -> dict:
        return {
            "system": self.system.to_json(),
            "s": [cell_token(c) for c in self.s],
            "t": [cell_token(c) for c in self.t],
            "t_prime": [cell_token(c) for c in self.t_prime],
            "m": self.m,
            "ell": self.ell,
            "d_parity": self.d_parity,
            "c": self.c,
            "epsilon": self.epsilon,
            "block": self.block,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CompiledInstance":
        """Load either a generated instance or one with explicit rules.

        Instance files produced by the compiler carry the rule-generator
        tag; hand-written instances may instead list explicit rules in the
        rewriting-system format, in which case the clock-specific fields
        take neutral defaults.
        """
        rules = doc["system"].get("rules")
        if rules == "clock-v1":
            if list(doc["system"]["alphabet"]) != list(clock_alphabet().tokens):
                raise CompileError("alphabet mismatch in instance file")
            system = ClockSystem()
        elif isinstance(rules, list):
            from .rewriting import RewritingSystem

            system = RewritingSystem.from_json(doc["system"])
        else:
            raise CompileError("unknown rule generator in instance file")
        alphabet = system.alphabet
        return cls(
            system=system,
            s=tuple(alphabet.encode(doc["s"])),
            t=tuple(alphabet.encode(doc["t"])),
            t_prime=tuple(alphabet.encode(doc["t_prime"])),
            m=int(doc["m"]),
            ell=int(doc.get("ell", 2)),
            d_parity=int(doc.get("d_parity", 0)),
            c=float(doc.get("c", 2.0)),
            epsilon=float(doc.get("epsilon", 0.0)),
            block=int(doc.get("block", 0)),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "CompiledInstance":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def check_boundary_inert(instance: CompiledInstance) -> None:
    """No rule may fire in a window touching the outer margin cells."""
    for string in (instance.s, instance.t, instance.t_prime):
        for j in (0, 1, len(string) - 4, len(string) - 3):
            triple = string[j : j + 3]
            if forward_images(triple) or backward_images(triple):
                raise CompileError(f"margin window {j} is not inert")


def compile_circuit(
    circuit: Circuit, x: Sequence[int], m_mode: str = "paper"
) -> CompiledInstance:
    lay = layout(circuit, x)
    run = control_simulate(lay)
    s, t, t_prime = build_strings(lay, run)
    ell = run.ell
    m = spectral.choose_m(ell, m_mode)
    if m % 2 == ell % 2:
        raise CompileError(f"m = {m} has the parity of ell = {ell}")
    c = SQRT2 * spectral.eigenvalue(ell, 0)
    epsilon = spectral.weight(ell, 0) / (3 * SQRT2)
    instance = CompiledInstance(
        system=ClockSystem(),
        s=s,
        t=t,
        t_prime=t_prime,
        m=m,
        ell=ell,
        d_parity=run.d_parity,
        c=c,
        epsilon=epsilon,
        block=lay.block,
    )
    check_boundary_inert(instance)
    return instance
