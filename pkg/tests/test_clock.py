import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from walkdelta import clock
from walkdelta.circuits import parse_circuit
from walkdelta.clock import (
    ALPHABET_SIZE,
    BLANK,
    DOT,
    D0,
    D1,
    EXEC,
    GATE_B,
    GATE_H,
    GATE_I,
    GATE_S,
    GATE_T,
    HOLE,
    PROGRAM_NAMES,
    SEP,
    TURN,
    WINDOW,
    ClockSystem,
    CompileError,
    CompiledInstance,
    backward_images,
    build_strings,
    cell_token,
    check_boundary_inert,
    clock_alphabet,
    compile_circuit,
    control_simulate,
    forward_images,
    layout,
    make_cell,
    parse_cell_token,
    split_cell,
)

GOLDEN = [
    ("qubits 1\nh 0", [0], 64, 0, 15),
    ("qubits 1\nh 0\n---\nh 0", [0], 120, 1, 19),
    ("qubits 2\nh 0\n---\nswap 0", [0, 0], 252, 0, 26),
    ("qubits 3\ntoffoli 0", [1, 1, 0], 80, 1, 17),
]


def golden_instances():
    for text, x, ell, d_parity, length in GOLDEN:
        yield parse_circuit(text), x, ell, d_parity, length


def test_alphabet_shape():
    alph = clock_alphabet()
    assert len(alph.tokens) == ALPHABET_SIZE == 224
    assert WINDOW == 3
    assert len(set(alph.tokens)) == 224


def test_cell_encoding_round_trip():
    for code in range(ALPHABET_SIZE):
        p, d, a, s = split_cell(code)
        assert make_cell(p, d, a, s) == code
        assert parse_cell_token(cell_token(code)) == code


def test_cell_token_format():
    assert cell_token(make_cell(EXEC, D1, 0, 0)) == "EXEC.D1.0.0"
    assert cell_token(make_cell(GATE_H, SEP, 1, 0)) == "H.SEP.1.0"


def test_blank_window_is_inert():
    blank = make_cell(BLANK, DOT, 0, 0)
    assert forward_images((blank, blank, blank)) == ()
    assert backward_images((blank, blank, blank)) == ()


def test_boundary_annihilates():
    # execution marker meeting the terminating boundary symbol: no image
    trip = (
        make_cell(GATE_I, D0, 0, 0),
        make_cell(EXEC, D0, 0, 0),
        make_cell(GATE_B, D0, 0, 0),
    )
    assert forward_images(trip) == ()


def test_hadamard_branches_and_sim_flip():
    # execution marker to the left of an H above a binary data cell
    trip = (
        make_cell(GATE_I, D0, 0, 0),
        make_cell(EXEC, D0, 0, 0),
        make_cell(GATE_H, D1, 0, 0),
    )
    imgs = forward_images(trip)
    assert len(imgs) == 2
    out_bits = set()
    for img in imgs:
        for cell in img:
            p, d, a, s = split_cell(cell)
            if d in (D0, D1) and p != GATE_I:
                out_bits.add((d, s))
    # branch to 0 keeps the sim bit, branch to 1 flips it (input bit is 1)
    data_states = set()
    for img in imgs:
        cells = [split_cell(c) for c in img]
        bits = [(d, s) for p, d, a, s in cells if d in (D0, D1)]
        data_states.update(bits)
    assert (D0, 0) in data_states
    assert (D1, 1) in data_states


def test_forward_images_never_self():
    rng = random.Random(5)
    alph_size = ALPHABET_SIZE
    for _ in range(3000):
        trip = tuple(rng.randrange(alph_size) for _ in range(3))
        imgs = forward_images(trip)
        assert len(imgs) <= 2
        assert trip not in imgs


@given(st.tuples(*[st.integers(0, ALPHABET_SIZE - 1)] * 3))
@settings(max_examples=400, deadline=None)
def test_forward_backward_inverse(trip):
    for img in forward_images(trip):
        assert trip in backward_images(img)
    for pre in backward_images(trip):
        assert trip in forward_images(pre)


def test_no_window_is_bidirectional():
    rng = random.Random(11)
    for _ in range(3000):
        trip = tuple(rng.randrange(ALPHABET_SIZE) for _ in range(3))
        if forward_images(trip):
            assert not backward_images(trip)


def test_layout_four_qubit_program_band():
    # two layers on four qubits: Toffoli(0,1,2) and H(3), then H(0), Swap(1,2)
    circuit = parse_circuit("qubits 4\ntoffoli 0\nh 3\n---\nh 0\nswap 1")
    lay = layout(circuit, [0, 0, 0, 0])
    names = [PROGRAM_NAMES[p] for p in lay.program if p != BLANK]
    assert names == ["B", "EXEC", "I", "T", "H", "I", "H", "I", "S", "B", "I"]
    assert lay.block == 5
    assert lay.width == 2


def test_layout_prepends_identity_layer():
    # a first-layer H on qubit 0 claims slot 1, which the markers start in,
    # so an all-identity layer is inserted before it
    lay = layout(parse_circuit("qubits 1\nh 0"), [0])
    names = [PROGRAM_NAMES[p] for p in lay.program if p != BLANK]
    # identity layer before the H, terminator block after it
    assert names == ["B", "EXEC", "I", "H", "I", "B", "I"]
    assert lay.width == 3


def test_layout_data_band_shape():
    lay = layout(parse_circuit("qubits 1\nh 0"), [0])
    assert len(lay.data) == len(lay.program) == lay.length
    assert len(lay.data) == (2 * lay.width - 1) * lay.block + 5
    # separators every block cells, register holds the input bit
    assert lay.data[lay.register_start] == D0
    seps = [i for i, d in enumerate(lay.data) if d == SEP]
    assert all(b - a == lay.block for a, b in zip(seps, seps[1:]))


def test_control_run_golden_lengths():
    for circuit, x, ell, d_parity, length in golden_instances():
        lay = layout(circuit, x)
        run = control_simulate(lay)
        assert run.ell == ell
        assert run.d_parity == d_parity
        assert lay.length == length
        assert len(run.configs) == ell
        assert len(set(run.configs)) == ell


def test_control_run_margins_stay_blank():
    lay = layout(parse_circuit("qubits 1\nh 0"), [0])
    run = control_simulate(lay)
    for config in run.configs:
        assert len(config) == lay.length
        assert config[0] == config[1] == BLANK
        assert config[-1] == config[-2] == BLANK


def test_build_strings_structure():
    for circuit, x, ell, d_parity, length in golden_instances():
        lay = layout(circuit, x)
        run = control_simulate(lay)
        s, t, t_prime = build_strings(lay, run)
        assert len(s) == len(t) == len(t_prime) == length
        # t and t_prime differ in exactly one cell, by the sim bit
        diff = [i for i in range(length) if t[i] != t_prime[i]]
        assert diff == [lay.exec_pos]
        pt, dt, at, st_ = split_cell(t[lay.exec_pos])
        pp, dp, ap, sp = split_cell(t_prime[lay.exec_pos])
        assert (pt, dt, at) == (pp, dp, ap)
        assert (st_, sp) == (1, 0)


def test_compile_golden_constants():
    for circuit, x, ell, d_parity, length in golden_instances():
        inst = compile_circuit(circuit, x)
        assert inst.ell == ell
        assert inst.d_parity == d_parity
        assert inst.length == length
        assert inst.m == (ell + 1) ** 3
        assert inst.m % 2 != ell % 2
        assert 2.0 < inst.c < 2.0**1.5
        assert inst.epsilon > 0
        check_boundary_inert(inst)


def test_compile_m_modes():
    circuit = parse_circuit("qubits 1\nh 0")
    paper = compile_circuit(circuit, [0], m_mode="paper")
    sign_only = compile_circuit(circuit, [0], m_mode="sign_only")
    assert sign_only.m <= paper.m
    assert sign_only.m % 2 != sign_only.ell % 2


def test_instance_json_round_trip(tmp_path):
    circuit = parse_circuit("qubits 1\nh 0")
    inst = compile_circuit(circuit, [0])
    path = tmp_path / "inst.json"
    inst.save(path)
    loaded = CompiledInstance.load(path)
    assert loaded.s == inst.s
    assert loaded.t == inst.t
    assert loaded.t_prime == inst.t_prime
    assert loaded.m == inst.m
    assert loaded.ell == inst.ell
    assert loaded.c == inst.c
    # identical bytes on re-save (determinism)
    path2 = tmp_path / "inst2.json"
    loaded.save(path2)
    assert path.read_bytes() == path2.read_bytes()


def test_instance_json_rejects_bad_generator(tmp_path):
    circuit = parse_circuit("qubits 1\nh 0")
    inst = compile_circuit(circuit, [0])
    doc = inst.to_json()
    doc["system"]["rules"] = "clock-v2"
    with pytest.raises(CompileError):
        CompiledInstance.from_json(doc)


def test_explicit_rule_instance_loads():
    doc = {
        "system": {
            "alphabet": ["a", "b"],
            "window": 1,
            "rules": [[["a"], ["b"]]],
        },
        "s": ["a", "a"],
        "t": ["b", "b"],
        "t_prime": ["a", "b"],
        "m": 2,
    }
    inst = CompiledInstance.from_json(doc)
    assert inst.s == (0, 0)
    assert inst.m == 2


def test_clock_system_neighbors_symmetric():
    inst = compile_circuit(parse_circuit("qubits 1\nh 0"), [0])
    system = inst.system
    for string in (inst.s, inst.t, inst.t_prime):
        for nb in system.neighbors(string):
            assert string in system.neighbors(nb)


def test_compile_rejects_bad_input():
    circuit = parse_circuit("qubits 1\nh 0")
    with pytest.raises(CompileError):
        compile_circuit(circuit, [0, 1])
    with pytest.raises(CompileError):
        compile_circuit(circuit, [2])
