"""Baseline grouping heuristics, shot budgets, and circuit-depth accounting."""

import json

import numpy as np
import pytest

from hcbmeasure.grouping import (
    depth_overhead,
    diagonalizer,
    estimate_shots,
    lf_grouping,
    member_shot_count,
    rlf_grouping,
    si_grouping,
)
from hcbmeasure.groups import diagonalized_members
from hcbmeasure.paulis import PauliString, PauliSum
from hcbmeasure.rotations import graph_rotation
from hcbmeasure.simulator import Circuit, Statevector, rotation_circuit


def _random_operator(rng, n_qubits, n_strings):
    op = PauliSum(n_qubits)
    while len(op) < n_strings:
        op.add_term(
            PauliString(
                n_qubits,
                int(rng.integers(0, 1 << n_qubits)),
                int(rng.integers(0, 1 << n_qubits)),
            ),
            float(rng.normal()),
        )
    return op


def test_lf_all_diagonal_collapses_to_one_group():
    op = PauliSum(3)
    for label in ("Z0", "Z1", "Z0 Z2", "Z1 Z2"):
        op.add_term(PauliString.from_label(3, label), 0.5)
    result = lf_grouping(op)
    assert result.group_count == 1
    result.check()


def test_lf_anticommuting_pair_needs_two_groups():
    op = PauliSum(1)
    op.add_term(PauliString.from_label(1, "X0"), 1.0)
    op.add_term(PauliString.from_label(1, "Z0"), 1.0)
    assert lf_grouping(op).group_count == 2
    assert rlf_grouping(op).group_count == 2
    assert si_grouping(op).group_count == 2


def test_single_term_single_group():
    op = PauliSum(2)
    op.add_term(PauliString.from_label(2, "X0 Y1"), 0.3)
    for result in (lf_grouping(op), rlf_grouping(op), si_grouping(op)):
        assert result.group_count == 1


def test_h4_baseline_group_counts(h4_operator):
    assert lf_grouping(h4_operator).group_count == 29
    assert rlf_grouping(h4_operator).group_count == 19
    assert si_grouping(h4_operator).group_count == 19


def test_partitions_rebuild_operator(h4_operator):
    for result in (lf_grouping(h4_operator), rlf_grouping(h4_operator),
                   si_grouping(h4_operator)):
        result.check()
        assert (result.to_sum() - h4_operator).max_abs_coefficient() < 1e-12


def test_grouping_determinism(h4_operator):
    first = si_grouping(h4_operator).to_json()
    second = si_grouping(h4_operator).to_json()
    assert first == second
    assert lf_grouping(h4_operator).to_json() == lf_grouping(h4_operator).to_json()


def test_rlf_no_worse_than_lf_on_random_operators():
    rng = np.random.default_rng(42)
    wins = 0
    trials = 30
    for _ in range(trials):
        op = _random_operator(rng, 8, 40)
        if rlf_grouping(op).group_count <= lf_grouping(op).group_count:
            wins += 1
    assert wins >= 0.9 * trials


def test_qubitwise_mode_gives_more_groups(h2_operator):
    fully = lf_grouping(h2_operator, mode="fully").group_count
    qubitwise = lf_grouping(h2_operator, mode="qubitwise").group_count
    assert qubitwise >= fully


def test_diagonalizer_certified(h4_operator):
    result = si_grouping(h4_operator)
    for group in result.groups[:5]:
        circuit = diagonalizer(group)
        for image, _coeff in diagonalized_members(group, circuit):
            assert image.is_diagonal()


def test_to_json_payload(h2_operator):
    payload = json.loads(si_grouping(h2_operator).to_json())
    assert payload["method"] == "SI"
    assert payload["n_qubits"] == 4
    n_terms = sum(len(g["terms"]) for g in payload["groups"])
    assert n_terms == len(h2_operator)


def test_member_shot_count_rules():
    identity = PauliString(2)
    assert member_shot_count(identity, 5.0, 1.0, 1e-3) == 0.0
    z0 = PauliString.from_label(2, "Z0")
    # stabilizer direction: <P> = ±1 means zero variance
    assert member_shot_count(z0, 2.0, 1.0, 1e-3) == 0.0
    assert member_shot_count(z0, 2.0, -1.0, 1e-3) == 0.0
    # w^2 (1 - <P>^2) / eps^2
    assert member_shot_count(z0, 2.0, 0.0, 1e-2) == pytest.approx(4.0 / 1e-4)


def test_estimate_shots_epsilon_scaling(h2_operator, h2_ground):
    _, state = h2_ground
    grouping = si_grouping(h2_operator)
    base = estimate_shots(grouping, state, epsilon=1e-3)
    halved = estimate_shots(grouping, state, epsilon=5e-4)
    assert halved.total == pytest.approx(4.0 * base.total, rel=1e-12)
    with pytest.raises(ValueError):
        estimate_shots(grouping, state, epsilon=0.0)


def test_shot_estimate_csv(h2_operator, h2_ground):
    _, state = h2_ground
    estimate = estimate_shots(si_grouping(h2_operator), state)
    lines = estimate.to_csv().splitlines()
    assert lines[0] == "group,shots"
    assert lines[-1].startswith("total,")
    assert len(lines) == len(estimate.per_group) + 2


def test_stabilizer_state_costs_nothing():
    op = PauliSum(2)
    op.add_term(PauliString.from_label(2, "Z0"), 1.0)
    op.add_term(PauliString.from_label(2, "Z0 Z1"), 0.5)
    state = Statevector.computational_basis(2, 0b01)
    estimate = estimate_shots(si_grouping(op), state)
    assert estimate.total == 0.0


def test_depth_overhead_empty_and_single_gate():
    assert depth_overhead(Circuit(2)) == (0, 0)
    circuit = Circuit(2)
    from hcbmeasure.simulator import PairGivensGate

    circuit.add(PairGivensGate(0, 1, 0.3))
    total, two_qubit = depth_overhead(circuit)
    assert total >= 1
    assert two_qubit >= 1


def test_reordered_depth_beats_interleaved(h4_graphs):
    g1 = h4_graphs[0]
    rotation = graph_rotation(g1)
    inter = depth_overhead(rotation_circuit(rotation, 4, "interleaved"))
    reord = depth_overhead(rotation_circuit(rotation, 4, "reordered"))
    assert reord[1] < inter[1]
