"""Pauli strings and sums: algebra, commutation, text round-trips."""

import numpy as np
import pytest

from hcbmeasure.grouping import strings_commute
from hcbmeasure.paulis import PauliString, PauliSum, multiply

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I = np.eye(2, dtype=complex)
_MATS = {"I": _I, "X": _X, "Y": _Y, "Z": _Z}


def _dense(string: PauliString) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for qubit in range(string.n_qubits):
        out = np.kron(_MATS[string.letter(qubit)], out)
    return out


def _random_string(rng, n_qubits):
    return PauliString(
        n_qubits,
        int(rng.integers(0, 1 << n_qubits)),
        int(rng.integers(0, 1 << n_qubits)),
    )


def test_label_round_trip():
    for label in ("X0 Y1 Z2", "Z0 Z1 Z2 Z3", "", "X1 Y3", "Z5"):
        n = 6
        assert PauliString.from_label(n, label).label() == label
    with pytest.raises(ValueError, match="bad Pauli token"):
        PauliString.from_label(2, "Q0")
    with pytest.raises(ValueError, match="out of range"):
        PauliString.from_label(2, "X5")
    with pytest.raises(ValueError, match="duplicate"):
        PauliString.from_label(2, "X0 Z0")


def test_letter_decoding():
    s = PauliString.from_label(4, "X0 Y1 Z2")
    assert [s.letter(k) for k in range(4)] == ["X", "Y", "Z", "I"]
    assert s.weight == 3
    assert not s.is_identity()
    assert PauliString(4).is_identity()
    assert PauliString.from_label(4, "Z0 Z3").is_diagonal()
    assert not s.is_diagonal()


def test_multiply_single_qubit():
    x = PauliString.from_label(1, "X0")
    z = PauliString.from_label(1, "Z0")
    prod, phase = multiply(x, z)
    assert prod.label() == "Y0"
    assert phase == -1j
    prod, phase = multiply(z, x)
    assert prod.label() == "Y0"
    assert phase == 1j


def test_multiply_self_is_identity():
    rng = np.random.default_rng(0)
    for _ in range(20):
        s = _random_string(rng, 5)
        prod, phase = multiply(s, s)
        assert prod.is_identity()
        assert phase == 1


def test_multiply_matches_kronecker_oracle():
    rng = np.random.default_rng(1)
    for _ in range(40):
        a = _random_string(rng, 6)
        b = _random_string(rng, 6)
        prod, phase = multiply(a, b)
        dense = _dense(a) @ _dense(b)
        assert np.max(np.abs(dense - phase * _dense(prod))) < 1e-12


def test_multiply_associative():
    rng = np.random.default_rng(2)
    for _ in range(30):
        a, b, c = (_random_string(rng, 8) for _ in range(3))
        ab, pab = multiply(a, b)
        left, pl = multiply(ab, c)
        bc, pbc = multiply(b, c)
        right, pr = multiply(a, bc)
        assert left == right
        assert pab * pl == pbc * pr


def test_commutation_modes():
    xx = PauliString.from_label(2, "X0 X1")
    zz = PauliString.from_label(2, "Z0 Z1")
    assert strings_commute(xx, zz, "fully")
    assert not strings_commute(xx, zz, "qubitwise")
    x0 = PauliString.from_label(2, "X0")
    z0 = PauliString.from_label(2, "Z0")
    assert not strings_commute(x0, z0, "fully")
    assert not strings_commute(x0, z0, "qubitwise")
    with pytest.raises(ValueError, match="mode"):
        strings_commute(x0, z0, "sideways")


def test_commutation_exhaustive_against_dense():
    strings = [PauliString(3, x, z) for x in range(8) for z in range(8)]
    for a in strings:
        for b in strings:
            da, db = _dense(a), _dense(b)
            dense_commutes = np.max(np.abs(da @ db - db @ da)) < 1e-12
            assert a.commutes_with(b) == dense_commutes
            assert strings_commute(a, b, "fully") == dense_commutes
            qubitwise = all(
                a.letter(k) == "I" or b.letter(k) == "I"
                or a.letter(k) == b.letter(k)
                for k in range(3))
            assert a.qubitwise_commutes_with(b) == qubitwise
            assert strings_commute(a, b, "qubitwise") == qubitwise


def test_pauli_sum_merges_and_pops_zero():
    op = PauliSum(2)
    s = PauliString.from_label(2, "X0 Z1")
    op.add_term(s, 0.5)
    op.add_term(s, 0.25)
    assert len(op) == 1
    assert op.coefficient(s) == 0.75
    op.add_term(s, -0.75)
    assert len(op) == 0
    assert s not in op


def test_prune_thresholds():
    op = PauliSum(1)
    op.add_term(PauliString.from_label(1, "X0"), 1e-15)
    op.add_term(PauliString.from_label(1, "Z0"), 0.5)
    kept = op.prune(0.0)
    assert len(kept) == 2  # threshold 0 keeps everything with |c| > 0
    kept = op.prune(1e-12)
    assert len(kept) == 1
    assert kept.prune(1e-12).to_text() == kept.to_text()  # idempotent


def test_dropped_weight_bounds_expectation_shift():
    rng = np.random.default_rng(3)
    op = PauliSum(4)
    for _ in range(60):
        op.add_term(_random_string(rng, 4), float(rng.normal(scale=1e-3)))
    threshold = 5e-4
    pruned = op.prune(threshold)
    bound = op.dropped_weight(threshold)
    assert bound > 0.0
    dense_full = sum(c * _dense(s) for s, c in op.terms())
    dense_kept = sum(c * _dense(s) for s, c in pruned.terms())
    for _ in range(5):
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        v /= np.linalg.norm(v)
        shift = abs(np.vdot(v, (dense_full - dense_kept) @ v))
        assert shift <= bound + 1e-12


def test_text_round_trip():
    rng = np.random.default_rng(4)
    op = PauliSum(3)
    for _ in range(12):
        op.add_term(_random_string(rng, 3), float(rng.normal()))
    back = PauliSum.from_text(op.to_text())
    diff = op - back
    assert diff.max_abs_coefficient() < 1e-10


def test_size_mismatch_errors():
    op = PauliSum(2)
    with pytest.raises(ValueError):
        op.add_term(PauliString.from_label(3, "X0 X1 X2"), 1.0)
    a = PauliString.from_label(1, "X0")
    b = PauliString.from_label(2, "X0 X1")
    with pytest.raises(ValueError):
        multiply(a, b)
    with pytest.raises(ValueError):
        a.commutes_with(b)
