"""Fermion-to-qubit encoding: orderings, ladder algebra, Hamiltonian build."""

import numpy as np
import pytest

from hcbmeasure.encoding import (
    ORDERINGS,
    build_qubit_hamiltonian,
    check_ordering,
    jw_encode,
    ladder_terms,
    spin_orbital_index,
)
from hcbmeasure.integrals import IntegralTensors
from hcbmeasure.paulis import PauliSum

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I = np.eye(2, dtype=complex)
_MATS = {"I": _I, "X": _X, "Y": _Y, "Z": _Z}


def _dense_string(string) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for qubit in range(string.n_qubits):
        out = np.kron(_MATS[string.letter(qubit)], out)
    return out


def _dense_sum(op: PauliSum) -> np.ndarray:
    dim = 2 ** op.n_qubits
    total = np.zeros((dim, dim), dtype=complex)
    for string, coeff in op.terms():
        total += coeff * _dense_string(string)
    return total


def _dense_annihilator(n_qubits: int, j: int) -> np.ndarray:
    """Matrix of the fermionic annihilator under the encoding's chain rule."""
    lower = (_X + 1j * _Y) / 2.0
    out = np.array([[1.0 + 0j]])
    for qubit in range(n_qubits):
        if qubit < j:
            factor = _Z
        elif qubit == j:
            factor = lower
        else:
            factor = _I
        out = np.kron(factor, out)
    return out


def test_orderings_and_check():
    assert set(ORDERINGS) == {"interleaved", "reordered"}
    check_ordering("interleaved")
    with pytest.raises(ValueError):
        check_ordering("scrambled")


def test_spin_orbital_index():
    n = 3
    assert [spin_orbital_index(p, 0, n, "interleaved") for p in range(n)] == [0, 2, 4]
    assert [spin_orbital_index(p, 1, n, "interleaved") for p in range(n)] == [1, 3, 5]
    assert [spin_orbital_index(p, 0, n, "reordered") for p in range(n)] == [0, 1, 2]
    assert [spin_orbital_index(p, 1, n, "reordered") for p in range(n)] == [3, 4, 5]


def test_ladder_terms_match_dense():
    n = 4
    for j in range(n):
        for creation in (False, True):
            dense = _dense_annihilator(n, j)
            if creation:
                dense = dense.conj().T
            encoded = np.zeros_like(dense)
            for string, coeff in ladder_terms(n, j, creation):
                encoded += coeff * _dense_string(string)
            assert np.max(np.abs(encoded - dense)) < 1e-14


def test_number_operator():
    op = jw_encode(2, [(1.0, ((0, True), (0, False)))])
    assert len(op) == 2
    identity = [s for s, _ in op.terms() if s.is_identity()]
    assert identity and abs(op.coefficient(identity[0]) - 0.5) < 1e-15
    z0 = [s for s, _ in op.terms() if s.label() == "Z0"]
    assert z0 and abs(op.coefficient(z0[0]) + 0.5) < 1e-15


def test_adjacent_hop():
    op = jw_encode(
        2, [(1.0, ((0, True), (1, False))), (1.0, ((1, True), (0, False)))])
    labels = {s.label(): c for s, c in op.terms()}
    assert labels == pytest.approx({"X0 X1": 0.5, "Y0 Y1": 0.5})


def test_distant_hop_carries_parity_chain():
    op = jw_encode(
        3, [(1.0, ((0, True), (2, False))), (1.0, ((2, True), (0, False)))])
    labels = {s.label(): c for s, c in op.terms()}
    assert labels == pytest.approx({"X0 Z1 X2": 0.5, "Y0 Z1 Y2": 0.5})


def test_canonical_anticommutator():
    for n in (2, 3, 4):
        for p in range(n):
            for q in range(n):
                op = jw_encode(n, [
                    (1.0, ((p, False), (q, True))),
                    (1.0, ((q, True), (p, False))),
                ])
                if p == q:
                    assert len(op) == 1
                    string, coeff = next(iter(op.terms()))
                    assert string.is_identity()
                    assert abs(coeff - 1.0) < 1e-12
                else:
                    assert len(op) == 0


def test_jw_encode_random_one_body_against_dense():
    rng = np.random.default_rng(7)
    n = 4
    h = rng.normal(size=(n, n))
    h = (h + h.T) / 2.0
    terms = [
        (h[p, q], ((p, True), (q, False)))
        for p in range(n) for q in range(n)]
    op = jw_encode(n, terms)
    dense_ladder = [_dense_annihilator(n, j) for j in range(n)]
    dense = sum(
        h[p, q] * dense_ladder[p].conj().T @ dense_ladder[q]
        for p in range(n) for q in range(n))
    assert np.max(np.abs(_dense_sum(op) - dense)) < 1e-12


def test_jw_encode_rejects_non_hermitian():
    with pytest.raises(ValueError):
        jw_encode(2, [(1.0, ((0, True), (1, False)))])  # bare hop, no h.c.


def test_h4_term_count(h4_operator):
    assert len(h4_operator) == 361


def test_diagonal_one_body_maps_to_z_strings():
    n = 2
    h = np.diag([-1.25, 0.5])
    g = np.zeros((n, n, n, n))
    tensors = IntegralTensors(n, h, g, e_nuc=0.3)
    op = build_qubit_hamiltonian(tensors, "interleaved")
    for string, _ in op.terms():
        assert string.is_diagonal()


def test_ground_energy_matches_between_orderings(h2_tensors):
    from hcbmeasure.simulator import ground_state

    e_int, _ = ground_state(build_qubit_hamiltonian(h2_tensors, "interleaved"), 2)
    e_reo, _ = ground_state(build_qubit_hamiltonian(h2_tensors, "reordered"), 2)
    assert abs(e_int - e_reo) < 1e-10


def test_hamiltonian_against_dense_fock_oracle(h2_tensors):
    """Full two-electron build reproduced by a dense ladder-operator sum."""
    n = h2_tensors.n_orbitals
    nq = 2 * n
    op = build_qubit_hamiltonian(h2_tensors, "interleaved", prune_threshold=0.0)
    ladders = [_dense_annihilator(nq, j) for j in range(nq)]

    def so(p, s):
        return spin_orbital_index(p, s, n, "interleaved")

    dim = 2 ** nq
    dense = h2_tensors.e_nuc * np.eye(dim, dtype=complex)
    for p in range(n):
        for q in range(n):
            for s in (0, 1):
                dense += (
                    h2_tensors.one_body[p, q]
                    * ladders[so(p, s)].conj().T @ ladders[so(q, s)])
    g = h2_tensors.two_body  # ⟨kl|mn⟩: 0.5 Σ g a†_k a†_l a_n a_m, spins (k,m)/(l,n)
    for k in range(n):
        for l in range(n):
            for m in range(n):
                for nn in range(n):
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            dense += 0.5 * g[k, l, m, nn] * (
                                ladders[so(k, s1)].conj().T
                                @ ladders[so(l, s2)].conj().T
                                @ ladders[so(nn, s2)]
                                @ ladders[so(m, s1)])
    assert np.max(np.abs(_dense_sum(op) - dense)) < 1e-10
