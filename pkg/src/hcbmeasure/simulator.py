"""Dense statevector simulation for paired-orbital circuits.

Qubit j is spin orbital j (see encoding.py for the orbital->qubit maps);
basis index bit j holds its occupation.  Capped at 16 qubits: every state
is a full 2^n complex vector.

Fermionic gates act with exact Jordan-Wigner phases:

  PairRotationGate(p, q, theta): exp[ theta/2 * sum_s (a+_ps a_qs - h.c.) ]
  PairExchangeGate(p, q, phi):   exp[ -i phi/2 (a+_pu a+_pd a_qd a_qu + h.c.) ]

applied directly on the amplitudes, so no Trotter or matrix exponentials
are involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .encoding import check_ordering, spin_orbital_index
from .groups import CliffordCircuit, CommutingGroup, diagonalized_members, diagonalizing_circuit
from .paulis import PauliString, PauliSum
from .rotations import OrbitalRotation, PairingGraph, givens_factorize

MAX_QUBITS = 16
DENSE_EIG_LIMIT = 4096
NORM_TOL = 1e-10

_H_MATRIX = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
_S_MATRIX = np.array([[1.0, 0.0], [0.0, 1.0j]])
_X_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]])
_CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float
)
_CZ_MATRIX = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"amplitude vector has shape {amps.shape}")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1")
        self.amplitudes = amps

    @classmethod
    def computational_basis(cls, n_qubits: int, bits: int = 0) -> "Statevector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[bits] = 1.0
        return cls(n_qubits, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


# ---------------------------------------------------------------------------
# gates and circuits


@dataclass(frozen=True)
class XGate:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class ZGate:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class OneQubitGate:
    qubit: int
    matrix: tuple  # 2x2, row-major nested tuple to stay hashable

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class TwoQubitGate:
    qubit_pair: tuple[int, int]
    matrix: tuple  # 4x4 indexed by (b_high, b_low) = (pair[0], pair[1])

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.qubit_pair


@dataclass(frozen=True)
class PairRotationGate:
    """Spin-summed Givens rotation between spatial orbitals p and q."""

    p: int
    q: int
    theta: float


@dataclass(frozen=True)
class PairExchangeGate:
    """Pair-hop rotation exp[-i phi/2 (a+_pu a+_pd a_qd a_qu + h.c.)].

    Couples the two doubly-occupied configurations with a relative -i
    amplitude (an X-axis rotation in that two-level subspace).
    """

    p: int
    q: int
    phi: float


@dataclass(frozen=True)
class PairGivensGate:
    """Pair-hop rotation exp[phi/2 (a+_pu a+_pd a_qd a_qu - h.c.)].

    The real-amplitude (Y-axis) counterpart of PairExchangeGate: it forms
    cos/sin superpositions of the two doubly-occupied configurations, which
    is what a pair-correlated ground-state ansatz needs.
    """

    p: int
    q: int
    phi: float


Gate = (
    XGate
    | ZGate
    | OneQubitGate
    | TwoQubitGate
    | PairRotationGate
    | PairExchangeGate
    | PairGivensGate
)


@dataclass
class Circuit:
    """Gate list over 2*n_orbitals qubits under a fixed spin-orbital layout."""

    n_orbitals: int
    ordering: str = "interleaved"
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        check_ordering(self.ordering)
        if not 1 <= self.n_orbitals <= MAX_QUBITS // 2:
            raise ValueError(f"n_orbitals must be in [1, {MAX_QUBITS // 2}]")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_orbitals

    def spin_orbital(self, orbital: int, spin: int) -> int:
        return spin_orbital_index(orbital, spin, self.n_orbitals, self.ordering)

    def add(self, gate: Gate) -> None:
        self.gates.append(gate)


_GATE_TOKENS = {
    "UR": PairRotationGate,
    "UC": PairExchangeGate,
    "UG": PairGivensGate,
}


def circuit_to_text(circuit: Circuit) -> str:
    """One gate per line: ``UR p q theta`` / ``UC p q phi`` / ``UG p q phi``
    / ``X i`` / ``Z i``, with a header recording size and layout.

    Gates carrying explicit matrices have no text form and raise ValueError.
    """
    lines = [f"# n_orbitals={circuit.n_orbitals} ordering={circuit.ordering}"]
    for gate in circuit.gates:
        if isinstance(gate, XGate):
            lines.append(f"X {gate.qubit}")
        elif isinstance(gate, ZGate):
            lines.append(f"Z {gate.qubit}")
        elif isinstance(gate, PairRotationGate):
            lines.append(f"UR {gate.p} {gate.q} {gate.theta!r}")
        elif isinstance(gate, PairExchangeGate):
            lines.append(f"UC {gate.p} {gate.q} {gate.phi!r}")
        elif isinstance(gate, PairGivensGate):
            lines.append(f"UG {gate.p} {gate.q} {gate.phi!r}")
        else:
            raise ValueError(f"gate {gate!r} has no text serialization")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    """Parse the :func:`circuit_to_text` format (exact round-trip)."""
    import re as _re

    circuit: Circuit | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _re.search(r"n_orbitals\s*=\s*(\d+)\s+ordering\s*=\s*(\S+)", line)
            if match:
                circuit = Circuit(int(match.group(1)), match.group(2))
            continue
        if circuit is None:
            raise ValueError("circuit text is missing the '# n_orbitals=...' header")
        tokens = line.split()
        try:
            if tokens[0] in ("X", "Z") and len(tokens) == 2:
                cls = XGate if tokens[0] == "X" else ZGate
                circuit.add(cls(int(tokens[1])))
            elif tokens[0] in _GATE_TOKENS and len(tokens) == 4:
                cls = _GATE_TOKENS[tokens[0]]
                circuit.add(cls(int(tokens[1]), int(tokens[2]), float(tokens[3])))
            else:
                raise ValueError("unknown gate line")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: cannot parse gate {line!r}") from exc
    if circuit is None:
        raise ValueError("circuit text is missing the '# n_orbitals=...' header")
    return circuit


def _parity(values: np.ndarray, mask: int) -> np.ndarray:
    return np.bitwise_count(values & mask).astype(np.int64) & 1


def _apply_single_excitation(
    amps: np.ndarray, n_qubits: int, i: int, j: int, theta: float
) -> np.ndarray:
    """exp[theta/2 (a+_i a_j - a+_j a_i)] with Jordan-Wigner string phases."""
    dim = amps.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    bit_i, bit_j = 1 << i, 1 << j
    sel = ((idx & bit_i) != 0) & ((idx & bit_j) == 0)
    src = idx[sel]
    partner = src ^ (bit_i | bit_j)
    lo, hi = (i, j) if i < j else (j, i)
    between = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    sign = 1.0 - 2.0 * _parity(src, between)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    out = amps.copy()
    out[src] = c * amps[src] + sign * s * amps[partner]
    out[partner] = c * amps[partner] - sign * s * amps[src]
    return out


def _apply_pair_hop(
    amps: np.ndarray, circuit: Circuit, gate: PairExchangeGate | PairGivensGate
) -> np.ndarray:
    i1 = circuit.spin_orbital(gate.p, 0)
    i2 = circuit.spin_orbital(gate.p, 1)
    j1 = circuit.spin_orbital(gate.q, 0)
    j2 = circuit.spin_orbital(gate.q, 1)
    dim = amps.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    p_mask = (1 << i1) | (1 << i2)
    q_mask = (1 << j1) | (1 << j2)
    # v2: pair fully on q, p empty; v1 = v2 with the pair moved to p
    sel = ((idx & q_mask) == q_mask) & ((idx & p_mask) == 0)
    v2 = idx[sel]
    v1 = v2 ^ (p_mask | q_mask)
    # JW sign of a+_pu a+_pd a_qd a_qu acting on v2, one ladder step at a time
    state = v2.copy()
    total = np.zeros(len(v2), dtype=np.int64)
    for index in (j1, j2, i2, i1):
        below = (1 << index) - 1
        total += np.bitwise_count(state & below).astype(np.int64)
        state ^= 1 << index
    sign = 1.0 - 2.0 * (total & 1)
    c, s = np.cos(gate.phi / 2.0), np.sin(gate.phi / 2.0)
    out = amps.copy()
    if isinstance(gate, PairExchangeGate):
        out[v1] = c * amps[v1] - 1.0j * sign * s * amps[v2]
        out[v2] = c * amps[v2] - 1.0j * sign * s * amps[v1]
    else:
        out[v1] = c * amps[v1] + sign * s * amps[v2]
        out[v2] = c * amps[v2] - sign * s * amps[v1]
    return out


def _apply_matrix(amps: np.ndarray, n_qubits: int, qubits: tuple[int, ...], mat: np.ndarray) -> np.ndarray:
    k = len(qubits)
    arr = amps.reshape((2,) * n_qubits)
    # bit j lives on axis n_qubits-1-j; gate matrix index orders qubits[0] high
    axes = [n_qubits - 1 - q for q in qubits]
    tensor = mat.reshape((2,) * (2 * k))
    arr = np.tensordot(tensor, arr, axes=(list(range(k, 2 * k)), axes))
    arr = np.moveaxis(arr, list(range(k)), axes)
    return arr.reshape(-1)


def apply_circuit(state: Statevector, circuit: Circuit) -> Statevector:
    if state.n_qubits != circuit.n_qubits:
        raise ValueError("state and circuit qubit counts differ")
    amps = state.amplitudes
    n = state.n_qubits
    for gate in circuit.gates:
        if isinstance(gate, XGate):
            amps = amps[np.arange(len(amps)) ^ (1 << gate.qubit)]
        elif isinstance(gate, ZGate):
            idx = np.arange(len(amps))
            amps = amps * (1.0 - 2.0 * ((idx >> gate.qubit) & 1))
        elif isinstance(gate, OneQubitGate):
            amps = _apply_matrix(amps, n, gate.qubits, np.asarray(gate.matrix, dtype=complex))
        elif isinstance(gate, TwoQubitGate):
            amps = _apply_matrix(amps, n, gate.qubits, np.asarray(gate.matrix, dtype=complex))
        elif isinstance(gate, PairRotationGate):
            for spin in (0, 1):
                i = circuit.spin_orbital(gate.p, spin)
                j = circuit.spin_orbital(gate.q, spin)
                amps = _apply_single_excitation(amps, n, i, j, gate.theta)
        elif isinstance(gate, (PairExchangeGate, PairGivensGate)):
            amps = _apply_pair_hop(amps, circuit, gate)
        else:
            raise ValueError(f"unknown gate {gate!r}")
    return Statevector(n, amps)


def apply_clifford(state: Statevector, circuit: CliffordCircuit) -> Statevector:
    """Apply an H/S/CNOT/CZ/X gate list to the state."""
    if state.n_qubits != circuit.n_qubits:
        raise ValueError("state and circuit qubit counts differ")
    amps = state.amplitudes
    n = state.n_qubits
    for gate in circuit.gates:
        if gate.name == "H":
            amps = _apply_matrix(amps, n, gate.qubits, _H_MATRIX)
        elif gate.name == "S":
            amps = _apply_matrix(amps, n, gate.qubits, _S_MATRIX)
        elif gate.name == "X":
            amps = _apply_matrix(amps, n, gate.qubits, _X_MATRIX)
        elif gate.name == "CNOT":
            amps = _apply_matrix(amps, n, gate.qubits, _CNOT_MATRIX)
        elif gate.name == "CZ":
            amps = _apply_matrix(amps, n, gate.qubits, _CZ_MATRIX)
    return Statevector(n, amps)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense matrix of the circuit (small systems only; used for checks)."""
    dim = 1 << circuit.n_qubits
    if dim > 4096:
        raise ValueError("circuit_unitary is limited to 12 qubits")
    cols = []
    for b in range(dim):
        state = Statevector.computational_basis(circuit.n_qubits, b)
        cols.append(apply_circuit(state, circuit).amplitudes)
    return np.array(cols).T


# ---------------------------------------------------------------------------
# orbital rotations as circuits


def rotation_circuit(
    rotation: OrbitalRotation, n_orbitals: int, ordering: str = "interleaved"
) -> Circuit:
    """Circuit whose action on states matches rotating the integral tensors."""
    if rotation.n_orbitals != n_orbitals:
        raise ValueError("rotation size does not match orbital count")
    circuit = Circuit(n_orbitals, ordering)
    if rotation.factors:
        for p, q, theta in rotation.factors:
            circuit.add(PairRotationGate(p, q, theta))
        return circuit
    factors, signs = givens_factorize(rotation.matrix)
    for k, s in enumerate(signs):
        if s < 0:
            circuit.add(ZGate(circuit.spin_orbital(k, 0)))
            circuit.add(ZGate(circuit.spin_orbital(k, 1)))
    for p, q, theta in factors:
        circuit.add(PairRotationGate(p, q, theta))
    return circuit


# ---------------------------------------------------------------------------
# pair ansatz (SPA preparation plus per-graph correlation blocks)


@dataclass(frozen=True)
class PairAnsatz:
    """Parameterized pair-correlated circuit over a sequence of pairing graphs.

    The first graph seeds one opposite-spin pair per edge and correlates it
    with a pair-hop rotation (one angle per edge), followed by a single
    inverse orbital rotation over the same graph (one angle).  Every later
    graph contributes a rotated pair-hop block
    rotate(theta) -> hop(phi) -> rotate(-theta) with two angles.
    Extra two-orbital rotations may be appended, one angle each.

    `exchange` picks the pair-hop amplitude convention: "givens" (default)
    uses the real rotation PairGivensGate, which can weight the two pair
    configurations with arbitrary real cos/sin amplitudes and is what
    ground-state optimization needs; "phase" uses PairExchangeGate, whose
    -i amplitude leaves any real-coefficient expectation blind to the
    pair coherence, so optimized energies saturate far above the ground
    state.  Keep "givens" unless specifically studying that convention.
    """

    n_orbitals: int
    graphs: tuple[PairingGraph, ...]
    ordering: str = "interleaved"
    extra_pairs: tuple[tuple[int, int], ...] = ()
    exchange: str = "givens"

    def __post_init__(self) -> None:
        check_ordering(self.ordering)
        if not self.graphs:
            raise ValueError("at least one pairing graph is required")
        for graph in self.graphs:
            if graph.n_orbitals != self.n_orbitals:
                raise ValueError("graph size does not match orbital count")
        for p, q in self.extra_pairs:
            if not (0 <= p < self.n_orbitals and 0 <= q < self.n_orbitals and p != q):
                raise ValueError(f"invalid extra pair ({p}, {q})")
        if self.exchange not in ("givens", "phase"):
            raise ValueError(f"exchange must be 'givens' or 'phase', got {self.exchange!r}")

    def _hop(self, p: int, q: int, angle: float) -> Gate:
        if self.exchange == "givens":
            return PairGivensGate(p, q, angle)
        return PairExchangeGate(p, q, angle)

    @property
    def n_electrons(self) -> int:
        return 2 * len(self.graphs[0].edges)

    @property
    def n_parameters(self) -> int:
        first = len(self.graphs[0].edges) + 1
        return first + 2 * (len(self.graphs) - 1) + len(self.extra_pairs)

    def circuit(self, params: np.ndarray) -> Circuit:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_parameters,):
            raise ValueError(
                f"expected {self.n_parameters} parameters, got shape {params.shape}"
            )
        circuit = Circuit(self.n_orbitals, self.ordering)
        first = self.graphs[0]
        k = 0
        for (p, q), angle in zip(first.edges, params[: len(first.edges)]):
            circuit.add(XGate(circuit.spin_orbital(p, 0)))
            circuit.add(XGate(circuit.spin_orbital(p, 1)))
            circuit.add(self._hop(p, q, angle))
        k = len(first.edges)
        theta1 = params[k]
        k += 1
        for p, q in reversed(first.edges):
            circuit.add(PairRotationGate(p, q, -theta1))
        for graph in self.graphs[1:]:
            theta, phi = params[k], params[k + 1]
            k += 2
            for p, q in graph.edges:
                circuit.add(PairRotationGate(p, q, theta))
            for p, q in graph.edges:
                circuit.add(self._hop(p, q, phi))
            for p, q in reversed(graph.edges):
                circuit.add(PairRotationGate(p, q, -theta))
        for (p, q), angle in zip(self.extra_pairs, params[k:]):
            circuit.add(PairRotationGate(p, q, angle))
        return circuit

    def prepare(self, params: np.ndarray) -> Statevector:
        state = Statevector.computational_basis(2 * self.n_orbitals)
        return apply_circuit(state, self.circuit(params))


def build_pair_ansatz(
    graphs: list[PairingGraph],
    ordering: str = "interleaved",
    extra_pairs: list[tuple[int, int]] | None = None,
    exchange: str = "givens",
) -> PairAnsatz:
    n_orbitals = graphs[0].n_orbitals
    return PairAnsatz(
        n_orbitals=n_orbitals,
        graphs=tuple(graphs),
        ordering=ordering,
        extra_pairs=tuple(extra_pairs or ()),
        exchange=exchange,
    )


def optimize_ansatz(
    ansatz: PairAnsatz,
    op: PauliSum,
    restarts: int = 6,
    seed: int = 11,
    spread: float = 0.8,
) -> tuple[np.ndarray, float]:
    """Variationally minimize <psi(params)|op|psi(params)>.

    Multi-start local minimization: ``restarts`` L-BFGS-B runs from seeded
    uniform starting points in [-spread, spread], keeping the best optimum.
    Deterministic in ``seed``.  Returns (best parameters, best energy).
    """
    import scipy.optimize

    rng = np.random.default_rng(seed)

    def cost(params: np.ndarray) -> float:
        return expectation(ansatz.prepare(params), op)

    best_x: np.ndarray | None = None
    best_f = np.inf
    for _ in range(max(1, restarts)):
        start = rng.uniform(-spread, spread, ansatz.n_parameters)
        result = scipy.optimize.minimize(cost, start, method="L-BFGS-B")
        if result.fun < best_f:
            best_f = float(result.fun)
            best_x = np.asarray(result.x, dtype=float).copy()
    assert best_x is not None
    return best_x, best_f


# ---------------------------------------------------------------------------
# expectations


def pauli_expectation(state: Statevector, string: PauliString) -> float:
    if string.n_qubits != state.n_qubits:
        raise ValueError("string and state qubit counts differ")
    amps = state.amplitudes
    idx = np.arange(len(amps), dtype=np.int64)
    phase = 1.0j ** ((string.x_mask & string.z_mask).bit_count() % 4)
    signs = 1.0 - 2.0 * _parity(idx, string.z_mask)
    val = phase * np.vdot(amps[idx ^ string.x_mask], signs * amps)
    return float(val.real)


def expectation(state: Statevector, op: PauliSum) -> float:
    """<state| op |state>; terms sharing an X-pattern reuse the permuted vector."""
    if op.n_qubits != state.n_qubits:
        raise ValueError("operator and state qubit counts differ")
    amps = state.amplitudes
    idx = np.arange(len(amps), dtype=np.int64)
    by_x: dict[int, list[tuple[int, float]]] = {}
    for string, coeff in op.terms():
        by_x.setdefault(string.x_mask, []).append((string.z_mask, coeff))
    total = 0.0 + 0.0j
    for x_mask, entries in by_x.items():
        overlap = np.conj(amps[idx ^ x_mask]) * amps
        for z_mask, coeff in entries:
            phase = 1.0j ** ((x_mask & z_mask).bit_count() % 4)
            signs = 1.0 - 2.0 * _parity(idx, z_mask)
            total += coeff * phase * np.dot(signs, overlap)
    if abs(total.imag) > 1e-8:
        raise ValueError(f"expectation has imaginary residue {total.imag:.3e}")
    return float(total.real)


# ---------------------------------------------------------------------------
# ground states


def _sector_states(n_qubits: int, n_electrons: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    return idx[np.bitwise_count(idx) == n_electrons]


def _sector_matrix(op: PauliSum, sector: np.ndarray, n_electrons: int) -> scipy.sparse.csr_matrix:
    dim = len(sector)
    by_x: dict[int, list[tuple[int, float]]] = {}
    for string, coeff in op.terms():
        by_x.setdefault(string.x_mask, []).append((string.z_mask, coeff))
    rows, cols, vals = [], [], []
    for x_mask, entries in by_x.items():
        target = sector ^ x_mask
        valid = np.bitwise_count(target) == n_electrons
        src = np.nonzero(valid)[0]
        if len(src) == 0:
            continue
        tgt_states = target[valid]
        tgt = np.searchsorted(sector, tgt_states)
        amp = np.zeros(len(src), dtype=complex)
        for z_mask, coeff in entries:
            phase = 1.0j ** ((x_mask & z_mask).bit_count() % 4)
            amp += coeff * phase * (1.0 - 2.0 * _parity(sector[src], z_mask))
        # entry <target| P |source>
        rows.append(tgt)
        cols.append(src)
        vals.append(amp)
    if not rows:
        return scipy.sparse.csr_matrix((dim, dim), dtype=complex)
    return scipy.sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )


def ground_state(op: PauliSum, n_electrons: int) -> tuple[float, Statevector]:
    """Lowest eigenpair of op restricted to the n_electrons occupation sector.

    Uses iterative (Lanczos-type) diagonalization above the dense cutoff and
    verifies the eigenpair residual before returning.
    """
    n_qubits = op.n_qubits
    if not 0 <= n_electrons <= n_qubits:
        raise ValueError(f"n_electrons {n_electrons} out of range for {n_qubits} qubits")
    sector = _sector_states(n_qubits, n_electrons)
    mat = _sector_matrix(op, sector, n_electrons)
    herm_gap = abs(mat - mat.getH()).max()
    if herm_gap > 1e-9:
        raise ValueError(f"operator is not Hermitian on the sector (gap {herm_gap:.3e})")
    if len(sector) <= DENSE_EIG_LIMIT:
        dense = mat.toarray()
        vals, vecs = np.linalg.eigh(dense)
        energy, vec = float(vals[0]), vecs[:, 0]
    else:
        vals, vecs = scipy.sparse.linalg.eigsh(mat, k=1, which="SA", maxiter=5000)
        energy, vec = float(vals[0]), vecs[:, 0]
    residual = float(np.linalg.norm(mat @ vec - energy * vec))
    if residual > 1e-8:
        raise ValueError(f"eigenpair residual {residual:.3e} too large")
    full = np.zeros(1 << n_qubits, dtype=complex)
    full[sector] = vec
    return energy, Statevector(n_qubits, full)


# ---------------------------------------------------------------------------
# sampling


@dataclass
class GroupSample:
    """Finite-shot estimate of one commuting group's energy contribution."""

    label: str
    shots: int
    member_estimates: np.ndarray  # estimated <P_i> of the original strings
    energy: float  # sum_i c_i <P_i>_est


def sample_group(
    state: Statevector,
    group: CommutingGroup,
    shots: int,
    rng: np.random.Generator,
    diag: CliffordCircuit | None = None,
) -> GroupSample:
    """Measure all members of a fully-commuting group with shared shots."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if diag is None:
        diag = diagonalizing_circuit(group)
    members = diagonalized_members(group, diag)
    rotated = apply_clifford(state, diag)
    probs = rotated.probabilities()
    probs = probs / probs.sum()
    outcomes = rng.choice(len(probs), size=shots, p=probs)
    values, counts = np.unique(outcomes, return_counts=True)
    weights = counts / shots
    estimates = np.empty(len(members))
    energy = 0.0
    for k, ((image, folded_coeff), (orig, orig_coeff)) in enumerate(
        zip(members, group.members)
    ):
        parity = 1.0 - 2.0 * _parity(values, image.z_mask)
        diag_mean = float(np.dot(weights, parity))
        # folded_coeff = sign * orig_coeff, so <P>_est carries the sign back
        sign = 1.0 if folded_coeff == orig_coeff else -1.0
        if orig_coeff != 0.0:
            sign = folded_coeff / orig_coeff
        estimates[k] = sign * diag_mean
        energy += folded_coeff * diag_mean
    return GroupSample(group.label, shots, estimates, energy)


@dataclass
class SampledEnergies:
    """Repeated finite-shot energy estimates against an exact reference."""

    energies: np.ndarray
    exact: float
    total_shots: int

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.energies - self.exact)

    @property
    def mean_error(self) -> float:
        return float(np.mean(self.errors))

    @property
    def error_of_mean(self) -> float:
        """|average estimate - exact|: the averaged run's residual bias.

        Repetition averaging shrinks the sampling noise by 1/sqrt(reps),
        so this is the quantity the shot budget promises to keep below
        the target precision; single-run |errors| stay sqrt(groups)-fold
        larger because per-group budgets each admit precision-level noise.
        """
        return float(abs(np.mean(self.energies) - self.exact))

    @property
    def std_error(self) -> float:
        return float(np.std(self.energies))


def finite_sample_experiment(
    plan: list[tuple[CommutingGroup, Statevector, int]],
    repetitions: int,
    seed: int,
    constant: float = 0.0,
) -> SampledEnergies:
    """Sample every (group, state, shots) entry `repetitions` times.

    The exact reference is the sum of exact group expectations plus the
    constant, so the reported errors isolate sampling noise for the
    measured operator set.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    rng = np.random.default_rng(seed)
    prepared = []
    exact = constant
    for group, state, shots in plan:
        diag = diagonalizing_circuit(group)
        exact += expectation(state, group.to_sum())
        prepared.append((group, state, max(1, int(np.ceil(shots))), diag))
    energies = np.empty(repetitions)
    for rep in range(repetitions):
        total = constant
        for group, state, shots, diag in prepared:
            total += sample_group(state, group, shots, rng, diag).energy
        energies[rep] = total
    total_shots = sum(entry[2] for entry in prepared)
    return SampledEnergies(energies, exact, total_shots)
