"""
Dense statevector simulation of parameterized quantum circuits whose inputs
enter through Hamiltonian evolutions ``exp(-2 pi i alpha H)``.

Qubit 0 is the most significant bit of the computational-basis index, i.e.
the leftmost factor of every Kronecker product and the first character of a
Pauli string.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Sequence, Union

import numpy as np
from scipy.stats import unitary_group

MAX_QUBITS = 10
MAX_INPUTS = 8
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_S2 = 1 / np.sqrt(2)
NAMED_GATES = {
    "I": PAULI["I"],
    "X": PAULI["X"],
    "Y": PAULI["Y"],
    "Z": PAULI["Z"],
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "TDG": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


class CircuitError(ValueError):
    """Raised for malformed circuits, operators or parameter vectors."""


class EncodingDomainError(ValueError):
    """Raised when an arcsine-encoded slot receives an argument outside [-1, 1]."""

    def __init__(self, slot: int, value: float):
        self.slot = slot
        self.value = value
        super().__init__(
            f"arcsine encoding out of domain at slot {slot}: a*x+b = {value!r} not in [-1, 1]"
        )


def pauli_matrix(label: str) -> np.ndarray:
    """Kronecker product of single-qubit Pauli matrices, e.g. ``"ZIY"``."""
    label = label.upper()
    if not label or any(ch not in PAULI for ch in label):
        raise CircuitError(f"invalid Pauli string {label!r}")
    return reduce(np.kron, (PAULI[ch] for ch in label))


def _is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Hermitian generator of an evolution ``exp(-2 pi i alpha H)``.

    Build from a Pauli string with :meth:`from_pauli` (``H = P / 2``, eigenvalues
    +-1/2) or from a dense Hermitian matrix.
    """

    matrix: np.ndarray
    pauli: str | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise CircuitError(f"Hamiltonian must be square, got shape {m.shape}")
        n_q = int(round(np.log2(m.shape[0])))
        if 2**n_q != m.shape[0]:
            raise CircuitError(f"Hamiltonian dimension {m.shape[0]} is not a power of two")
        if not _is_hermitian(m):
            raise CircuitError("Hamiltonian is not Hermitian within 1e-12")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pauli(cls, label: str) -> "Hamiltonian":
        label = label.upper()
        return cls(pauli_matrix(label) / 2, pauli=label)

    @property
    def n_qubits(self) -> int:
        return int(round(np.log2(self.matrix.shape[0])))

    @cached_property
    def _eigh(self):
        return np.linalg.eigh(self.matrix)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigh[0]

    @cached_property
    def eigen_diffs(self) -> np.ndarray:
        """Sorted distinct eigenvalue differences (grouped within 1e-9)."""
        if self.pauli is not None:
            return np.array([0.0]) if set(self.pauli) == {"I"} else np.array([-1.0, 0.0, 1.0])
        ev = self.eigenvalues
        d = np.sort((ev[:, None] - ev[None, :]).ravel())
        keep = np.concatenate([[True], np.diff(d) > 1e-9])
        return d[keep]

    def integer_bandwidth(self) -> int:
        """Largest eigenvalue difference, provided all differences are integers."""
        d = self.eigen_diffs
        if np.max(np.abs(d - np.round(d))) > 1e-9:
            raise CircuitError(f"eigenvalue differences are not integers: {d}")
        return int(round(np.max(np.abs(d))))

    def propagator(self, alpha: float) -> np.ndarray:
        if self.pauli is not None:
            # P^2 = I for every Pauli string
            p = 2 * self.matrix
            return np.cos(np.pi * alpha) * np.eye(p.shape[0]) - 1j * np.sin(np.pi * alpha) * p
        w, v = self._eigh
        return (v * np.exp(-2j * np.pi * alpha * w)) @ v.conj().T


def evolve(state: np.ndarray, H: Hamiltonian, alpha: float) -> np.ndarray:
    """Return ``exp(-2 pi i alpha H) @ state``."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (H.matrix.shape[0],):
        raise CircuitError(
            f"state of shape {state.shape} does not match Hamiltonian dimension {H.matrix.shape[0]}"
        )
    if H.pauli is not None:
        return np.cos(np.pi * alpha) * state - 1j * np.sin(np.pi * alpha) * (2 * H.matrix @ state)
    w, v = H._eigh
    return v @ (np.exp(-2j * np.pi * alpha * w) * (v.conj().T @ state))


def _apply_local(state: np.ndarray, u: np.ndarray, qubits: Sequence[int], n_q: int) -> np.ndarray:
    k = len(qubits)
    psi = state.reshape([2] * n_q)
    psi = np.moveaxis(psi, list(qubits), list(range(k)))
    shape = psi.shape
    psi = (u @ psi.reshape(2**k, -1)).reshape(shape)
    return np.moveaxis(psi, list(range(k)), list(qubits)).reshape(-1)


@dataclass(frozen=True, eq=False)
class Fixed:
    """Parameter-free unitary acting on ``qubits`` (first listed = most significant)."""

    matrix: np.ndarray
    qubits: tuple[int, ...]
    name: str | None = None

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        qubits = tuple(int(q) for q in self.qubits)
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"repeated qubit in {qubits}")
        if u.shape != (2 ** len(qubits),) * 2:
            raise CircuitError(f"gate matrix shape {u.shape} does not act on {len(qubits)} qubit(s)")
        if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > UNITARY_TOL:
            raise CircuitError("fixed gate is not unitary within 1e-12")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)
        object.__setattr__(self, "qubits", qubits)

    @classmethod
    def named(cls, name: str, qubits: Sequence[int]) -> "Fixed":
        key = name.upper()
        if key not in NAMED_GATES:
            raise CircuitError(f"unknown gate {name!r}")
        return cls(NAMED_GATES[key], tuple(qubits), name=key)


@dataclass(frozen=True, eq=False)
class InputRotation:
    slot: int
    hamiltonian: Hamiltonian


@dataclass(frozen=True, eq=False)
class TrainingRotation:
    slot: int
    hamiltonian: Hamiltonian


GateOp = Union[Fixed, InputRotation, TrainingRotation]


@dataclass(frozen=True, eq=False)
class Circuit:
    """Ordered gate list, observable and initial pure state on ``n_qubits`` qubits.

    Input and training slots are numbered from 1; ``eta[j - 1]`` drives input
    slot ``j``.
    """

    n_qubits: int
    ops: tuple
    observable: np.ndarray
    initial_state: np.ndarray | None = None

    def __post_init__(self):
        n_q = int(self.n_qubits)
        if not 1 <= n_q <= MAX_QUBITS:
            raise CircuitError(f"qubit count {n_q} outside 1..{MAX_QUBITS}")
        dim = 2**n_q
        ops = tuple(self.ops)
        for i, op in enumerate(ops):
            if isinstance(op, Fixed):
                if max(op.qubits) >= n_q or min(op.qubits) < 0:
                    raise CircuitError(f"op {i}: qubits {op.qubits} outside register of {n_q}")
            elif isinstance(op, (InputRotation, TrainingRotation)):
                if op.hamiltonian.matrix.shape[0] != dim:
                    raise CircuitError(f"op {i}: Hamiltonian does not act on {n_q} qubits")
            else:
                raise CircuitError(f"op {i}: unsupported operation {type(op).__name__}")
        for kind, cap in ((InputRotation, MAX_INPUTS), (TrainingRotation, None)):
            slots = sorted(op.slot for op in ops if isinstance(op, kind))
            if slots != list(range(1, len(slots) + 1)):
                raise CircuitError(f"{kind.__name__} slots must be exactly 1..{len(slots)}, got {slots}")
            if cap is not None and len(slots) > cap:
                raise CircuitError(f"{len(slots)} input slots exceed the cap of {cap}")

        m = np.asarray(self.observable, dtype=complex)
        if m.shape != (dim, dim):
            raise CircuitError(f"observable shape {m.shape} does not match {n_q} qubits")
        if not _is_hermitian(m):
            raise CircuitError("observable is not Hermitian within 1e-12")
        if self.initial_state is None:
            psi = np.zeros(dim, dtype=complex)
            psi[0] = 1.0
        else:
            psi = np.asarray(self.initial_state, dtype=complex)
            if psi.shape != (dim,):
                raise CircuitError(f"initial state shape {psi.shape} does not match {n_q} qubits")
            if abs(np.linalg.norm(psi) - 1) > 1e-12:
                raise CircuitError("initial state is not normalized within 1e-12")
        m.setflags(write=False)
        psi.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "observable", m)
        object.__setattr__(self, "initial_state", psi)

    @property
    def n_inputs(self) -> int:
        return sum(isinstance(op, InputRotation) for op in self.ops)

    @property
    def n_training(self) -> int:
        return sum(isinstance(op, TrainingRotation) for op in self.ops)

    def input_hamiltonians(self) -> list[Hamiltonian]:
        by_slot = {op.slot: op.hamiltonian for op in self.ops if isinstance(op, InputRotation)}
        return [by_slot[j] for j in range(1, len(by_slot) + 1)]

    def final_state(self, eta: Sequence[float] = (), theta: Sequence[float] = ()) -> np.ndarray:
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if eta.shape != (self.n_inputs,):
            raise CircuitError(f"expected {self.n_inputs} input parameter(s), got {eta.shape[0]}")
        if theta.shape != (self.n_training,):
            raise CircuitError(f"expected {self.n_training} training parameter(s), got {theta.shape[0]}")
        psi = self.initial_state
        for op in self.ops:
            if isinstance(op, Fixed):
                psi = _apply_local(psi, op.matrix, op.qubits, self.n_qubits)
            elif isinstance(op, InputRotation):
                psi = evolve(psi, op.hamiltonian, eta[op.slot - 1])
            else:
                psi = evolve(psi, op.hamiltonian, theta[op.slot - 1])
        return psi


def evaluate(c: Circuit, eta: Sequence[float] = (), theta: Sequence[float] = ()) -> float:
    """Expectation value ``<psi(eta, theta)| M |psi(eta, theta)>``."""
    psi = c.final_state(eta, theta)
    val = np.vdot(psi, c.observable @ psi)
    if abs(val.imag) >= 1e-10:
        raise RuntimeError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)


@dataclass(frozen=True, eq=False)
class Encoding:
    """Affine input encoding ``eta_j(x) = phi(a_j x + b_j)``.

    ``activation="arcsine"`` uses ``eta_j = arcsin(a_j x + b_j) / (2 pi)`` so that
    ``sin(2 pi eta_j) = a_j x + b_j``.
    """

    activation: str
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.activation not in ("identity", "arcsine"):
            raise ValueError(f"unknown activation {self.activation!r}")
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.ndim != 1 or a.shape != b.shape:
            raise ValueError(f"a and b must be vectors of equal length, got {a.shape} and {b.shape}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def angles(self, x: float) -> np.ndarray:
        s = self.a * x + self.b
        if self.activation == "identity":
            return s
        bad = np.flatnonzero(np.abs(s) > 1)
        if bad.size:
            j = int(bad[0])
            raise EncodingDomainError(j + 1, float(s[j]))
        return np.arcsin(s) / (2 * np.pi)


def evaluate_encoded(c: Circuit, e: Encoding, theta: Sequence[float], x: float) -> float:
    if e.n != c.n_inputs:
        raise CircuitError(f"encoding has {e.n} slot(s), circuit has {c.n_inputs}")
    return evaluate(c, e.angles(x), theta)


def shift_gradient(c: Circuit, eta, theta, kind: str, j: int) -> float:
    """Partial derivative in slot ``j`` by the two-term parameter-shift rule.

    Exact only for two-level generators with eigenvalue difference 1 (Pauli
    strings over two); other generators are rejected.
    """
    eta = np.array(eta, dtype=float).reshape(-1)
    theta = np.array(theta, dtype=float).reshape(-1)
    if kind == "input":
        op_type, params = InputRotation, eta
    elif kind == "training":
        op_type, params = TrainingRotation, theta
    else:
        raise ValueError(f"slot kind must be 'input' or 'training', got {kind!r}")
    ops = [op for op in c.ops if isinstance(op, op_type) and op.slot == j]
    if not ops:
        raise CircuitError(f"no {kind} slot {j}")
    if not set(np.round(ops[0].hamiltonian.eigen_diffs, 9)) <= {-1.0, 0.0, 1.0}:
        raise CircuitError(f"{kind} slot {j}: shift rule needs eigenvalue differences in {{-1, 0, 1}}")

    def f(shift):
        p = params.copy()
        p[j - 1] += shift
        return evaluate(c, p, theta) if kind == "input" else evaluate(c, eta, p)

    return np.pi * (f(0.25) - f(-0.25))


# ---------------------------------------------------------------- JSON I/O


def _complex_array(obj, where: str, ndim: int) -> np.ndarray:
    """Parse nested lists whose leaves are numbers or ``[re, im]`` pairs."""

    def conv(v):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return complex(v)
        if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
            return complex(v[0], v[1])
        raise CircuitError(f"{where}: expected a number or [re, im] pair, got {v!r}")

    if not isinstance(obj, list) or not obj:
        raise CircuitError(f"{where}: expected a non-empty list")
    if ndim == 1:
        return np.array([conv(v) for v in obj])
    if not all(isinstance(row, list) and len(row) == len(obj[0]) for row in obj):
        raise CircuitError(f"{where}: expected a rectangular list of rows")
    return np.array([[conv(v) for v in row] for row in obj])


def _operator(spec, n_q: int, where: str, halve_pauli: bool) -> np.ndarray:
    if not isinstance(spec, dict):
        raise CircuitError(f"{where}: expected an object")
    if "pauli" in spec:
        label = spec["pauli"]
        if not isinstance(label, str) or len(label) != n_q:
            raise CircuitError(f"{where}.pauli: expected a string of length {n_q}, got {label!r}")
        try:
            p = pauli_matrix(label)
        except CircuitError as exc:
            raise CircuitError(f"{where}.pauli: {exc}") from None
        return p / 2 if halve_pauli else p
    if "matrix" in spec:
        m = _complex_array(spec["matrix"], f"{where}.matrix", 2)
        if m.shape != (2**n_q, 2**n_q):
            raise CircuitError(f"{where}.matrix: expected shape {(2**n_q,) * 2}, got {m.shape}")
        return m
    raise CircuitError(f"{where}: needs 'pauli' or 'matrix'")


def _rotation(spec, n_q: int, where: str):
    if not isinstance(spec, dict) or not isinstance(spec.get("slot"), int):
        raise CircuitError(f"{where}: needs an integer 'slot'")
    try:
        if "pauli" in spec:
            _operator(spec, n_q, where, True)
            h = Hamiltonian.from_pauli(spec["pauli"])
        else:
            h = Hamiltonian(_operator(spec, n_q, where, False))
    except CircuitError as exc:
        msg = str(exc)
        raise CircuitError(msg if msg.startswith(where) else f"{where}: {msg}") from None
    return spec["slot"], h


def circuit_from_dict(data: dict) -> Circuit:
    """Build a :class:`Circuit` from the JSON schema.

    ::

        {"qubits": 2,
         "ops": [{"fixed": {"gate": "H", "qubits": [0]}},
                 {"input": {"slot": 1, "pauli": "YI"}},
                 {"training": {"slot": 1, "pauli": "ZZ"}}],
         "observable": {"pauli": "ZI"},
         "initial": [[1, 0], 0, 0, 0]}

    Errors carry the offending field path, e.g. ``ops[2].input.pauli``.
    """
    if not isinstance(data, dict):
        raise CircuitError("top level: expected an object")
    n_q = data.get("qubits")
    if not isinstance(n_q, int) or not 1 <= n_q <= MAX_QUBITS:
        raise CircuitError(f"qubits: expected an integer in 1..{MAX_QUBITS}, got {n_q!r}")
    raw_ops = data.get("ops", [])
    if not isinstance(raw_ops, list):
        raise CircuitError("ops: expected a list")
    ops = []
    for i, spec in enumerate(raw_ops):
        where = f"ops[{i}]"
        if not isinstance(spec, dict) or len(spec) != 1:
            raise CircuitError(f"{where}: expected exactly one of 'fixed', 'input', 'training'")
        (kind, body), = spec.items()
        where = f"{where}.{kind}"
        if kind == "fixed":
            if not isinstance(body, dict):
                raise CircuitError(f"{where}: expected an object")
            qubits = body.get("qubits")
            try:
                if "gate" in body:
                    if not isinstance(qubits, list):
                        raise CircuitError("'qubits' list required for a named gate")
                    ops.append(Fixed.named(str(body["gate"]), qubits))
                elif "matrix" in body:
                    m = _complex_array(body["matrix"], f"{where}.matrix", 2)
                    ops.append(Fixed(m, tuple(qubits) if qubits is not None else tuple(range(n_q))))
                else:
                    raise CircuitError("needs 'gate' or 'matrix'")
            except CircuitError as exc:
                msg = str(exc)
                raise CircuitError(msg if msg.startswith(where) else f"{where}: {msg}") from None
        elif kind == "input":
            ops.append(InputRotation(*_rotation(body, n_q, where)))
        elif kind == "training":
            ops.append(TrainingRotation(*_rotation(body, n_q, where)))
        else:
            raise CircuitError(f"ops[{i}]: unknown operation kind {kind!r}")
    if "observable" not in data:
        raise CircuitError("observable: missing")
    m = _operator(data["observable"], n_q, "observable", False)
    init = data.get("initial")
    if init is not None:
        init = _complex_array(init, "initial", 1)
    try:
        return Circuit(n_q, tuple(ops), m, init)
    except CircuitError as exc:
        raise CircuitError(f"circuit: {exc}") from None


def load_circuit(path) -> Circuit:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CircuitError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return circuit_from_dict(data)


# ---------------------------------------------------------------- random circuits

_PAULI_LABELS = "IXYZ"


def random_pauli(rng: np.random.Generator, n_q: int) -> str:
    while True:
        label = "".join(rng.choice(list(_PAULI_LABELS), size=n_q))
        if set(label) != {"I"}:
            return label


def _random_layer(rng, n_q: int) -> list[Fixed]:
    if n_q == 1:
        return [Fixed(unitary_group.rvs(2, random_state=rng), (0,))]
    layer = []
    for _ in range(max(1, n_q // 2)):
        q = tuple(int(v) for v in rng.choice(n_q, size=2, replace=False))
        layer.append(Fixed(unitary_group.rvs(4, random_state=rng), q))
    return layer


def random_circuit(
    rng: np.random.Generator,
    n_qubits: int,
    n_inputs: int,
    n_training: int = 0,
    pauli_observable: bool = False,
) -> Circuit:
    """Random circuit: Haar 2-qubit layers between Pauli/2 input and training rotations."""
    kinds = ["input"] * n_inputs + ["training"] * n_training
    rng.shuffle(kinds)
    ops: list = _random_layer(rng, n_qubits)
    counters = {"input": 0, "training": 0}
    for kind in kinds:
        counters[kind] += 1
        h = Hamiltonian.from_pauli(random_pauli(rng, n_qubits))
        ops.append(InputRotation(counters[kind], h) if kind == "input" else TrainingRotation(counters[kind], h))
        ops.extend(_random_layer(rng, n_qubits))
    if pauli_observable:
        m = pauli_matrix(random_pauli(rng, n_qubits))
    else:
        g = rng.normal(size=(2**n_qubits,) * 2) + 1j * rng.normal(size=(2**n_qubits,) * 2)
        m = (g + g.conj().T) / 2
        m /= np.linalg.norm(m, 2)
    return Circuit(n_qubits, tuple(ops), m)
