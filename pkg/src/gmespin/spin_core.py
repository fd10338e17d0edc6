"""Dense linear algebra for small spin-1/2 systems.

Conventions
-----------
* Basis state ``|up>`` is index 0, ``|down>`` is index 1.
* Sites are numbered from 1 and site 1 is the most significant tensor
  factor, so ``|up down>`` has flat index 1 and ``|down up>`` index 2.
* States are never phase-canonicalised; everything exposed is phase
  invariant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence, Union

import numpy as np

from .errors import ContractError, InvalidStateError, SizeError

MAX_QUBITS = 14
MAX_DIM = 2**MAX_QUBITS
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
DENSITY_TOL = 1e-10

PAULI = {
    "0": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)


def _check_dim(dim):
    if dim > MAX_DIM:
        raise SizeError(f"Hilbert space dimension {dim} exceeds limit {MAX_DIM} ({MAX_QUBITS} qubits)")


@dataclass(frozen=True)
class PureState:
    """Normalised amplitude vector over a product of factor spaces."""

    amplitudes: np.ndarray
    dims: tuple = None

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dims = (2,) * int(round(np.log2(amp.size))) if self.dims is None else tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != amp.size:
            raise ContractError(f"amplitude length {amp.size} does not match dims {dims}")
        if any(d < 1 for d in dims):
            raise ContractError(f"invalid dims {dims}")
        _check_dim(amp.size)
        norm2 = float(np.vdot(amp, amp).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state not normalised: sum |amp|^2 = {norm2!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims=None):
        """Build a state after explicitly dividing by the norm."""
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amp / np.linalg.norm(amp), dims)

    @property
    def n_sites(self):
        return len(self.dims)

    @property
    def dim(self):
        return self.amplitudes.size

    def tensor(self):
        """Amplitudes reshaped to one axis per site."""
        return self.amplitudes.reshape(self.dims)

    def density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True)
class Operator:
    matrix: np.ndarray
    dims: tuple = None

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ContractError(f"operator must be square, got shape {mat.shape}")
        _check_dim(mat.shape[0])
        dims = (2,) * int(round(np.log2(mat.shape[0]))) if self.dims is None else tuple(self.dims)
        if int(np.prod(dims)) != mat.shape[0]:
            raise ContractError(f"operator size {mat.shape[0]} does not match dims {dims}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def is_hermitian(self, tol=HERMITIAN_TOL):
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def apply(self, state: PureState) -> np.ndarray:
        """Raw (unnormalised) amplitudes of ``op |state>``."""
        if state.dim != self.dim:
            raise ContractError("dimension mismatch between operator and state")
        return self.matrix @ state.amplitudes

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.matrix @ other.matrix, self.dims)
        return NotImplemented


@dataclass(frozen=True)
class SchmidtSpectrum:
    lambda1: float
    lambda2: float

    def __post_init__(self):
        if self.lambda1 < self.lambda2 or self.lambda2 < 0:
            raise ContractError("Schmidt coefficients must be sorted descending and non-negative")
        if abs(self.lambda1**2 + self.lambda2**2 - 1) > 1e-10:
            raise InvalidStateError("Schmidt coefficients do not satisfy l1^2 + l2^2 = 1")


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple = None
    tol: float = field(default=DENSITY_TOL, repr=False, compare=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ContractError(f"density matrix must be square, got shape {mat.shape}")
        _check_dim(mat.shape[0])
        dims = (2,) * int(round(np.log2(mat.shape[0]))) if self.dims is None else tuple(self.dims)
        if int(np.prod(dims)) != mat.shape[0]:
            raise ContractError(f"density size {mat.shape[0]} does not match dims {dims}")
        if np.max(np.abs(mat - mat.conj().T), initial=0.0) > self.tol:
            raise InvalidStateError("density matrix is not Hermitian")
        tr = np.trace(mat).real
        if abs(tr - 1) > self.tol:
            raise InvalidStateError(f"density matrix trace {tr!r} != 1")
        if np.linalg.eigvalsh(mat)[0] < -self.tol:
            raise InvalidStateError("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)


def tensor_product(items: Sequence[Union[PureState, Operator]]):
    """Kronecker product of states or operators, first item most significant."""
    items = list(items)
    if not items:
        raise ContractError("tensor_product needs at least one factor")
    if all(isinstance(x, PureState) for x in items):
        dims = tuple(d for x in items for d in x.dims)
        _check_dim(int(np.prod(dims)))
        return PureState(reduce(np.kron, [x.amplitudes for x in items]), dims)
    if all(isinstance(x, Operator) for x in items):
        dims = tuple(d for x in items for d in x.dims)
        _check_dim(int(np.prod(dims)))
        return Operator(reduce(np.kron, [x.matrix for x in items]), dims)
    raise ContractError("tensor_product factors must be all states or all operators")


def qubit(a, b) -> PureState:
    """Single-qubit state ``a|up> + b|down>``."""
    return PureState([a, b])


def qubit_from_angles(theta, phi) -> PureState:
    return PureState([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def product_state(qubits: Sequence) -> PureState:
    """Product of single-qubit states given as PureState or (a, b) pairs."""
    factors = [q if isinstance(q, PureState) else qubit(*q) for q in qubits]
    return tensor_product(factors)


def pauli_op(site: int, axis: str, n_sites: int) -> Operator:
    """Pauli ``axis`` (x, y, z or 0) on ``site`` (1-based), identity elsewhere."""
    return pauli_string({site: axis}, n_sites)


def pauli_string(axes, n_sites: int) -> Operator:
    """Dense operator for a product of single-site Paulis.

    ``axes`` maps 1-based site to axis, or is a string of length ``n_sites``.
    """
    if isinstance(axes, str):
        if len(axes) != n_sites:
            raise ContractError(f"Pauli string {axes!r} does not have {n_sites} letters")
        axes = {i + 1: a for i, a in enumerate(axes)}
    if n_sites < 1:
        raise ContractError("n_sites must be positive")
    if n_sites > MAX_QUBITS:
        raise SizeError(f"{n_sites} qubits exceeds limit {MAX_QUBITS}")
    for site, axis in axes.items():
        if not 1 <= site <= n_sites:
            raise ContractError(f"site {site} out of range 1..{n_sites}")
        if axis not in PAULI:
            raise ContractError(f"unknown Pauli axis {axis!r}")
    mats = [PAULI[axes.get(i, "0")] for i in range(1, n_sites + 1)]
    return Operator(reduce(np.kron, mats))


def expectation(state: Union[PureState, DensityMatrix], op: Operator) -> float:
    """Real expectation value of a Hermitian operator."""
    if not op.is_hermitian():
        raise ContractError("expectation requires a Hermitian operator")
    if state.dim != op.dim:
        raise ContractError(f"dimension mismatch: state {state.dim}, operator {op.dim}")
    if isinstance(state, PureState):
        val = np.vdot(state.amplitudes, op.matrix @ state.amplitudes)
    else:
        val = np.einsum("ij,ji->", op.matrix, state.matrix)
    if abs(val.imag) > 1e-10:
        raise ContractError(f"expectation has imaginary residue {val.imag!r}")
    return float(val.real)


def _apply_local(state: PureState, site: int, mat: np.ndarray) -> np.ndarray:
    t = np.tensordot(mat, state.tensor(), axes=([1], [site - 1]))
    return np.moveaxis(t, 0, site - 1).reshape(-1)


def mean_spin(state: PureState, site: int = 1) -> np.ndarray:
    """``(<sx>, <sy>, <sz>)`` of a qubit site."""
    if not 1 <= site <= state.n_sites:
        raise ContractError(f"site {site} out of range 1..{state.n_sites}")
    if state.dims[site - 1] != 2:
        raise ContractError(f"site {site} is not a qubit (dim {state.dims[site - 1]})")
    amp = state.amplitudes
    return np.array([np.vdot(amp, _apply_local(state, site, PAULI[a])).real for a in "xyz"])


def reduced_density(state: PureState, keep) -> DensityMatrix:
    """Partial trace onto the (1-based) sites in ``keep``."""
    keep = sorted(set([keep] if isinstance(keep, int) else keep))
    n = state.n_sites
    if not keep or len(keep) >= n:
        raise ContractError("keep must be a nonempty proper subset of the sites")
    if keep[0] < 1 or keep[-1] > n:
        raise ContractError(f"sites {keep} out of range 1..{n}")
    axes = [k - 1 for k in keep]
    rest = [i for i in range(n) if i not in axes]
    t = np.transpose(state.tensor(), axes + rest)
    dk = int(np.prod([state.dims[i] for i in axes]))
    m = t.reshape(dk, -1)
    rho = m @ m.conj().T
    return DensityMatrix(rho, tuple(state.dims[i] for i in axes))


def eig2_hermitian(m: np.ndarray):
    """Eigenvalues of a 2x2 Hermitian matrix, descending, by the quadratic formula."""
    a, d = m[0, 0].real, m[1, 1].real
    half_gap = np.hypot((a - d) / 2, abs(m[0, 1]))
    mid = (a + d) / 2
    return mid + half_gap, mid - half_gap


def schmidt_spectrum(state: PureState) -> SchmidtSpectrum:
    """Schmidt coefficients for the cut site 1 | rest (site 1 must be a qubit)."""
    if state.dims[0] != 2 or state.n_sites < 2:
        raise ContractError("schmidt_spectrum needs a qubit first factor and a nonempty rest")
    m = state.amplitudes.reshape(2, -1)
    hi, lo = eig2_hermitian(m @ m.conj().T)
    lo = max(lo, 0.0)
    return SchmidtSpectrum(float(np.sqrt(hi)), float(np.sqrt(lo)))


def random_state(dims, rng) -> PureState:
    """Haar-random pure state."""
    dims = tuple(dims)
    d = int(np.prod(dims))
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState(z / np.linalg.norm(z), dims)


def named_state(name: str) -> PureState:
    """bell, ghz:N, all-up:N or product:up,down,plus,minus,..."""
    name = name.strip().lower()
    s = 1 / np.sqrt(2)
    singles = {
        "up": UP, "down": DOWN,
        "plus": np.array([s, s], dtype=complex), "minus": np.array([s, -s], dtype=complex),
        "+": np.array([s, s], dtype=complex), "-": np.array([s, -s], dtype=complex),
    }
    head, _, arg = name.partition(":")
    if head == "bell":
        return PureState([0, s, s, 0])
    if head in ("ghz", "cat"):
        n = int(arg) if arg else 2
        amp = np.zeros(2**n, dtype=complex)
        amp[0] = amp[-1] = s
        return PureState(amp)
    if head == "all-up":
        n = int(arg) if arg else 2
        return product_state([UP] * n)
    if head == "product":
        try:
            return product_state([singles[p.strip()] for p in arg.split(",")])
        except KeyError as exc:
            raise ContractError(f"unknown single-qubit state {exc.args[0]!r}") from None
    raise ContractError(f"unknown named state {name!r}")
