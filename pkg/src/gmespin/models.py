"""Dynamical case studies: Ising chain, two spins in a fluctuating field, decohering cat.

Units: hbar = 1, the Ising coupling is ``J = omega`` and the transverse
field enters as ``B = Omega / 2``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

from . import kernels
from .errors import ContractError, InvalidStateError, QuadratureError, SizeError
from .gme import (
    ALIGNED,
    ANTI_ALIGNED,
    BlochVector,
    GmeResult,
    SubspaceKind,
    effective_bloch,
    gme_pure_mean_spin,
    gme_rank2,
)
from .spin_core import MAX_QUBITS, DensityMatrix, PureState, pauli_string, product_state

QUAD_TOL = 1e-10
HERMITE_NODES = 96
HERMITE_CHECK_NODES = 128
MAX_HERMITE_NODES = 256  # numpy hermgauss overflows beyond ~300 nodes
# beyond the Hermite cap: composite Gauss-Legendre on |x| <= LEGENDRE_HALF_WIDTH
LEGENDRE_HALF_WIDTH = 9.0
LEGENDRE_ORDER = 16
MAX_LEGENDRE_PANELS = 2**14


# ---------------------------------------------------------------- distributions


@dataclass(frozen=True)
class DeltaPair:
    """Field +chi or -chi with probability 1/2 each."""

    chi: float

    def __post_init__(self):
        if not self.chi >= 0:
            raise ContractError(f"chi must be >= 0, got {self.chi!r}")


@dataclass(frozen=True)
class Gaussian:
    """Density ``tau / sqrt(pi) * exp(-tau^2 Omega^2)``."""

    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ContractError(f"tau must be > 0, got {self.tau!r}")


@dataclass(frozen=True)
class Empirical:
    values: tuple
    weights: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        w = tuple(float(x) for x in self.weights)
        if len(v) != len(w) or not v:
            raise ContractError("empirical distribution needs equally many values and weights")
        if any(x < 0 for x in w) or abs(sum(w) - 1) > 1e-10:
            raise ContractError("empirical weights must be non-negative and sum to 1")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_samples(cls, samples):
        samples = tuple(float(x) for x in samples)
        return cls(samples, (1.0 / len(samples),) * len(samples))

    @classmethod
    def from_csv(cls, path):
        """Two-column CSV (Omega, weight); an optional header row is skipped.

        Weights are divided by their sum.
        """
        values, weights = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    values.append(float(row[0]))
                    weights.append(float(row[1]))
                except (ValueError, IndexError):
                    if values:
                        raise ContractError(f"bad empirical row {row!r} in {path}") from None
        total = sum(weights)
        if not values or total <= 0:
            raise ContractError(f"no usable rows in {path}")
        return cls(values, [w / total for w in weights])


FieldDistribution = (DeltaPair, Gaussian, Empirical)


@lru_cache(maxsize=None)
def _hermite(n):
    x, w = hermgauss(n)
    return x, w / np.sqrt(np.pi)


@lru_cache(maxsize=None)
def _legendre_panels(panels):
    x, w = leggauss(LEGENDRE_ORDER)
    edges = np.linspace(-LEGENDRE_HALF_WIDTH, LEGENDRE_HALF_WIDTH, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel() * np.exp(-nodes**2) / np.sqrt(np.pi)
    return nodes, weights


def _weighted_sum(weights, values):
    # divided by the zeroth moment so that <1> == 1 exactly
    values = np.asarray(values)
    shaped = weights.reshape((-1,) + (1,) * (values.ndim - 1))
    # same dtype and layout as the numerator so constant entries divide exactly
    return np.sum(shaped * values, axis=0) / np.sum(shaped * np.ones_like(values), axis=0)


def _maxdiff(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _gaussian_average(f, tau, nodes, check_nodes, tol):
    """Gauss-Hermite with node doubling, then composite Gauss-Legendre.

    Both stages accept a result only when two successive rules agree to
    ``tol``; Hermite is capped at MAX_HERMITE_NODES because highly
    oscillatory integrands (large t) converge only with impractical counts.
    """
    n, m = nodes, check_nodes
    history = []
    while m <= MAX_HERMITE_NODES:
        xa, wa = _hermite(n)
        xb, wb = _hermite(m)
        ra = _weighted_sum(wa, f(xa / tau))
        rb = _weighted_sum(wb, f(xb / tau))
        diff = _maxdiff(ra, rb)
        history.append(("hermite", n, m, diff))
        if diff <= tol:
            return rb, history
        n, m = 2 * n, 2 * m
    panels = 64
    xa, wa = _legendre_panels(panels)
    ra = _weighted_sum(wa, f(xa / tau))
    while panels < MAX_LEGENDRE_PANELS:
        xb, wb = _legendre_panels(2 * panels)
        rb = _weighted_sum(wb, f(xb / tau))
        diff = _maxdiff(ra, rb)
        history.append(("legendre", panels, 2 * panels, diff))
        if diff <= tol:
            return rb, history
        panels, ra = 2 * panels, rb
    raise QuadratureError(
        f"Gaussian average did not converge (last node-doubling mismatch {history[-1][3]:.3g})",
        best=rb,
        diagnostics={"history": history},
    )


def average(f: Callable, dist, nodes: int = HERMITE_NODES, check_nodes: int = HERMITE_CHECK_NODES, tol: float = QUAD_TOL):
    """``<f(Omega)>`` over a field distribution.

    ``f`` must be vectorised: given a 1-d array of field values it returns an
    array whose first axis runs over those values (scalar or array-valued).
    """
    if isinstance(dist, DeltaPair):
        vals = np.asarray(f(np.array([dist.chi, -dist.chi])))
        out = 0.5 * (vals[0] + vals[1])
    elif isinstance(dist, Empirical):
        out = _weighted_sum(np.array(dist.weights), f(np.array(dist.values)))
    elif isinstance(dist, Gaussian):
        out, _ = _gaussian_average(f, dist.tau, nodes, check_nodes, tol)
    else:
        raise ContractError(f"unsupported distribution {dist!r}")
    out = np.asarray(out)
    return out.item() if out.ndim == 0 else out


# ---------------------------------------------------------------- Ising chain


@dataclass(frozen=True)
class ChainParams:
    """Open Ising chain ``H = omega * sum_i X_i X_{i+1}`` from a product state.

    ``initial`` is a tuple of per-site amplitude pairs ``(a_i, b_i)``.
    """

    n_sites: int
    omega: float
    initial: tuple

    def __post_init__(self):
        if self.n_sites < 2:
            raise ContractError("chain needs at least two sites")
        if self.n_sites > MAX_QUBITS:
            raise SizeError(f"{self.n_sites} sites exceeds limit {MAX_QUBITS}")
        init = tuple((complex(a), complex(b)) for a, b in self.initial)
        if len(init) != self.n_sites:
            raise ContractError(f"need {self.n_sites} site states, got {len(init)}")
        for a, b in init:
            if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-12:
                raise InvalidStateError(f"site state ({a}, {b}) not normalised")
        object.__setattr__(self, "initial", init)

    @classmethod
    def from_angles(cls, omega, angles):
        """Site states ``cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>``."""
        init = [(np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)) for th, ph in angles]
        return cls(len(init), omega, init)

    @classmethod
    def named(cls, name, n_sites, omega, rng=None):
        if name == "all-up":
            return cls(n_sites, omega, [(1, 0)] * n_sites)
        if name in ("x-plus", "all-plus"):
            s = 1 / np.sqrt(2)
            return cls(n_sites, omega, [(s, s)] * n_sites)
        if name == "random":
            rng = np.random.default_rng(0) if rng is None else rng
            th = np.arccos(rng.uniform(-1, 1, n_sites))
            ph = rng.uniform(0, 2 * np.pi, n_sites)
            return cls.from_angles(omega, list(zip(th, ph)))
        raise ContractError(f"unknown chain initial state {name!r}")

    def initial_state(self) -> PureState:
        return product_state(self.initial)


def _site_spin(a, b):
    ab = np.conj(a) * b
    return np.array([2 * ab.real, 2 * ab.imag, abs(a) ** 2 - abs(b) ** 2])


def chain_mean_spin_closed(params: ChainParams, t: float) -> np.ndarray:
    """Mean spin of site 1 at time t from the initial site-1 and site-2 spins."""
    s1 = _site_spin(*params.initial[0])
    s2x = _site_spin(*params.initial[1])[0]
    c, s = np.cos(2 * params.omega * t), np.sin(2 * params.omega * t)
    return np.array([s1[0], c * s1[1] - s * s1[2] * s2x, c * s1[2] + s * s1[1] * s2x])


def chain_gme_closed(params: ChainParams, t: float) -> GmeResult:
    s1 = _site_spin(*params.initial[0])
    s2 = _site_spin(*params.initial[1])
    # site spins are unit vectors, so 1 - |<sigma_1>(t)|^2 reduces to this product;
    # written this way exact zeros stay exact
    defect = np.sin(2 * params.omega * t) ** 2 * (s2[1] ** 2 + s2[2] ** 2) * (s1[1] ** 2 + s1[2] ** 2)
    defect = min(max(defect, 0.0), 1.0)
    value = 0.5 * defect / (1 + np.sqrt(1 - defect))
    return GmeResult(value, "mean_spin", {"mean_spin": chain_mean_spin_closed(params, t)})


def chain_state(params: ChainParams, t: float) -> PureState:
    """Exact state at time t: every bond gate commutes, so no time stepping."""
    wt = params.omega * t
    psi = kernels.apply_ising_chain(params.initial_state().amplitudes, params.n_sites, np.cos(wt), np.sin(wt))
    return PureState(psi)


def chain_gme_numeric(params: ChainParams, t: float) -> GmeResult:
    return gme_pure_mean_spin(chain_state(params, t), 1)


# ---------------------------------------------------------------- fluctuating field


@dataclass(frozen=True)
class FluctParams:
    """Ensemble of two-spin systems ``H = (Omega/2)(Z1 + Z2) + omega X1 X2``."""

    omega: float
    distribution: object
    initial: str = "aligned"

    def __post_init__(self):
        if not isinstance(self.distribution, FieldDistribution):
            raise ContractError(f"unsupported distribution {self.distribution!r}")
        if self.initial not in ("aligned", "anti_aligned"):
            raise ContractError("initial must be 'aligned' (|up up>) or 'anti_aligned' (|down up>)")

    @property
    def kind(self) -> SubspaceKind:
        return ALIGNED if self.initial == "aligned" else ANTI_ALIGNED


def _aligned_bloch_integrand(omega, t):
    def f(field):
        field = np.asarray(field, dtype=float)
        w0 = np.sqrt(omega**2 + field**2)
        ratio = np.divide(omega, w0, out=np.zeros_like(w0), where=w0 > 0)
        sin2 = np.sin(w0 * t) ** 2
        return np.stack(
            [
                2 * field * omega * np.divide(sin2, w0**2, out=np.zeros_like(w0), where=w0 > 0),
                -ratio * np.sin(2 * w0 * t),
                1 - 2 * ratio**2 * sin2,
            ],
            axis=-1,
        )

    return f


def fluct_bloch(params: FluctParams, t: float) -> BlochVector:
    """Ensemble Bloch vector on the subspace the initial state lives in."""
    if params.initial == "anti_aligned":
        # field drops out; |down up> = |D> rotates under omega * Sigma^x
        wt2 = 2 * params.omega * t
        return BlochVector(0.0, np.sin(wt2), -np.cos(wt2))
    a = average(_aligned_bloch_integrand(params.omega, t), params.distribution)
    return BlochVector.from_array(a)


def fluct_gme(params: FluctParams, t: float) -> GmeResult:
    a = fluct_bloch(params, t)
    res = gme_rank2(a)
    return GmeResult(res.value, "bloch_closed_form", {"bloch": a})


def delta_pair_gme(chi: float, omega: float, t: float) -> float:
    """Closed form for the +-chi field: E = (1 - sqrt(1 - omega^2 sin^2(2 W t) / W^2)) / 2, W^2 = chi^2 + omega^2."""
    w2 = chi**2 + omega**2
    if w2 == 0:
        return 0.0
    s = omega**2 * np.sin(2 * np.sqrt(w2) * t) ** 2 / w2
    return float(0.5 * s / (1 + np.sqrt(1 - s)))


def gaussian_asymptotic_gme(omega: float, tau: float, t: float) -> float:
    """Leading large-t behaviour for the Gaussian field law."""
    return omega * tau**2 / (4 * t) * np.sin(2 * omega * t + np.pi / 4) ** 2


_ZZ = pauli_string("z0", 2).matrix + pauli_string("0z", 2).matrix
_XX = pauli_string("xx", 2).matrix


def _evolved_projectors(omega, t, psi0):
    def f(field):
        field = np.asarray(field, dtype=float)
        h = 0.5 * field[:, None, None] * _ZZ.real[None] + omega * _XX.real[None]
        lam, vec = np.linalg.eigh(h)
        coef = np.einsum("nji,j->ni", vec, psi0) * np.exp(-1j * lam * t)
        psi = np.einsum("nij,nj->ni", vec, coef)
        return np.einsum("ni,nj->nij", psi, psi.conj())

    return f


def fluct_density(params: FluctParams, t: float) -> DensityMatrix:
    """Ensemble density matrix from explicit 4x4 evolution at each field value."""
    psi0 = np.zeros(4, dtype=complex)
    psi0[0 if params.initial == "aligned" else 2] = 1  # |up up> or |down up>
    rho = average(_evolved_projectors(params.omega, t, psi0), params.distribution)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / np.trace(rho).real)


def fluct_gme_numeric(params: FluctParams, t: float) -> GmeResult:
    a = effective_bloch(fluct_density(params, t), params.kind)
    res = gme_rank2(a)
    return GmeResult(res.value, "bloch_closed_form", {"bloch": a})


# ---------------------------------------------------------------- Schroedinger cat


@dataclass(frozen=True)
class CatParams:
    """N-spin cat (|up..up> + |down..down>)/sqrt(2) in independent Gaussian fields."""

    n_sites: int
    tau: float

    def __post_init__(self):
        if self.n_sites < 1:
            raise ContractError("cat needs at least one spin")
        if self.n_sites > MAX_QUBITS:
            raise SizeError(f"{self.n_sites} sites exceeds limit {MAX_QUBITS}")
        if not self.tau > 0:
            raise ContractError("tau must be > 0")

    @property
    def kind(self) -> SubspaceKind:
        return SubspaceKind.aligned_n(self.n_sites, 1)


def cat_gme(params: CatParams, t: float) -> GmeResult:
    x = np.exp(-params.n_sites * t**2 / (2 * params.tau**2))
    return GmeResult(0.5 * x / (1 + np.sqrt(1 - x)), "bloch_closed_form")


def cat_density(params: CatParams, t: float) -> DensityMatrix:
    """Dense 2^N density matrix; coherence is the N-th power of the field characteristic function."""
    coherence = average(lambda field: np.exp(-1j * field * t), Gaussian(params.tau)) ** params.n_sites
    rho2 = 0.5 * np.array([[1, coherence], [np.conj(coherence), 1]])
    return params.kind.embed(rho2)


def cat_gme_assembled(params: CatParams, t: float) -> GmeResult:
    a = effective_bloch(cat_density(params, t), params.kind)
    res = gme_rank2(a)
    return GmeResult(res.value, "bloch_closed_form", {"bloch": a})
