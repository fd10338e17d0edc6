"""Geometric measure of entanglement (GME) of a spin-1/2 with its environment.

Closed forms
------------
* pure state, spin with anything:      E = (1 - |<sigma>|) / 2
* pure state, Schmidt form:            E = 1 - lambda_1^2
* rank-2 state on a two-level subspace E = (1 - sqrt(1 - ax^2 - ay^2)) / 2

Each closed form is paired with a brute-force oracle (product-state
maximisation, convex-roof minimisation, constrained cord maximisation) so
the formulas can be checked numerically.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np
from scipy import optimize

from . import kernels
from .errors import ContractError, ConvergenceError, InvalidStateError, SubspaceError
from .spin_core import (
    DensityMatrix,
    PureState,
    expectation,
    mean_spin,
    pauli_op,
    pauli_string,
    schmidt_spectrum,
)

BLOCH_CLAMP_TOL = 1e-9
LEAKAGE_TOL = 1e-8

METHODS = (
    "mean_spin",
    "schmidt",
    "bloch_closed_form",
    "correlators",
    "oracle_product_min",
    "oracle_convex_roof",
)


@dataclass(frozen=True)
class GmeResult:
    value: float
    method: str
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ContractError(f"unknown method {self.method!r}")
        v = float(self.value)
        if v < -1e-12 or v > 0.5 + 1e-12:
            raise InvalidStateError(f"entanglement {v!r} outside [0, 1/2]")
        object.__setattr__(self, "value", min(max(v, 0.0), 0.5))

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class BlochVector:
    """Effective Bloch vector of a rank-2 state, ``rho = (1 + a.Sigma) / 2``.

    Norms in ``(1, 1 + 1e-9]`` are scaled back to the unit sphere (quadrature
    round-off); anything larger is rejected.
    """

    ax: float
    ay: float
    az: float

    def __post_init__(self):
        vec = np.array([self.ax, self.ay, self.az], dtype=float)
        if not np.all(np.isfinite(vec)):
            raise InvalidStateError(f"non-finite Bloch vector {vec}")
        norm = float(np.linalg.norm(vec))
        if norm > 1 + BLOCH_CLAMP_TOL:
            raise InvalidStateError(f"Bloch vector norm {norm!r} exceeds 1")
        if norm > 1:
            vec = vec / norm
        object.__setattr__(self, "ax", float(vec[0]))
        object.__setattr__(self, "ay", float(vec[1]))
        object.__setattr__(self, "az", float(vec[2]))

    @classmethod
    def from_array(cls, a):
        return cls(*(float(x) for x in a))

    def as_array(self):
        return np.array([self.ax, self.ay, self.az])

    @property
    def norm(self):
        return float(np.sqrt(self.ax**2 + self.ay**2 + self.az**2))

    @property
    def theta(self):
        """Polar angle between the vector and the z axis (0 for a = 0)."""
        return float(np.arctan2(np.hypot(self.ax, self.ay), self.az))

    def density2(self):
        """2x2 density matrix in subspace coordinates."""
        return 0.5 * np.array(
            [[1 + self.az, self.ax - 1j * self.ay], [self.ax + 1j * self.ay, 1 - self.az]]
        )


@dataclass(frozen=True)
class SubspaceKind:
    """Two-level subspace span{|U>, |D>} and the spin whose GME is measured.

    ``anti_aligned``: |U> = |up down>, |D> = |down up>
    ``aligned``:      |U> = |up up>,   |D> = |down down>
    ``aligned_n``:    |U> = |up...up>, |D> = |down...down>, distinguished ``site``
    """

    variant: str
    n_sites: int = 2
    site: int = 1

    def __post_init__(self):
        if self.variant not in ("anti_aligned", "aligned", "aligned_n"):
            raise ContractError(f"unknown subspace variant {self.variant!r}")
        if self.variant != "aligned_n" and (self.n_sites, self.site) != (2, 1):
            raise ContractError("two-spin subspaces have n_sites=2, site=1")
        # n_sites == 1 is the formal single-spin limit where Sigma reduces to sigma
        if self.n_sites < 1 or not 1 <= self.site <= self.n_sites:
            raise ContractError(f"need 1 <= site <= n_sites, got {self.n_sites}, {self.site}")

    @classmethod
    def anti_aligned(cls):
        return cls("anti_aligned")

    @classmethod
    def aligned(cls):
        return cls("aligned")

    @classmethod
    def aligned_n(cls, n_sites, site=1):
        return cls("aligned_n", n_sites, site)

    @property
    def dim(self):
        return 2**self.n_sites

    def basis_indices(self):
        if self.variant == "anti_aligned":
            return 1, 2
        return 0, self.dim - 1

    def basis(self):
        """Isometry (dim x 2) embedding subspace coordinates into the full space."""
        b = np.zeros((self.dim, 2), dtype=complex)
        up, down = self.basis_indices()
        b[up, 0] = b[down, 1] = 1
        return b

    def sigma_strings(self):
        """Pauli strings of the effective operators Sigma^x, Sigma^y, Sigma^z."""
        n, k = self.n_sites, self.site - 1
        xs = ["x"] * n
        ys = ["x"] * n
        zs = ["0"] * n
        ys[k] = "y"
        zs[k] = "z"
        return {"x": "".join(xs), "y": "".join(ys), "z": "".join(zs)}

    def sigma_ops(self):
        return {ax: pauli_string(s, self.n_sites) for ax, s in self.sigma_strings().items()}

    def spin_restrictions(self):
        """Distinguished spin's Pauli matrices compressed to the subspace (3x2x2)."""
        b = self.basis()
        return np.array([b.conj().T @ pauli_op(self.site, ax, self.n_sites).matrix @ b for ax in "xyz"])

    def embed(self, rho2) -> DensityMatrix:
        if isinstance(rho2, BlochVector):
            rho2 = rho2.density2()
        b = self.basis()
        return DensityMatrix(b @ np.asarray(rho2) @ b.conj().T)

    def embed_state(self, c) -> PureState:
        return PureState(self.basis() @ np.asarray(c, dtype=complex))

    def restrict(self, rho: DensityMatrix) -> np.ndarray:
        """Compress to subspace coordinates after checking support."""
        check_support(rho, self)
        b = self.basis()
        return b.conj().T @ rho.matrix @ b


ANTI_ALIGNED = SubspaceKind.anti_aligned()
ALIGNED = SubspaceKind.aligned()


def check_support(rho: DensityMatrix, kind: SubspaceKind) -> float:
    if rho.dim != kind.dim:
        raise ContractError(f"density dimension {rho.dim} does not match subspace kind ({kind.dim})")
    idx = list(kind.basis_indices())
    inside = np.zeros_like(rho.matrix)
    inside[np.ix_(idx, idx)] = rho.matrix[np.ix_(idx, idx)]
    leak = float(np.max(np.abs(rho.matrix - inside)))
    if leak > LEAKAGE_TOL:
        raise SubspaceError(f"density matrix leaks {leak:.3g} outside the {kind.variant} subspace")
    return leak


def _pure_value(spin_norm):
    return 0.5 * (1.0 - min(spin_norm, 1.0))


def gme_pure_mean_spin(state: PureState, site: int = 1) -> GmeResult:
    s = mean_spin(state, site)
    norm = float(np.linalg.norm(s))
    return GmeResult(_pure_value(norm), "mean_spin", {"mean_spin": s})


def gme_pure_schmidt(state: PureState) -> GmeResult:
    spec = schmidt_spectrum(state)
    return GmeResult(1.0 - spec.lambda1**2, "schmidt", {"spectrum": spec})


def gme_pure_oracle(state: PureState, n_theta: int = 64, n_phi: int = 128, tol: float = 1e-10, n_refine: int = 3) -> GmeResult:
    """Direct maximisation of |<chi (x) phi|psi>|^2 over product states.

    For a fixed qubit state chi the best phi is the normalised conditional
    vector, so only the Bloch sphere of chi is searched: a theta-phi grid
    followed by Nelder-Mead from the best ``n_refine`` grid cells.
    """
    if state.dims[0] != 2 or state.n_sites < 2:
        raise ContractError("product oracle needs a qubit first factor")
    mat = state.amplitudes.reshape(2, -1)
    m0 = np.ascontiguousarray(mat[0])
    m1 = np.ascontiguousarray(mat[1])
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    grid = kernels.overlap_grid(m0, m1, thetas, phis)
    grid_max = float(grid.max())

    def neg(x):
        return -kernels.overlap_point(m0, m1, x[0], x[1])

    order = np.argsort(grid, axis=None)[::-1][:n_refine]
    best, best_x, failures = -np.inf, None, []
    for flat in order:
        i, j = np.unravel_index(flat, grid.shape)
        res = optimize.minimize(
            neg, [thetas[i], phis[j]], method="Nelder-Mead",
            options={"xatol": tol, "fatol": 1e-15, "maxiter": 4000},
        )
        if not res.success:
            failures.append(res.message)
            continue
        if -res.fun > best:
            best, best_x = -res.fun, res.x
    if best_x is None or best < grid_max - tol:
        raise ConvergenceError(
            "product-state refinement did not converge",
            best=1.0 - grid_max,
            diagnostics={"grid_max": grid_max, "failures": failures},
        )
    return GmeResult(
        1.0 - min(best, 1.0),
        "oracle_product_min",
        {"max_overlap": best, "grid_max": grid_max, "theta": best_x[0], "phi": best_x[1]},
    )


def effective_bloch(rho: DensityMatrix, kind: SubspaceKind) -> BlochVector:
    """``(<Sigma^x>, <Sigma^y>, <Sigma^z>)`` for the effective Pauli operators of ``kind``."""
    check_support(rho, kind)
    ops = kind.sigma_ops()
    return BlochVector(*(expectation(rho, ops[ax]) for ax in "xyz"))


def _stable_half_gap(s):
    # (1 - sqrt(1 - s)) / 2 without cancellation for small s
    return 0.5 * s / (1.0 + np.sqrt(1.0 - s))


def gme_rank2(a: BlochVector) -> GmeResult:
    if not isinstance(a, BlochVector):
        a = BlochVector.from_array(a)
    s = min(a.ax**2 + a.ay**2, 1.0)
    return GmeResult(_stable_half_gap(s), "bloch_closed_form", {"bloch": a})


def pauli_string_expectation(rho: DensityMatrix, letters: str) -> float:
    """Tr(P rho) for a Pauli string, by index arithmetic instead of dense Kronecker products."""
    n = len(letters)
    if rho.dim != 2**n:
        raise ContractError("Pauli string length does not match density dimension")
    idx = np.arange(2**n)
    flip = 0
    phase = np.ones(2**n, dtype=complex)
    for q, letter in enumerate(letters):
        bit = (idx >> (n - 1 - q)) & 1
        if letter in "xy":
            flip |= 1 << (n - 1 - q)
        if letter == "y":
            phase *= np.where(bit == 0, 1j, -1j)
        elif letter == "z":
            phase *= np.where(bit == 0, 1, -1)
    # P|c> = phase(c) |c ^ flip>, so Tr(P rho) = sum_c phase(c) rho[c, c ^ flip]
    val = np.sum(phase * rho.matrix[idx, idx ^ flip])
    if abs(val.imag) > 1e-10:
        raise ContractError(f"Pauli expectation has imaginary residue {val.imag!r}")
    return float(val.real)


def gme_rank2_correlators(rho: DensityMatrix, kind: SubspaceKind) -> GmeResult:
    """GME from the two spin correlators, e.g. <s1x s2x> and <s1y s2x> for two spins."""
    check_support(rho, kind)
    strings = kind.sigma_strings()
    cxx = pauli_string_expectation(rho, strings["x"])
    cyx = pauli_string_expectation(rho, strings["y"])
    s = cxx * cxx + cyx * cyx
    if s > (1 + BLOCH_CLAMP_TOL) ** 2:
        raise InvalidStateError(f"correlators give squared transverse norm {s!r} > 1")
    s = min(s, 1.0)
    value = 0.5 * s / (1.0 + np.sqrt(1.0 - s))
    return GmeResult(value, "correlators", {"correlators": (cxx, cyx)})


@dataclass(frozen=True)
class RoofDecomposition:
    """Pure-state decomposition ``rho = sum_i p_i |psi_i><psi_i|`` in subspace coordinates."""

    weights: np.ndarray
    members: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.members, dtype=complex)
        if abs(w.sum() - 1) > 1e-10 or np.any(w < 0):
            raise InvalidStateError("decomposition weights must be a probability vector")
        if np.max(np.abs(np.linalg.norm(m, axis=1) - 1)) > 1e-10:
            raise InvalidStateError("decomposition members must be normalised")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "members", m)

    def density2(self):
        return np.einsum("i,ia,ib->ab", self.weights, self.members, self.members.conj())

    def embedded(self, kind: SubspaceKind):
        return [kind.embed_state(c) for c in self.members]


def _roof_setup(rho2, kind):
    mu, vecs = np.linalg.eigh(rho2)
    mu = np.clip(mu, 0.0, None)
    w = np.ascontiguousarray(vecs * np.sqrt(mu)[None, :])
    return w, np.ascontiguousarray(kind.spin_restrictions())


def convex_roof_oracle(
    rho: DensityMatrix,
    kind: SubspaceKind,
    m: int = 4,
    restarts: int = 20,
    seed: int = 0,
    agree_tol: float = 1e-6,
) -> GmeResult:
    """Minimise the average member GME over all size-``m`` decompositions.

    Decompositions are ``psi_i = sum_k U_ik sqrt(mu_k) e_k`` with ``U`` an
    m x 2 isometry built from complex Givens rotations; each restart runs
    L-BFGS-B from a random rotation set. The best value is accepted only if
    at least two restarts reproduce it within ``agree_tol``.
    """
    if not 2 <= m <= 4:
        raise ContractError("decomposition size m must be in 2..4")
    if restarts < 1:
        raise ContractError("restarts must be positive")
    rho2 = kind.restrict(rho)
    w, spin_ops = _roof_setup(rho2, kind)
    n_par = m * (m - 1)
    rng = np.random.default_rng(seed)

    def objective(x):
        return kernels.roof_objective(x, w, spin_ops, m)

    values, params = [], []
    for _ in range(restarts):
        x0 = rng.uniform(0.0, 2 * np.pi, size=n_par)
        res = optimize.minimize(objective, x0, method="L-BFGS-B", options={"ftol": 1e-15, "gtol": 1e-10})
        values.append(float(res.fun))
        params.append(res.x)
    values = np.array(values)
    best_i = int(np.argmin(values))  # first index wins ties
    best = float(values[best_i])
    n_agree = int(np.sum(values <= best + agree_tol))
    if restarts > 1 and n_agree < 2:
        raise ConvergenceError(
            "convex-roof restarts disagree on the minimum",
            best=best,
            diagnostics={"restart_values": values.tolist()},
        )

    u = kernels.isometry(params[best_i], m)
    psi = u @ w.T
    p = np.einsum("ia,ia->i", psi.conj(), psi).real
    keep = p > 1e-14
    p, psi = p[keep], psi[keep]
    dec = RoofDecomposition(p / p.sum(), psi / np.sqrt(p)[:, None])
    recon = float(np.max(np.abs(dec.density2() - rho2)))
    if recon > 1e-8:
        raise ConvergenceError("decomposition does not reproduce rho", best=best, diagnostics={"reconstruction": recon})
    # member entanglement through the full-space mean-spin route
    member_e = np.array([gme_pure_mean_spin(s, kind.site).value for s in dec.embedded(kind)])
    member_check = abs(float(dec.weights @ member_e) - best)
    return GmeResult(
        best,
        "oracle_convex_roof",
        {
            "decomposition": dec,
            "restart_values": values.tolist(),
            "n_agree": n_agree,
            "reconstruction": recon,
            "member_check": member_check,
        },
    )


def max_lz_oracle(a, segments: int = 2, restarts: int = 8, seed: int = 0, grid: int = 64) -> float:
    """Numerically maximise |l1z| + |l2z| subject to l1 + l2 = a, |l1| + |l2| = 1.

    The feasible set for l1 is the spheroid with foci 0 and a and major axis
    1; it is parametrised exactly by two angles and searched by grid plus
    Nelder-Mead from the ``restarts`` best cells.
    """
    if segments != 2:
        raise ContractError("only two-segment cords are supported")
    if not isinstance(a, BlochVector):
        a = BlochVector.from_array(a)
    vec = a.as_array()
    norm = a.norm
    axis = vec / norm if norm > 1e-15 else np.array([0.0, 0.0, 1.0])
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    minor = 0.5 * np.sqrt(max(1.0 - norm**2, 0.0))

    def point(u, v):
        return 0.5 * vec + 0.5 * np.cos(u) * axis + minor * np.sin(u) * (np.cos(v) * e1 + np.sin(v) * e2)

    def score(x):
        l1 = point(x[0], x[1])
        return abs(l1[2]) + abs(vec[2] - l1[2])

    us = np.linspace(0.0, np.pi, grid)
    vs = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = np.array([[score((u, v)) for v in vs] for u in us])
    rng = np.random.default_rng(seed)
    starts = [np.unravel_index(f, vals.shape) for f in np.argsort(vals, axis=None)[::-1][: max(restarts // 2, 1)]]
    starts = [(us[i], vs[j]) for i, j in starts]
    starts += [tuple(rng.uniform([0, 0], [np.pi, 2 * np.pi])) for _ in range(restarts - len(starts))]
    best = float(vals.max())
    for x0 in starts:
        res = optimize.minimize(lambda x: -score(x), x0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        l1 = point(*res.x)
        l2 = vec - l1
        # constraint residual of the parametrisation
        if abs(np.linalg.norm(l1) + np.linalg.norm(l2) - 1) > 1e-9:
            raise ConvergenceError("cord constraint violated", best=best)
        best = max(best, -float(res.fun))
    return best


def lz_closed_form(a) -> float:
    """sqrt(1 - |a|^2 sin^2 theta) = sqrt(1 - ax^2 - ay^2)."""
    if not isinstance(a, BlochVector):
        a = BlochVector.from_array(a)
    return float(np.sqrt(max(1.0 - a.ax**2 - a.ay**2, 0.0)))


def random_bloch(rng, max_norm=1.0) -> BlochVector:
    """Direction uniform on the sphere, norm uniform in [0, max_norm)."""
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    return BlochVector.from_array(d * rng.uniform(0.0, max_norm))


def bloch_from_density2(rho2) -> BlochVector:
    rho2 = np.asarray(rho2)
    return BlochVector(2 * rho2[1, 0].real, 2 * rho2[1, 0].imag, (rho2[0, 0] - rho2[1, 1]).real)


__all__ = [
    "ALIGNED",
    "ANTI_ALIGNED",
    "BlochVector",
    "GmeResult",
    "RoofDecomposition",
    "SubspaceKind",
    "check_support",
    "convex_roof_oracle",
    "effective_bloch",
    "gme_pure_mean_spin",
    "gme_pure_oracle",
    "gme_pure_schmidt",
    "gme_rank2",
    "gme_rank2_correlators",
    "lz_closed_form",
    "max_lz_oracle",
    "pauli_string_expectation",
    "random_bloch",
]
