import os
import subprocess
import sys

import numpy as np
import pytest

from gmespin import kernels
from gmespin import _pykernels

ALL = kernels.backends()


def test_active_backend_is_listed():
    assert kernels.BACKEND in ALL


def test_compiled_backend_built():
    # the editable install builds the extension; flag it if it went missing
    assert "cython" in ALL


def test_fallback_selected_by_environment():
    env = dict(os.environ, GMESPIN_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import gmespin.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_overlap_grid(backend, rng):
    m0 = rng.normal(size=5) + 1j * rng.normal(size=5)
    m1 = rng.normal(size=5) + 1j * rng.normal(size=5)
    th = np.linspace(0, np.pi, 7)
    ph = np.linspace(0, 2 * np.pi, 9, endpoint=False)
    grid = backend.overlap_grid(m0, m1, th, ph)
    ref = _pykernels.overlap_grid(m0, m1, th, ph)
    assert grid.shape == (7, 9)
    assert np.max(np.abs(grid - ref)) <= 1e-12
    assert backend.overlap_point(m0, m1, th[3], ph[4]) == pytest.approx(ref[3, 4], abs=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_isometry_has_orthonormal_columns(backend, rng, m):
    params = rng.uniform(0, 2 * np.pi, m * (m - 1))
    u = backend.isometry(params, m)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-13)
    assert np.allclose(u, _pykernels.isometry(params, m), atol=1e-13)


def test_roof_objective(backend, rng):
    from gmespin.gme import ALIGNED

    ops = np.array(ALIGNED.spin_restrictions())
    v = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    w = v / np.linalg.norm(v)
    params = rng.uniform(0, 2 * np.pi, 12)
    assert backend.roof_objective(params, w, ops, 4) == pytest.approx(
        _pykernels.roof_objective(params, w, ops, 4), abs=1e-13
    )


def test_ising_chain_gate(backend, rng):
    n = 5
    psi = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    psi /= np.linalg.norm(psi)
    c, s = np.cos(0.4), np.sin(0.4)
    out = backend.apply_ising_chain(psi, n, c, s)
    assert np.linalg.norm(out) == pytest.approx(1, abs=1e-13)
    assert np.allclose(out, _pykernels.apply_ising_chain(psi, n, c, s), atol=1e-13)
