"""Oracle suites driven by ``gmespin verify``.

Every suite is deterministic for a given seed and budget and returns plain
dicts, so the JSON report of two identical runs is byte-identical.
"""
from __future__ import annotations

import numpy as np

from . import gme, models
from .spin_core import mean_spin, random_state, schmidt_spectrum

BUDGETS = {
    "quick": {"pure_states": 100, "roof_vectors": 10, "lz_vectors": 20, "chain_sizes": (2, 3, 5),
              "chain_inits": 2, "times": 20, "cat_sizes": (1, 2, 4, 8)},
    "full": {"pure_states": 1000, "roof_vectors": 200, "lz_vectors": 100, "chain_sizes": tuple(range(2, 11)),
             "chain_inits": 10, "times": 200, "cat_sizes": tuple(range(1, 9))},
}
SUITES = ("pure", "roof", "appendix", "models")


def check(name, residuals, tol, strict=False):
    residuals = np.asarray(residuals, dtype=float)
    worst = float(np.max(residuals)) if residuals.size else 0.0
    passed = bool(worst < tol) if strict else bool(worst <= tol)
    return {"name": name, "passed": passed, "max_residual": worst, "tolerance": tol, "cases": int(residuals.size)}


def flag(name, ok, cases):
    return {"name": name, "passed": bool(ok), "max_residual": 0.0 if ok else 1.0, "tolerance": 0.0, "cases": int(cases)}


def suite_pure(seed, budget):
    rng = np.random.default_rng(seed)
    n = BUDGETS[budget]["pure_states"]
    oracle, schmidt, sym, spec = [], [], [], []
    for _ in range(n):
        d = int(rng.integers(2, 9))
        psi = random_state((2, d), rng)
        e = gme.gme_pure_mean_spin(psi).value
        oracle.append(abs(e - gme.gme_pure_oracle(psi).value))
        schmidt.append(abs(e - gme.gme_pure_schmidt(psi).value))
        sp = schmidt_spectrum(psi)
        spec.append(abs(np.linalg.norm(mean_spin(psi, 1)) - (sp.lambda1**2 - sp.lambda2**2)))
        if d == 2:
            sym.append(abs(np.sum(mean_spin(psi, 1) ** 2) - np.sum(mean_spin(psi, 2) ** 2)))
    return [
        check("pure: mean spin vs product-state oracle", oracle, 1e-8),
        check("pure: mean spin vs Schmidt", schmidt, 1e-10),
        check("pure: |<sigma>| = l1^2 - l2^2", spec, 1e-10),
        check("pure: two-qubit spin-length symmetry", sym, 1e-10),
    ]


def suite_roof(seed, budget, restarts=20):
    rng = np.random.default_rng(seed)
    n = BUDGETS[budget]["roof_vectors"]
    resid, bound = [], []
    for i in range(n):
        a = gme.random_bloch(rng)
        closed = gme.gme_rank2(a).value
        bound.append(closed - 0.5 * (1 - np.sqrt(1 - a.norm**2)))
        for kind in (gme.ALIGNED, gme.ANTI_ALIGNED):
            res = gme.convex_roof_oracle(kind.embed(a), kind, m=4, restarts=restarts, seed=seed + i)
            resid.append(abs(res.value - closed))
    line = [gme.gme_rank2(gme.BlochVector(0, 0, t)).value for t in np.linspace(-1, 1, 50)]
    return [
        check("roof: closed form vs convex-roof minimum", resid, 1e-4),
        check("roof: separable line a = (0, 0, t)", line, 0.0),
        check("roof: E <= (1 - sqrt(1 - |a|^2)) / 2", np.clip(bound, 0, None), 1e-15),
    ]


def suite_appendix(seed, budget):
    rng = np.random.default_rng(seed)
    resid = []
    for i in range(BUDGETS[budget]["lz_vectors"]):
        a = gme.random_bloch(rng)
        resid.append(abs(gme.max_lz_oracle(a, seed=seed + i) - gme.lz_closed_form(a)))
    return [check("appendix: max sum |l_z| = sqrt(1 - a^2 sin^2 theta)", resid, 1e-6)]


def suite_models(seed, budget):
    rng = np.random.default_rng(seed)
    cfg = BUDGETS[budget]
    omega = 1.0
    times = np.linspace(0, 2 * np.pi / omega, cfg["times"])
    chain = []
    for n in cfg["chain_sizes"]:
        for _ in range(cfg["chain_inits"]):
            p = models.ChainParams.named("random", n, omega, rng)
            chain += [abs(models.chain_gme_closed(p, t).value - models.chain_gme_numeric(p, t).value) for t in times]
    delta_formula, delta_numeric, period = [], [], []
    for ratio in (0.0, 0.5, 1.0, 5.0):
        p = models.FluctParams(omega, models.DeltaPair(ratio * omega))
        w = np.hypot(ratio * omega, omega)
        for t in times:
            e = models.fluct_gme(p, t).value
            delta_formula.append(abs(e - models.delta_pair_gme(ratio * omega, omega, t)))
            delta_numeric.append(abs(e - models.fluct_gme_numeric(p, t).value))
            period.append(abs(e - models.fluct_gme(p, t + np.pi / w).value))
    cat, cat_order = [], True
    ctimes = np.linspace(0, 5, cfg["times"])
    prev = None
    for n in cfg["cat_sizes"]:
        p = models.CatParams(n, 1.0)
        vals = np.array([models.cat_gme(p, t).value for t in ctimes])
        cat += [abs(v - models.cat_gme_assembled(p, t).value) for v, t in zip(vals, ctimes)]
        cat_order &= bool(np.all(np.diff(vals) < 0))
        if prev is not None:
            cat_order &= bool(np.all(vals[1:] <= prev[1:]))
        prev = vals
    return [
        check("models: chain closed form vs gate evolution", chain, 1e-10),
        check("models: delta-pair ensemble average vs closed form", delta_formula, 1e-12),
        check("models: delta-pair closed form vs density evolution", delta_numeric, 1e-10),
        check("models: delta-pair periodicity", period, 1e-12),
        check("models: cat closed form vs assembled density", cat, 1e-12),
        flag("models: cat decreasing in t and N", cat_order, len(cfg["cat_sizes"])),
    ]


def run(suite="all", seed=0, budget="quick", restarts=20):
    """Run one suite (or all) and return the report dict."""
    if budget not in BUDGETS:
        raise ValueError(f"unknown budget {budget!r}")
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for name in names:
        if name == "pure":
            checks += suite_pure(seed, budget)
        elif name == "roof":
            checks += suite_roof(seed, budget, restarts)
        elif name == "appendix":
            checks += suite_appendix(seed, budget)
        elif name == "models":
            checks += suite_models(seed, budget)
        else:
            raise ValueError(f"unknown suite {name!r}")
    return {
        "suite": suite,
        "seed": seed,
        "budget": budget,
        "restarts": restarts,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }
