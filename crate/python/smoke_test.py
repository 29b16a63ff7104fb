#!/usr/bin/env python3
"""Smoke test for the css_diffusion_py extension module.

Builds are produced by cargo (`cargo build --release -p css-diffusion-py`);
this script locates the resulting shared library, imports it under its
module name, and exercises the main surface end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_library() -> Path:
    candidates = [
        REPO / "target" / "release" / "libcss_diffusion_py.so",
        REPO / "target" / "debug" / "libcss_diffusion_py.so",
        REPO / "target" / "release" / "libcss_diffusion_py.dylib",
        REPO / "target" / "debug" / "libcss_diffusion_py.dylib",
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit(
        "css_diffusion_py library not found; run "
        "`cargo build --release -p css-diffusion-py` first"
    )


def import_module():
    lib = locate_library()
    stage = Path(tempfile.mkdtemp(prefix="css_diffusion_py_"))
    suffix = ".so" if lib.suffix == ".so" else ".so"  # CPython loads .so on mac too
    shutil.copy2(lib, stage / f"css_diffusion_py{suffix}")
    sys.path.insert(0, str(stage))
    import css_diffusion_py

    return css_diffusion_py


def approx(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol


def main() -> None:
    m = import_module()
    checks = 0

    def ok(cond: bool, label: str) -> None:
        nonlocal checks
        if not cond:
            sys.exit(f"FAIL: {label}")
        checks += 1
        print(f"ok {checks:2d} - {label}")

    # Q-function basics.
    ok(m.q_function(0.0) == 0.5, "q_function(0) == 0.5")
    ok(approx(m.q_function(1.6449), 0.05, 1e-4), "q_function(1.6449) ~ 0.05")
    x = m.q_inverse(0.95)
    ok(approx(x, -1.6449, 1e-3), "q_inverse(0.95) ~ -1.6449")
    ok(approx(m.q_function(x), 0.95, 1e-10), "q_inverse round trip")

    # False-alarm closed forms at the reference parameters.
    p = m.SensingParams(-0.09, 3.3, 0.5, 0.95, 1)
    ok(approx(m.pfa_lss(p), 0.0472, 1e-4), "pfa_lss at defaults ~ 0.0472")
    ok(m.pfa_css(p, 1.0) == m.pfa_lss(p), "pfa_css(c=1) == pfa_lss")
    ok(approx(m.pfa_css(p, 2.0), 0.0468, 1e-4), "pfa_css(c=2) ~ 0.0468")
    ok(approx(m.ar1_precision_rowsum(2, 0.5), 4.0 / 3.0, 1e-12), "AR(1) rowsum 2x2")

    # Monte-Carlo oracle agrees with the closed form.
    est, se = m.mc_lrt_pfa(p, 2, 100_000, 7)
    ok(abs(est - m.pfa_css(p, 2.0)) <= 4 * se, "mc_lrt_pfa within 4 standard errors")

    # Degree algebra.
    d = m.DegreeDistribution([(1, 0.37), (2, 0.33), (3, 0.30)])
    tilde = dict(d.edge_perspective().probs())
    ok(approx(tilde[3], 0.90 / 1.93, 1e-12), "edge perspective weights degree 3")
    poisson = m.DegreeDistribution.from_ppp(1.0, math.sqrt(3.0 / math.pi), 25)
    ok(approx(poisson.mean_degree(), 3.0, 1e-6), "truncated Poisson keeps its mean")

    # Reference scenario solves and stays tiny; low correlation solves high.
    s = m.Scenario()
    rep = s.solve()
    ok(rep.converged and rep.residual <= 1e-3, "default scenario converges")
    free = m.Scenario()
    free.set("rho", "0")
    free.set("epsilon", "1e-9")
    rep_free = free.solve()
    ok(0.4 < rep_free.x_star < 0.6, "uncorrelated scenario equilibrium near 0.5")

    # Determinism of the agent-based run.
    a = free.run_abm(2000, 100, seed=42)
    b = free.run_abm(2000, 100, seed=42)
    ok(a.trajectory == b.trajectory, "ABM bit-identical for equal seeds")
    ok(abs(a.terminal_x_hat - rep_free.x_star) < 0.05, "ABM tracks the mean field")

    # Cost model CDF and sampling.
    cost = m.CostModel.ppp(intensity=math.pi * 484.0 / 18.0, prop_const=2.0, path_loss_exp=2.5)
    ok(cost.cdf(0.0) == 0.0, "cost CDF vanishes at zero")
    ok(approx(cost.cdf(0.0004), 0.25, 0.005), "cost CDF spot value")
    draws = cost.sample(5000, seed=3)
    frac = sum(1 for v in draws if v <= 0.0004) / len(draws)
    ok(abs(frac - cost.cdf(0.0004)) < 0.03, "cost samples match the CDF")

    # Mean-field flow settles at the fixed point from the iteration.
    xi0 = [0.5] * len(m.DegreeDistribution([(1, 0.37), (2, 0.33), (3, 0.30)]).probs())
    flow = free.meanfield_dynamics(0.5, xi0, horizon=400.0, dt=0.05)
    ok(abs(flow[-1][2] - rep_free.xi_star) < 1e-3, "mean-field flow matches the fixed point")

    # Comparisons and sweeps.
    dual = m.Scenario()
    dual.set("m", "2")
    relation, max_gap, witness = m.compare_conduciveness(s, dual)
    ok(relation == "more_conducive" and max_gap > 0, "extra antenna more conducive")
    rows = m.parameter_sweep(free, "m", [1.0, 2.0, 3.0])
    ok(all(r2[1] >= r1[1] for r1, r2 in zip(rows, rows[1:])), "antenna sweep nondecreasing")

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
