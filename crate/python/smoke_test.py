#!/usr/bin/env python3
"""Smoke test for the ncphase_py extension module.

Build the module first, then run this script from anywhere:

    cargo build -p ncphase-py --release
    python3 python/smoke_test.py

The script copies the built shared library into a scratch directory under
an importable name, imports it, and walks the main surface end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]


def load_module():
    candidates = [
        REPO / "target" / "release" / "libncphase_py.so",
        REPO / "target" / "release" / "ncphase_py.so",
        REPO / "target" / "debug" / "libncphase_py.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("ncphase_py is not built; run: cargo build -p ncphase-py --release")
    scratch = Path(tempfile.mkdtemp(prefix="ncphase_py_"))
    shutil.copy2(built, scratch / "ncphase_py.so")
    sys.path.insert(0, str(scratch))
    import ncphase_py

    return ncphase_py


def check(label, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"smoke {label}: {status}{suffix}")
    if not ok:
        sys.exit(1)


def main():
    nc = load_module()
    print(f"# ncphase_py {nc.__version__}")

    # Vacuum saturates the commutative uncertainty bound.
    vac = nc.GaussianState.vacuum(2)
    params0 = nc.NCParameters.commutative(2)
    j_form = nc.build_omega(params0, 2, 0, layout="full")
    v = nc.rsup_check(vac, j_form)
    check(
        "vacuum rsup margin",
        v.passes and abs(v.min_eigenvalue) <= 1e-12,
        f"margin {v.min_eigenvalue:.3e}",
    )

    # Planar closed-form map: constraint residual and correspondence.
    nu, mu, resid = nc.planar_sw_constants(0.2, 0.1)
    smap = nc.build_planar_s(0.2, 0.1)
    check(
        "planar map",
        abs(resid) <= 1e-12 and smap.correspondence_residual() <= 1e-10,
        f"nu {nu:.6f} mu {mu:.6f} residual {smap.correspondence_residual():.3e}",
    )

    # Gram-Schmidt map on the same deformed form agrees on the residual.
    params = nc.NCParameters.planar(0.2, 0.1)
    omega = nc.build_omega(params, 2, 0, layout="full")
    gmap = nc.build_general_s(omega, 1.0)
    check(
        "gram-schmidt map",
        gmap.method == "symplectic_gram_schmidt"
        and gmap.correspondence_residual() <= 1e-10,
        f"residual {gmap.correspondence_residual():.3e}",
    )

    # Transport round trip preserves the state.
    moved = gmap.to_nc(vac)
    back = gmap.to_commutative(moved)
    drift = max(
        max(abs(a - b) for a, b in zip(row_a, row_b))
        for row_a, row_b in zip(back.cov, vac.cov)
    )
    check(
        "picture round trip",
        moved.picture == "noncommutative" and drift <= 1e-12,
        f"cov drift {drift:.3e}",
    )

    # Two-mode squeezing is PPT-detected.
    tms = nc.GaussianState.two_mode_squeezed(0.5)
    sep = nc.ppt_separability_check(tms, j_form, 1, 1)
    check(
        "tms entanglement",
        sep.label == "entangled" and sep.min_eigenvalue < 0,
        f"margin {sep.min_eigenvalue:.6f}",
    )

    # Fixed-amplitude CHSH value on the same state.
    e = nc.bell_chsh(tms, (0.0, -0.4), (0.0, -0.4))
    check(
        "fixed-amplitude bell",
        abs(e.bell_value - 2.1434343947748804) <= 1e-12 and e.is_nonlocal,
        f"B {e.bell_value:.12f}",
    )

    # The vacuum optimizer lands on the origin plateau at B = 2.
    opt = nc.bell_optimize(vac, j_form)
    origin = math.hypot(*opt.eval.alpha1) + math.hypot(*opt.eval.alpha2)
    check(
        "vacuum bell optimum",
        abs(opt.eval.bell_value - 2.0) <= 1e-9 and origin <= 1e-6,
        f"B {opt.eval.bell_value:.12f}",
    )

    # Kinematic scan: a fixed separable-looking covariance flips under
    # deformation of the bracket alone.
    ch = math.cosh(0.7) / 2.0
    sh = math.sinh(0.7) / 2.0
    cov = [[0.0] * 8 for _ in range(8)]
    for i in range(8):
        cov[i][i] = 0.3 + ch
    for i, j, s in [(0, 4, sh), (1, 5, sh), (2, 6, -sh), (3, 7, -sh)]:
        cov[i][j] = s
        cov[j][i] = s
    state = nc.GaussianState(
        [0.0] * 8, cov, picture="commutative", ordering="party", partition=(2, 2)
    )
    grid = [0.1 * k for k in range(6)]
    records = nc.kinematic_entanglement_scan(state, grid, grid, 2, 2)
    origin_rec = records[0]
    flips = [r for r in records if r[3]]
    check(
        "kinematic flip",
        not origin_rec[3] and len(flips) > 0,
        f"{len(flips)} of {len(records)} grid points flip",
    )

    # Harmonic evolution rotates the mean by pi.
    disp = nc.GaussianState([0.3, -0.2], [[0.5, 0.0], [0.0, 0.5]])
    h1 = nc.QuadraticHamiltonian([[1.0, 0.0], [0.0, 1.0]])
    form1 = nc.build_omega(nc.NCParameters.commutative(1), 1, 0, layout="full")
    rotated = nc.evolve(disp, h1, form1, math.pi)
    err = abs(rotated.mean[0] + 0.3) + abs(rotated.mean[1] - 0.2)
    check("harmonic flow", err <= 1e-12, f"mean error {err:.3e}")

    # Shared initial data makes the t = 0 trajectory row exact.
    h4 = nc.QuadraticHamiltonian([[float(i == j) for j in range(4)] for i in range(4)])
    omega_nc = nc.build_omega(nc.NCParameters.planar(0.2, 0.2), 1, 1, layout="full")
    rows = nc.compare_bell_trajectories(
        tms, h4, omega_nc, [0.0, 0.5], amplitudes=((0.0, -0.4), (0.0, -0.4))
    )
    check(
        "trajectory start",
        len(rows) == 2 and rows[0][3] == 0.0,
        f"delta(0) = {rows[0][3]:.3e}, delta(0.5) = {rows[1][3]:.3e}",
    )

    # Pencil margin of the vacuum against hbar J vanishes.
    m = nc.pencil_margin(vac.cov, j_form.matrix)
    check("vacuum pencil margin", abs(m) <= 1e-12, f"margin {m:.3e}")

    print("smoke: all checks passed")


if __name__ == "__main__":
    main()
