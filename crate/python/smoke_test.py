#!/usr/bin/env python3
"""Smoke test for the bimeron_py extension module.

Builds nothing itself: it locates the compiled cdylib under target/ (release
preferred), copies it next to a temp dir as an importable module, and runs a
few end-to-end checks.
"""
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_module() -> Path:
    names = ["libbimeron_py.so", "bimeron_py.so", "libbimeron_py.dylib", "bimeron_py.pyd"]
    for profile in ["release", "debug"]:
        for name in names:
            p = ROOT / "target" / profile / name
            if p.exists():
                return p
    raise SystemExit(
        "bimeron_py cdylib not found; build it first:\n  cargo build -p bimeron-py --release"
    )


def main() -> None:
    lib = locate_module()
    tmp = Path(tempfile.mkdtemp(prefix="bimeron_py_"))
    shutil.copy(lib, tmp / "bimeron_py.so")
    sys.path.insert(0, str(tmp))
    import bimeron_py as bp

    checks = 0

    def ok(cond, msg):
        nonlocal checks
        if not cond:
            raise SystemExit(f"FAIL: {msg}")
        checks += 1
        print(f"ok - {msg}")

    # stereographic map hits the poles and the equator
    ok(bp.stereographic(0.0, 0.0) == (0.0, 0.0, -1.0), "stereographic south pole")
    mx, my, mz = bp.stereographic(1.0, 0.0)
    ok(abs(mx - 1.0) < 1e-15 and abs(my) < 1e-15 and abs(mz) < 1e-15, "stereographic equator")

    # closed forms: half bubble at R = a, 4 pi limit
    ok(
        abs(bp.disk_energy_closed_form(0.3, 0.3, 0.0, math.inf) - 2 * math.pi) < 1e-12,
        "closed form half-bubble",
    )
    ok(
        abs(bp.offset_disk_energy(1e9, 0.5, 0.2) - 4 * math.pi) < 1e-6,
        "offset energy full bubble",
    )
    a_eps, bound = bp.optimal_upper_bound(0.1)
    ok(abs(a_eps - 0.05 / math.log(10)) < 1e-15, "optimal trial scale")
    ok(bound < 4 * math.pi, "upper bound subcritical")

    # grid + ansatz + degree + energy on a torus
    g = bp.Grid("torus", 96)
    ok(g.active_count() == 96 * 96, "torus active count")
    f = bp.sample_ansatz(g, a=0.05, r_cut=0.2)
    q, q_real = bp.degree(f)
    ok(q == -1 and abs(q_real + 1.0) < 1e-2, f"ansatz degree {q} ({q_real:.4f})")
    e = bp.energy(f, 0.3, 0.1)
    ok(
        abs(e["total"] - (e["exchange"] + e["dmi"] + e["anisotropy"])) < 1e-12,
        "energy breakdown sums",
    )
    ok(e["exchange"] > 4 * math.pi - 0.3, "topological lower bound (up to O(h))")

    # core localization of the sampled bimeron
    c = bp.core_report(f, math.inf, 0.7)
    ok(0.002 < c["r_core"] < 0.05, f"core radius {c['r_core']:.4f}")
    ok(
        abs(c["x_core"][0] - 0.5) < 0.1 and abs(c["x_core"][1] - 0.5) < 0.1,
        "core centered",
    )

    # snapshot roundtrip through the text format
    snap = tmp / "field.dat"
    f.save(str(snap))
    f2 = bp.load_field(str(snap))
    ok(f2.values() == f.values(), "snapshot roundtrip bit-exact")

    # lambda = 0 descent on the disk destroys the bimeron (Pohozaev triviality)
    gd = bp.Grid("disk", 49)
    fd = bp.sample_ansatz(gd, a=0.08, r_cut=0.3)
    out, rep = bp.minimize(fd, 0.0, 0.2, max_iters=20000, tol=1e-6)
    ok(
        rep["sector_escape"] or rep["total"] < 0.5,
        f"lambda=0 collapse (E={rep['total']:.2e}, escape={rep['sector_escape']})",
    )

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
