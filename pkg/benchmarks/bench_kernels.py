"""Time the compiled and numpy kernels on a realistic mesh and on one solve.

    python3 benchmarks/bench_kernels.py [--ell 0.05] [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from minh2r import _kernels_py
from minh2r.domains import scherk_triangle
from minh2r.mesh import triangulate
from minh2r.solver import QUAD_W

try:
    from minh2r import _kernels as _compiled
except ImportError:
    _compiled = None


def kernel_table(ell, repeat):
    mesh = triangulate(scherk_triangle(2, 1.0), ell)
    G, A, lam = mesh.geometry()
    rng = np.random.default_rng(0)
    u = rng.normal(size=mesh.n_vertices)
    ut = np.ascontiguousarray(u[mesh.triangles])
    dt = np.ascontiguousarray(rng.normal(size=ut.shape))
    z0 = mesh.points[mesh.edges()[:, 0]]
    z1 = mesh.points[mesh.edges()[:, 1]]
    du = rng.normal(size=len(z0))
    calls = {
        "tri_terms": lambda k: k.tri_terms(G, A, lam, QUAD_W, ut),
        "tri_weights": lambda k: k.tri_weights(G, A, lam, QUAD_W, ut),
        "tri_energy_delta": lambda k: k.tri_energy_delta(G, A, lam, QUAD_W, ut, dt, 0.5),
        "edge_lengths": lambda k: k.edge_lengths(z0, z1, du),
    }
    print(f"mesh: {mesh.n_triangles} triangles, {mesh.n_vertices} vertices")
    print(f"{'kernel':<18}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, fn in calls.items():
        tp = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=repeat)) * 1e3
        if _compiled is None:
            print(f"{name:<18}{tp:12.2f}{'n/a':>12}{'':>10}")
            continue
        tc = min(timeit.repeat(lambda: fn(_compiled), number=1, repeat=repeat)) * 1e3
        print(f"{name:<18}{tp:12.2f}{tc:12.2f}{tp / tc:10.1f}")


SOLVE = (
    "import time; from minh2r import kernels; from minh2r.domains import scherk_triangle; "
    "from minh2r.mesh import triangulate; from minh2r.solver import solve; "
    "d = scherk_triangle(2, 1.0); m = triangulate(d, {ell}); t = time.perf_counter(); "
    "s = solve(m, d, 8.0); print(kernels.BACKEND, round(time.perf_counter() - t, 3), s.iterations)"
)


def solve_table(ell):
    print("end-to-end solve (backend, seconds, newton iterations):")
    for pure in ("0", "1"):
        env = dict(os.environ, MINH2R_PURE=pure)
        out = subprocess.run([sys.executable, "-c", SOLVE.format(ell=ell)], env=env, capture_output=True, text=True)
        print("  " + (out.stdout.strip() or out.stderr.strip().splitlines()[-1]))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ell", type=float, default=0.05)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    kernel_table(args.ell, args.repeat)
    solve_table(args.ell)


if __name__ == "__main__":
    main()
