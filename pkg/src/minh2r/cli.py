"""Command line entry point: ``minh2r build|families|verify|export``.

Exit codes: 0 success, 1 a criterion failed, 2 configuration error,
3 an embeddedness condition is violated, 4 embeddedness undecided,
5 solver failure, 70 internal error.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import analysis as an
from .assembler import SurfaceComplex, assemble
from .config import ConfigError, RunConfig, config_text, load_config
from .domains import MINUS_INF, PLUS_INF, DiskPoint, PolygonDomain, domain_from_text, domain_to_text
from .mesh import Mesh, triangulate
from .solver import (
    GraphSolution,
    SolverError,
    normal_angle_profile,
    probe_vertices,
    solve,
    sweep_rows,
    truncation_sweep,
    write_report_csv,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_VIOLATED, EXIT_UNKNOWN, EXIT_SOLVER, EXIT_INTERNAL = 0, 1, 2, 3, 4, 5, 70

PASS, FAIL, VIOLATED, UNKNOWN, INFO = "pass", "fail", "violated", "unknown", "info"

HELICOID_TOL = 5e-3
ARC_ANGLE_MIN = 0.1


@dataclass
class Criterion:
    name: str
    status: str
    detail: str = ""


@dataclass
class RunResult:
    cfg: RunConfig
    domain: PolygonDomain
    solutions: list
    complex: SurfaceComplex | None = None
    curvature: an.CurvatureReport | None = None
    accumulation: an.AccumulationReport | None = None
    criteria: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        st = {c.status for c in self.criteria}
        if FAIL in st:
            return EXIT_FAIL
        if VIOLATED in st:
            return EXIT_VIOLATED
        if UNKNOWN in st:
            return EXIT_UNKNOWN
        return EXIT_OK


# -- pipeline -------------------------------------------------------------------


def _tags_of(d: PolygonDomain, kind: str) -> list:
    if kind == "arc":
        return [f"e{i}" for i, e in enumerate(d.edges) if e.kind == "arc"]
    return [f"e{i}" for i, e in enumerate(d.edges) if e.data.kind == kind]


def solve_levels(cfg: RunConfig, d: PolygonDomain, on_level=None) -> list:
    """The truncation sweep, or a single solve when every datum is finite."""
    if d.infinite_edges:
        mesh = triangulate(d, cfg.ell, cfg.delta, cfg.eps_arc)
        sols = truncation_sweep(d, cfg.ms, mesh=mesh, tol=cfg.tol)
    else:
        sols = [solve(triangulate(d, cfg.ell, cfg.delta, cfg.eps_arc), d, cfg.ms[-1], cfg.tol)]
    for k, s in enumerate(sols):
        if on_level:
            on_level(k, s)
    return sols


def curvature_report(cfg: RunConfig, d: PolygonDomain, sols) -> an.CurvatureReport:
    if not _tags_of(d, "arc"):
        return an.total_curvature(sols, [s.M for s in sols])
    M = cfg.ms[-1]
    pieces = [solve(triangulate(d, cfg.ell, cfg.delta, e), d, M, cfg.tol) for e in cfg.curvature_eps]
    return an.total_curvature(pieces, list(cfg.curvature_eps))


def _f_bounds(d: PolygonDomain):
    arc = [e for e in d.edges if e.kind == "arc"]
    return arc[0].data.bounds() if arc else (0.0, 0.0)


def _infinite_finite_corner(d: PolygonDomain) -> bool:
    return any(
        isinstance(v, DiskPoint) and (d.edges[i - 1].data.infinite or d.edges[i].data.infinite)
        for i, v in enumerate(d.vertices)
    )


def evaluate_criteria(res: RunResult) -> list:
    cfg, d, sols = res.cfg, res.domain, res.solutions
    out = []
    worst = max(s.residual for s in sols)
    ok = worst <= cfg.tol and all(s.dmp_ok for s in sols)
    out.append(Criterion("solver", PASS if ok else FAIL, f"max residual {worst:.3e}, dmp {'ok' if ok else 'violated'}"))

    if cfg.family == "helicoidal" and cfg.f == "helicoid":
        sol = sols[-1]
        a = cfg.h * cfg.m / math.pi
        probes = probe_vertices(sol.mesh)
        z = sol.mesh.points[probes]
        err = float(np.max(np.abs(sol.u[probes] - a * np.mod(np.angle(z), 2 * math.pi))))
        out.append(Criterion("helicoid-oracle", PASS if err < HELICOID_TOL else FAIL, f"probe error {err:.3e}"))

    if len(sols) > 1 and not _tags_of(d, MINUS_INF):
        drop = min(float(np.min(b.u - a.u)) for a, b in zip(sols, sols[1:]))
        if drop >= -1e-8:
            out.append(Criterion("sweep-monotone", PASS, f"min increment {drop:.3e}"))
        elif _infinite_finite_corner(d):
            # steep fans at such corners break the discrete comparison
            out.append(Criterion("sweep-monotone", INFO, f"min increment {drop:.3e} (finite corner with infinite data)"))
        else:
            out.append(Criterion("sweep-monotone", FAIL, f"min increment {drop:.3e}"))

    if cfg.embedding:
        out.extend(_embedding_criteria(res))
    if cfg.curvature and res.curvature is not None:
        out.append(_curvature_criterion(res))
    if cfg.normal_angles:
        out.extend(_normal_angle_criteria(res))
    if cfg.accumulation and res.complex is not None:
        c = _accumulation_criterion(res)
        if c:
            out.append(c)
    return out


def _embedding_criteria(res: RunResult) -> list:
    cfg, d = res.cfg, res.domain
    out = []
    if cfg.family in ("helicoidal-scherk", "helicoidal"):
        f_range = _f_bounds(d) if cfg.family == "helicoidal" else None
        rep = an.symbolic_embedding_check(cfg.family, cfg.params, f_range)
        if rep.embedded:
            st = PASS
        else:
            st = VIOLATED if rep.violated else UNKNOWN
        detail = rep.verdict if rep.embedded else f"{rep.verdict} ({'crossing' if rep.violated else 'undecided'}) witness {rep.witness}"
        if rep.condition:
            detail += f" condition {rep.condition}"
        out.append(Criterion("embedding-symbolic", st, detail))
    elif cfg.family == "non-periodic":
        flag = an.nonperiodic_embedding_flag(cfg.theta, d.edges[1].data)
        out.append(Criterion("embedding-sufficient", PASS if flag == "embedded-guaranteed" else UNKNOWN, flag))
    if res.complex is not None:
        sep = an.numeric_sheet_separation(res.complex, cfg.h)
        st = VIOLATED if sep.crossing else PASS
        detail = f"min gap {sep.min_gap_h:.4g} h over {sep.pairs} pairs" if sep.pairs else "no overlapping copies"
        out.append(Criterion("embedding-numeric", st, detail))
    return out


def _curvature_criterion(res: RunResult) -> Criterion:
    rep, d = res.curvature, res.domain
    vals = " ".join(f"{v:.6g}" for v in rep.gauss_bonnet)
    detail = f"{rep.verdict}: {vals}"
    if res.cfg.family == "non-periodic":
        return Criterion("total-curvature", INFO, detail)
    if rep.verdict == "inconclusive":
        return Criterion("total-curvature", UNKNOWN, detail)
    want = "diverging" if _tags_of(d, "arc") else "converging"
    return Criterion("total-curvature", PASS if rep.verdict == want else FAIL, detail)


def _normal_angle_criteria(res: RunResult) -> list:
    d, sols = res.domain, res.solutions
    out = []
    plus = _tags_of(d, PLUS_INF)
    if plus and len(sols) > 1:
        for tag in plus:
            peaks = [float(normal_angle_profile(s, tag)[:, 1].max()) for s in sols]
            dec = all(b < a for a, b in zip(peaks, peaks[1:]))
            out.append(Criterion(f"normal-angle-{tag}", PASS if dec else FAIL, " ".join(f"{p:.4g}" for p in peaks)))
    for tag in _tags_of(d, "arc"):
        lo = float(normal_angle_profile(sols[-1], tag)[:, 1].min())
        # where the arc data jumps against a neighbouring side the graph turns vertical
        st = (PASS if lo > ARC_ANGLE_MIN else FAIL) if _arc_continuous(d, int(tag[1:])) else INFO
        out.append(Criterion(f"normal-angle-{tag}", st, f"min {lo:.4g}"))
    return out


def _arc_continuous(d: PolygonDomain, i: int, tol: float = 1e-9) -> bool:
    arc = d.edges[i].data
    ends = (arc.values[0], arc.values[-1]) if arc.kind == "sampled" else (arc.value, arc.value)
    prev, nxt = d.edges[i - 1].data, d.edges[(i + 1) % len(d.edges)].data
    return all(nb.kind == "constant" and abs(nb.value - v) <= tol for nb, v in ((prev, ends[0]), (nxt, ends[1])))


def _accumulation_criterion(res: RunResult) -> Criterion | None:
    cfg, d, cx = res.cfg, res.domain, res.complex
    eps, K = cfg.accumulation_eps, cfg.accumulation_k
    if cfg.family == "helicoidal-scherk":
        i = next(i for i, e in enumerate(d.edges) if e.data.kind == PLUS_INF)
        rep = an.accumulation_diagnostic(cx, d.geodesic(i), eps, K)
        res.accumulation = rep
        if not rep.multiplicity:
            return Criterion("accumulation", UNKNOWN, f"no mesh points within {eps:g} of the side; refine or raise accumulation_eps")
        detail = f"multiplicity {rep.multiplicity}, max |t| {rep.max_height:.4g}"
        return Criterion("accumulation", PASS if rep.accumulates else FAIL, detail)
    if cfg.family.startswith("axis-at-infinity"):
        reps = [an.accumulation_diagnostic(cx, d.geodesic(i), eps, K) for i, e in enumerate(d.edges) if e.kind == "geodesic"]
        res.accumulation = reps[0]
        hit = [r for r in reps if r.accumulates]
        return Criterion("no-accumulation", FAIL if hit else PASS, f"{len(hit)} of {len(reps)} sides accumulate")
    return None


def run_pipeline(cfg: RunConfig, on_level=None) -> RunResult:
    d = cfg.domain()
    sols = solve_levels(cfg, d, on_level)
    res = RunResult(cfg, d, sols)
    res.complex = assemble(sols[-1], d, cfg.l)
    if cfg.curvature:
        res.curvature = curvature_report(cfg, d, sols)
    res.criteria = evaluate_criteria(res)
    return res


# -- solution files ---------------------------------------------------------------


def save_solution(path, sol: GraphSolution) -> None:
    """One directory per level: .npy arrays plus ``tags.txt`` and ``meta.txt``."""
    os.makedirs(path, exist_ok=True)
    m = sol.mesh
    arrays = {
        "points": np.column_stack([m.points.real, m.points.imag]),
        "triangles": m.triangles.astype(np.int64),
        "boundary": m.boundary.astype(np.int64),
        "bc_a": m.bc_a,
        "bc_b": m.bc_b,
        "u": sol.u,
    }
    for k, v in arrays.items():
        np.save(os.path.join(path, f"{k}.npy"), np.ascontiguousarray(v))
    with open(os.path.join(path, "tags.txt"), "w") as fh:
        fh.write("\n".join(str(t) for t in m.tags) + "\n")
    meta = {
        "M": repr(float(sol.M)),
        "residual": repr(float(sol.residual)),
        "energy": repr(float(sol.energy)),
        "iterations": str(sol.iterations),
        "flips": str(sol.flips),
        "dmp_ok": "true" if sol.dmp_ok else "false",
        "ell": repr(float(m.ell)),
        "delta": repr(float(m.delta)),
        "eps_arc": repr(float(m.eps_arc)),
    }
    with open(os.path.join(path, "meta.txt"), "w") as fh:
        fh.write("".join(f"{k} = {v}\n" for k, v in meta.items()))


def load_solution(path, domain: PolygonDomain | None = None) -> GraphSolution:
    arr = {k: np.load(os.path.join(path, f"{k}.npy")) for k in ("points", "triangles", "boundary", "bc_a", "bc_b", "u")}
    with open(os.path.join(path, "tags.txt")) as fh:
        tags = np.array(fh.read().split())
    with open(os.path.join(path, "meta.txt")) as fh:
        meta = dict(line.split(" = ", 1) for line in fh.read().splitlines() if line)
    pts = arr["points"][:, 0] + 1j * arr["points"][:, 1]
    mesh = Mesh(pts, arr["triangles"], arr["boundary"], tags, arr["bc_a"], arr["bc_b"],
                float(meta["ell"]), float(meta["delta"]), float(meta["eps_arc"]), domain)
    return GraphSolution(mesh, arr["u"], float(meta["M"]), float(meta["residual"]), float(meta["energy"]),
                         int(meta["iterations"]), [], meta["dmp_ok"] == "true", int(meta["flips"]))


# -- commands ---------------------------------------------------------------------


def _results(res: RunResult | None, status: str, message: str = "") -> dict:
    out = {"status": status}
    if message:
        out["message"] = message
    if res is None:
        return out
    out["levels"] = len(res.solutions)
    out["residuals"] = tuple(float(s.residual) for s in res.solutions)
    if res.complex is not None:
        out["placements"] = len(res.complex)
    if res.curvature is not None:
        out["curvature_verdict"] = res.curvature.verdict
        out["curvature_gauss_bonnet"] = tuple(float(v) for v in res.curvature.gauss_bonnet)
    for c in res.criteria:
        out[f"criterion.{c.name}"] = c.status
    return out


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_artifacts(res: RunResult, out: str) -> None:
    if res.curvature is not None:
        res.curvature.write_csv(os.path.join(out, "curvature.csv"))
    if res.complex is not None:
        res.complex.write_obj(os.path.join(out, "surface.obj"))
    if res.accumulation is not None:
        with open(os.path.join(out, "accumulation.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["word", "points", "t_min", "t_max"])
            for word, cnt, lo, hi in res.accumulation.rows:
                w.writerow([word, cnt, repr(lo), repr(hi)])
    _write(os.path.join(out, "summary.txt"), summary_text(res))


def summary_text(res: RunResult) -> str:
    lines = [f"family {res.cfg.family}"]
    lines += [f"{c.name:<24} {c.status:<8} {c.detail}" for c in res.criteria]
    return "\n".join(lines) + "\n"


def cmd_build(cfg: RunConfig) -> int:
    out = cfg.output
    os.makedirs(out, exist_ok=True)
    d = cfg.domain()
    _write(os.path.join(out, "domain.txt"), domain_to_text(d))

    def keep(k, s):
        save_solution(os.path.join(out, "solutions", f"level{k}"), s)

    try:
        res = run_pipeline(cfg, keep)
    except SolverError as exc:
        _write(os.path.join(out, "manifest.ini"), config_text(cfg, _results(None, "solver-failure", str(exc))))
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    write_report_csv(os.path.join(out, "sweep.csv"), sweep_rows(res.solutions))
    write_artifacts(res, out)
    _write(os.path.join(out, "manifest.ini"), config_text(cfg, _results(res, "ok")))
    print(summary_text(res), end="")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    try:
        res = run_pipeline(cfg)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(summary_text(res), end="")
    code = res.exit_code
    print(f"verdict {'pass' if code == EXIT_OK else 'fail'} (exit {code})")
    return code


FAMILY_TABLE = (
    ("helicoidal-scherk", "n >= 1, h > 0, qs optional (increasing in (0, pi/2n))",
     ["group: S = rotation by pi/n with vertical shift 2h, T = S^2n",
      "boundary case: h = 0 gives a Scherk graph (not built)"]),
    ("helicoidal", "m >= 1, h > 0, f",
     ["special case: f = helicoid, f(t) = (h m / pi) t, reproduces a helicoid",
      "odd m embedded when (1-m)h <= 2f <= (1+m)h, even m always"]),
    ("axis-at-infinity-scherk", "0 < theta < pi, h > 0, qs optional",
     ["group: parabolic P fixing p0 = -1 with vertical shift 2h",
      "boundary case: h = 0 gives a pseudo-Scherk graph (not built)"]),
    ("axis-at-infinity-helicoidal", "0 < theta < pi, h > 0, f",
     ["special case: f = onnis, f(t) = (h / theta) t (Onnis and Sa Earp data)",
      "special case: f = parabolic-helicoid, data of the parabolic-invariant graph"]),
    ("non-periodic", "0 < theta < pi, f",
     ["embedded when theta <= pi/2 or f > 0"]),
)


def cmd_families() -> int:
    for name, dom, notes in FAMILY_TABLE:
        print(f"{name:<30} {dom}")
        for n in notes:
            print(f"{'':<32}{n}")
    return EXIT_OK


def cmd_export(run_dir: str, fmt: str, dest: str, level: int | None, L: int | None) -> int:
    cfg = load_config(os.path.join(run_dir, "manifest.ini"))
    with open(os.path.join(run_dir, "domain.txt")) as fh:
        text = fh.read()
    if fmt == "domain":
        _write(dest, text)
        return EXIT_OK
    d = domain_from_text(text)
    levels = sorted(os.listdir(os.path.join(run_dir, "solutions")), key=lambda s: int(s[5:]))
    name = levels[-1] if level is None else f"level{level}"
    if name not in levels:
        raise ConfigError(f"{run_dir}: no solution {name}")
    sol = load_solution(os.path.join(run_dir, "solutions", name), d)
    if fmt == "obj":
        assemble(sol, d, cfg.l if L is None else L).write_obj(dest)
    else:
        with open(dest, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "u"])
            for z, u in zip(sol.mesh.points.tolist(), sol.u.tolist()):
                w.writerow([repr(z.real), repr(z.imag), repr(u)])
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minh2r", description="Minimal surfaces in H^2 x R from Jenkins-Serrin graphs.")
    sub = p.add_subparsers(dest="cmd", required=True)
    for name in ("build", "verify"):
        s = sub.add_parser(name)
        s.add_argument("config")
        s.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override a config key")
        if name == "build":
            s.add_argument("-o", "--output", help="output directory (overrides [run] output)")
    sub.add_parser("families")
    e = sub.add_parser("export")
    e.add_argument("run_dir")
    e.add_argument("--format", choices=("obj", "vertices", "domain"), default="obj")
    e.add_argument("-o", "--out", required=True)
    e.add_argument("--level", type=int)
    e.add_argument("--L", type=int, dest="L")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.cmd == "families":
            return cmd_families()
        if args.cmd == "export":
            return cmd_export(args.run_dir, args.format, args.out, args.level, args.L)
        overrides = list(args.set)
        if getattr(args, "output", None):
            overrides.append(f"run.output={args.output}")
        cfg = load_config(args.config, overrides)
        return cmd_build(cfg) if args.cmd == "build" else cmd_verify(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except Exception as exc:  # anything else is a bug, keep it apart from verdicts
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
