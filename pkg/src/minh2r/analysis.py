"""Embeddedness, total curvature and accumulation diagnostics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .assembler import SurfaceComplex, helicoidal_stack, sheet_stack
from .domains import EdgeData
from .hyperbolic import Geodesic
from .solver import GraphSolution


class AnalysisError(ValueError):
    pass


# -- symbolic embeddedness -------------------------------------------------------

EMBEDDED = "embedded"
UNKNOWN = "unknown"


@dataclass
class EmbeddingReport:
    verdict: str
    min_gap: float = math.nan  # units of h
    witness: tuple | None = None
    violated: bool = False  # a pair of sheets has definitely crossing data
    condition: str = ""

    @property
    def embedded(self) -> bool:
        return self.verdict == EMBEDDED


def _pair_order(a, b, f_range):
    """+1 if a >= b on every edge, -1 if a <= b, 0 if undecided, 2 if the
    data definitely cross."""
    ivs = [x.difference(y, f_range) for x, y in zip(a, b)]
    ivs = [iv for iv in ivs if iv is not None]
    if all(lo >= 0 for lo, _ in ivs):
        return 1
    if all(hi <= 0 for _, hi in ivs):
        return -1
    if any(lo > 0 for lo, _ in ivs) and any(hi < 0 for _, hi in ivs):
        return 2
    return 0


def _check_stacks(stacks, f_range) -> EmbeddingReport:
    gap = math.inf
    for st in stacks:
        sheets = st.sheets
        for i in range(len(sheets)):
            for j in range(i + 1, len(sheets)):
                a, b = sheets[i], sheets[j]
                order = _pair_order(a.values, b.values, f_range)
                if order in (0, 2):
                    return EmbeddingReport(UNKNOWN, math.nan, (st.sector, a.word, b.word), order == 2)
                finite = [x.difference(y, f_range) for x, y in zip(a.values, b.values)]
                finite = [min(abs(lo), abs(hi)) for lo, hi in (iv for iv in finite if iv is not None) if math.isfinite(lo)]
                if finite:
                    gap = min(gap, min(finite))
    return EmbeddingReport(EMBEDDED, gap)


def symbolic_embedding_check(family: str, params: dict, f_range=None, k_range=range(-2, 3)) -> EmbeddingReport:
    """Order every pair of sheets over every sector edgewise.

    ``f_range`` bounds the arc data f (absolute heights) for the helicoidal
    family; without it odd ``m`` yields the conditional verdict."""
    h = float(params.get("h", 1.0))
    if family == "helicoidal-scherk":
        n = int(params["n"])
        k = len(params.get("qs", ()))
        stacks = [sheet_stack(n, h, i, k_range, k) for i in range(1, 4 * n + 1)]
        return _check_stacks(stacks, (0.0, 0.0))
    if family == "helicoidal":
        m = int(params["m"])
        cond = f"({1 - m})h <= 2f <= ({1 + m})h"
        stacks = [helicoidal_stack(m, i, k_range) for i in range(1, 2 * m + 1)]
        if f_range is None:
            if m % 2 == 0:
                return _check_stacks(stacks, (0.0, 0.0))
            return EmbeddingReport(f"embedded-iff({cond})", condition=cond)
        lo, hi = (float(x) / h for x in f_range)
        rep = _check_stacks(stacks, (lo, hi))
        rep.condition = "" if m % 2 == 0 else cond
        return rep
    raise AnalysisError(f"no sheet arithmetic for family {family!r}")


def nonperiodic_embedding_flag(theta: float, f: EdgeData | float) -> str:
    """Sufficient condition for the non-periodic construction."""
    lo = float(f) if not isinstance(f, EdgeData) else f.bounds()[0]
    if theta <= math.pi / 2 or lo > 0:
        return "embedded-guaranteed"
    return "not-guaranteed"


# -- numeric separation ----------------------------------------------------------


@dataclass
class SeparationReport:
    min_gap: float
    min_gap_h: float
    witness: tuple | None  # (chart point, word, word)
    crossing: bool
    pairs: int


def _reference_points(sol: GraphSolution, count: int = 16) -> np.ndarray:
    inner = np.flatnonzero(~sol.mesh.boundary_mask())
    pick = inner[np.linspace(0, len(inner) - 1, min(count, len(inner))).astype(int)]
    return sol.mesh.points[pick]


def numeric_sheet_separation(cx: SurfaceComplex, h: float = 1.0, tol: float = 1e-9) -> SeparationReport:
    """Smallest vertical distance between distinct copies over their common
    region, sampled at interior vertices.  A sign change of the difference of
    two copies is a crossing and makes the gap negative."""
    sol = cx.piece
    inner = ~sol.mesh.boundary_mask()
    ref = _reference_points(sol)
    imgs = [g.mobius(ref) for _, g in cx.placements]
    allref = np.concatenate(imgs)
    cover = [np.isfinite(cx.placements[j][1].height(sol.evaluate(g.inverse().mobius(allref))))
             for j, (_, g) in enumerate(cx.placements)]
    nref = len(ref)
    best, witness, crossing, pairs = math.inf, None, False, 0
    keys = np.array([g.mobius.key() for _, g in cx.placements])
    for i, (wi, gi) in enumerate(cx.placements):
        zi, ti = cx.vertices(i)
        for j in range(i + 1, len(cx.placements)):
            if not cover[j][i * nref:(i + 1) * nref].any():
                continue
            wj, gj = cx.placements[j]
            if np.allclose(keys[i], keys[j], atol=1e-10):
                tj = gj.height(sol.u)
            else:
                tj = gj.height(sol.evaluate(gj.inverse().mobius(zi)))
            diff = (ti - tj)[inner]
            ok = np.isfinite(diff)
            if not ok.any():
                continue
            pairs += 1
            diff = diff[ok]
            sign = 1.0 if np.median(diff) >= 0 else -1.0
            oriented = sign * diff
            k = int(np.argmin(oriented))
            if oriented[k] < -tol:
                crossing = True
            if oriented[k] < best:
                best = float(oriented[k])
                witness = (complex(zi[inner][ok][k]), wi, wj)
    return SeparationReport(best, best / h, witness, crossing, pairs)


# -- total curvature -------------------------------------------------------------


@dataclass
class CurvatureLevel:
    label: float
    total: float  # angle-defect integral over interior vertices
    gauss_bonnet: float  # 2 pi chi - boundary geodesic curvature - corner angles
    residual: float  # turning along geodesic sides, zero in the continuum


@dataclass
class CurvatureReport:
    """The verdict is taken on the Gauss-Bonnet values.  On a fixed mesh the
    interior defect sum carries an O(ell) error (the residual) that dwarfs
    its level-to-level changes, while the boundary evaluation only sees the
    resolved corners and non-geodesic arcs."""

    levels: list = field(default_factory=list)
    verdict: str = "inconclusive"

    @property
    def totals(self) -> list:
        return [lv.total for lv in self.levels]

    @property
    def gauss_bonnet(self) -> list:
        return [lv.gauss_bonnet for lv in self.levels]

    @property
    def residuals(self) -> list:
        return [lv.residual for lv in self.levels]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["level", "truncation", "total_curvature", "gauss_bonnet", "residual"])
            for k, lv in enumerate(self.levels):
                w.writerow([k, repr(lv.label), repr(lv.total), repr(lv.gauss_bonnet), repr(lv.residual)])


def intrinsic_angles(sol: GraphSolution) -> np.ndarray:
    """Corner angles (T, 3) of every triangle in the induced metric, from
    quadrature edge lengths and the law of cosines."""
    mesh = sol.mesh
    tri = mesh.triangles
    p, u = mesh.points, sol.u
    L = np.empty((len(tri), 3))
    for k in range(3):
        a, b = tri[:, (k + 1) % 3], tri[:, (k + 2) % 3]
        L[:, k] = kernels.edge_lengths(p[a], p[b], u[b] - u[a])  # side opposite corner k
    a, b, c = L[:, 0], L[:, 1], L[:, 2]
    if np.any(a >= b + c) or np.any(b >= a + c) or np.any(c >= a + b):
        raise AnalysisError("degenerate triangle in the induced metric; refine the mesh")
    cos = np.column_stack([(b * b + c * c - a * a) / (2 * b * c),
                           (a * a + c * c - b * b) / (2 * a * c),
                           (a * a + b * b - c * c) / (2 * a * b)])
    return np.arccos(np.clip(cos, -1.0, 1.0))


def _geodesic_interior(sol: GraphSolution) -> np.ndarray:
    """Boundary vertices strictly inside a geodesic side (not junctions)."""
    mesh = sol.mesh
    d = mesh.domain
    tags = mesh.tags
    prev, nxt = np.roll(tags, 1), np.roll(tags, -1)
    straight = np.zeros(len(tags), bool)
    if d is not None:
        geo = {f"e{i}" for i, e in enumerate(d.edges) if e.kind == "geodesic"}
        straight = np.array([t in geo for t in tags]) & (tags == prev) & (tags == nxt)
    return mesh.boundary[straight]


def curvature_level(sol: GraphSolution, label: float = math.nan) -> CurvatureLevel:
    """Angle-defect total curvature and the Gauss-Bonnet prediction from the
    boundary: along horizontal geodesic sides the surface boundary is a
    geodesic, so only the remaining pieces and the corners contribute."""
    mesh = sol.mesh
    ang = intrinsic_angles(sol)
    sums = np.zeros(mesh.n_vertices)
    np.add.at(sums, mesh.triangles.ravel(), ang.ravel())
    interior = ~mesh.boundary_mask()
    total = float(np.sum(2 * math.pi - sums[interior]))
    turning = math.pi - sums[mesh.boundary]
    straight = np.isin(mesh.boundary, _geodesic_interior(sol))
    boundary_term = float(np.sum(turning[~straight]))
    gb = 2 * math.pi - boundary_term
    return CurvatureLevel(label, total, gb, abs(total - gb))


def _verdict(totals) -> str:
    d = np.abs(np.diff(totals))
    if len(d) >= 2 and np.all(d[1:] < d[:-1]):
        return "converging"
    mags = np.abs(totals)
    if len(d) >= 2 and np.all(np.diff(mags) > 0):
        return "diverging"
    return "inconclusive"


def total_curvature(pieces, labels=None) -> CurvatureReport:
    """Curvature report over a sequence of truncated pieces (one per level)."""
    labels = labels if labels is not None else [getattr(s, "M", math.nan) for s in pieces]
    levels = [curvature_level(s, lab) for s, lab in zip(pieces, labels)]
    return CurvatureReport(levels, _verdict([lv.gauss_bonnet for lv in levels]))


# -- accumulation ----------------------------------------------------------------


@dataclass
class AccumulationReport:
    rows: list  # (word, points within eps, t_min, t_max)
    multiplicity: int  # most copies stacked over one point within eps
    max_height: float
    satisfied: bool
    accumulates: bool
    vacuous: bool


def accumulation_diagnostic(cx: SurfaceComplex, gamma: Geodesic, eps: float = 0.1, K: float = 8.0) -> AccumulationReport:
    """Copies entering the eps-neighbourhood of the vertical plane over
    ``gamma``.  Accumulation is reported when points there reach heights
    beyond K and distinct copies are stacked over the same base point, so
    that vertical translates keep entering the neighbourhood."""
    sol = cx.piece
    inner = ~sol.mesh.boundary_mask()
    rows, near_pts, near_t = [], [], []
    far_anywhere = False
    for k, (word, g) in enumerate(cx.placements):
        z, t = cx.vertices(k)
        dist = gamma.distance(z)
        far_anywhere |= bool(np.any(dist >= eps))
        sel = (dist < eps) & inner & np.isfinite(t)
        if sel.any():
            rows.append((word, int(sel.sum()), float(t[sel].min()), float(t[sel].max())))
            near_pts.append(z[sel])
            near_t.append(t[sel])
        else:
            rows.append((word, 0, math.nan, math.nan))
    vacuous = not far_anywhere
    if not near_pts:
        return AccumulationReport(rows, 0, math.nan, vacuous, False, vacuous)
    pts = np.concatenate(near_pts)
    max_h = float(np.max(np.abs(np.concatenate(near_t))))
    stacked = np.isfinite(cx.evaluate(pts)).sum(axis=0)
    mult = int(stacked.max())
    satisfied = vacuous or max_h > K
    return AccumulationReport(rows, mult, max_h, satisfied, bool(satisfied and mult >= 2 and not vacuous), vacuous)
