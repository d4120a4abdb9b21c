"""Graded triangulations of truncated hyperbolic polygons."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np
import triangle as _triangle

from .domains import PolygonDomain
from .hyperbolic import (
    DiskPoint,
    IdealPoint,
    busemann,
    geodesic_between,
    horocycle_level,
    hyp_distance,
    point_toward,
)

SQRT3_4 = math.sqrt(3.0) / 4.0


class MeshError(ValueError):
    pass


@dataclass
class Mesh:
    """Triangulation of a truncated domain in the disk chart.

    ``boundary`` lists boundary vertex indices in counter-clockwise order
    and ``tags`` names the boundary piece each one sits on: ``e{i}`` for
    edge ``i``, ``h{i}`` for the horocycle cut at vertex ``i``, ``v{i}``
    for the domain corner ``i``.  Dirichlet values are affine in the
    truncation height: ``bc_a + M * bc_b``.
    """

    points: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    tags: np.ndarray
    bc_a: np.ndarray
    bc_b: np.ndarray
    ell: float
    delta: float
    eps_arc: float
    domain: PolygonDomain | None = None
    cuts: dict = field(default_factory=dict)
    _geom: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def boundary_mask(self) -> np.ndarray:
        m = np.zeros(len(self.points), bool)
        m[self.boundary] = True
        return m

    def tag_vertices(self, tag: str) -> np.ndarray:
        return self.boundary[self.tags == tag]

    def signed_areas(self) -> np.ndarray:
        p = self.points[self.triangles]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1.real * e2.imag - e1.imag * e2.real)

    def edges(self) -> np.ndarray:
        """Unique undirected edges, sorted."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    def hyp_diameters(self) -> np.ndarray:
        p = self.points[self.triangles]
        d = [hyp_distance(p[:, i], p[:, j]) for i, j in ((0, 1), (1, 2), (2, 0))]
        return np.max(d, axis=0)

    def geometry(self):
        """Cached P1 gradient operators, areas and quadrature values of lambda."""
        if not self._geom:
            p = self.points[self.triangles]
            x, y = p.real, p.imag
            A = 0.5 * ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0]))
            G = np.empty((len(p), 2, 3))
            for i in range(3):
                j, k = (i + 1) % 3, (i + 2) % 3
                G[:, 0, i] = (y[:, j] - y[:, k]) / (2 * A)
                G[:, 1, i] = (x[:, k] - x[:, j]) / (2 * A)
            mid = 0.5 * (p + np.roll(p, -1, axis=1))
            lam = 2.0 / (1.0 - np.abs(mid) ** 2)
            self._geom.update(G=np.ascontiguousarray(G), A=np.ascontiguousarray(A), lam=np.ascontiguousarray(lam))
        return self._geom["G"], self._geom["A"], self._geom["lam"]

    def dirichlet(self, M: float) -> np.ndarray:
        return self.bc_a + M * self.bc_b

    def rotated(self, angle: float) -> "Mesh":
        """Image under z -> e^{i angle} z with identical connectivity and data."""
        rot = complex(math.cos(angle), math.sin(angle))
        cuts = {k: c.rotated(angle) for k, c in self.cuts.items()}
        return replace(self, points=self.points * rot, domain=None, cuts=cuts, _geom={})


# -- boundary construction -----------------------------------------------------


def _geodesic_curve(a: complex, b: complex):
    """s -> point at fraction s of the hyperbolic segment [a, b]."""
    D = hyp_distance(a, b)
    w = complex(a)
    t = (b - w) / (1.0 - w.conjugate() * b)
    u = t / abs(t)

    def z(s):
        x = np.tanh(np.asarray(s) * D / 2.0) * u
        return (x + w) / (1.0 + w.conjugate() * x)

    return z


def _circle_curve(c: complex, r: float, phi0: float, phi1: float):
    def z(s):
        return c + r * np.exp(1j * (phi0 + np.asarray(s) * (phi1 - phi0)))

    return z


def _horocycle_hit(geo, xi: complex, delta: float) -> complex:
    """Second intersection of the geodesic ending at ``xi`` with its horocycle."""
    c0 = (1.0 - delta / 2.0) * xi
    if geo.kind == "diameter":
        return (1.0 - delta) * xi
    u = (c0 - geo.center) / abs(c0 - geo.center)
    return geo.center + u * u * (xi - geo.center).conjugate()


def _circle_hit(geo, xi: complex, rho: float) -> complex:
    """Intersection near ``xi`` of the geodesic with the circle |z| = rho."""
    if geo.kind == "diameter":
        return rho * xi
    c = geo.center
    cosv = (rho * rho + abs(c) ** 2 - geo.radius**2) / (2 * rho * abs(c))
    a = math.acos(max(-1.0, min(1.0, cosv)))
    cands = [rho * cmath.exp(1j * (cmath.phase(c) + s * a)) for s in (1, -1)]
    return min(cands, key=lambda z: abs(z - xi))


def _ccw_delta(phi0: float, phi1: float, avoid: float) -> float:
    """Signed sweep from phi0 to phi1 that does not pass through ``avoid``."""
    d = (phi1 - phi0) % (2 * math.pi)
    a = (avoid - phi0) % (2 * math.pi)
    return d if a > d else d - 2 * math.pi


@dataclass(frozen=True)
class Cut:
    """Circular cut at a domain vertex.

    ``kind == "horo"``: Euclidean circle ``c + r e^{i phi}`` (a horocycle).
    ``kind == "corner"``: hyperbolic circle about the finite vertex ``c``,
    i.e. the image of ``r e^{i phi}`` under the Mobius map sending 0 to ``c``.
    ``phi`` runs from ``f0`` to ``f0 + sweep``.
    """

    kind: str
    c: complex
    r: float
    f0: float
    sweep: float

    def point(self, phi):
        w = self.r * np.exp(1j * np.asarray(phi))
        if self.kind == "horo":
            return self.c + w
        return (w + self.c) / (1.0 + np.conj(self.c) * w)

    def curve(self, lo: float = 0.0, hi: float = 1.0):
        return lambda s: self.point(self.f0 + (lo + (hi - lo) * np.asarray(s)) * self.sweep)

    def param(self, z) -> float:
        """Fraction in [0, 1] of the sweep at which ``z`` sits."""
        if self.kind == "horo":
            phi = cmath.phase(z - self.c)
        else:
            phi = cmath.phase((z - self.c) / (1.0 - self.c.conjugate() * z))
        s = ((phi - self.f0) * (1 if self.sweep > 0 else -1)) % (2 * math.pi)
        if s > math.pi + abs(self.sweep) / 2:
            s -= 2 * math.pi
        return min(max(s / abs(self.sweep), 0.0), 1.0)

    def rotated(self, angle: float) -> "Cut":
        return Cut(self.kind, self.c * cmath.exp(1j * angle), self.r, self.f0 + angle, self.sweep)


@dataclass
class _Piece:
    tag: str
    curve: object
    start_tag: str | None = None  # overrides the tag of the first sample


def _jump_at(d: PolygonDomain, i: int) -> bool:
    N = len(d.vertices)
    a, b = d.edges[(i - 1) % N].data, d.edges[i].data
    return a.infinite or b.infinite or a.bounds() != b.bounds()


def _pieces(d: PolygonDomain, delta: float, eps_arc: float, rot: complex = 1.0, r_corner: float = 0.0):
    """Ordered boundary pieces of the truncated domain (rotated by ``rot``)."""
    V = d.vertices
    N = len(V)
    rho = 1.0 - eps_arc
    ang = cmath.phase(rot)
    rgeo = []
    for i, e in enumerate(d.edges):
        if e.kind != "geodesic":
            rgeo.append(None)
            continue
        a, b = V[e.start], V[e.end]
        ra = IdealPoint(a.angle + ang) if isinstance(a, IdealPoint) else DiskPoint(a.z * rot)
        rb = IdealPoint(b.angle + ang) if isinstance(b, IdealPoint) else DiskPoint(b.z * rot)
        rgeo.append(geodesic_between(ra, rb))
    entry, exit_, cuts = [None] * N, [None] * N, {}
    for i, v in enumerate(V):
        e_in, e_out = (i - 1) % N, i
        if isinstance(v, DiskPoint):
            c = v.z * rot
            if r_corner > 0 and _jump_at(d, i):
                prev = V[e_in].z * rot
                nxt = V[(i + 1) % N].z * rot
                dist = 2.0 * math.atanh(r_corner)
                p_in, p_out = point_toward(c, prev, dist), point_toward(c, nxt, dist)
                phase = lambda z: cmath.phase((z - c) / (1.0 - c.conjugate() * z))  # noqa: E731
                f_in, f_out = phase(p_in), phase(p_out)
                sweep = -((f_in - f_out) % (2 * math.pi))
                cuts[f"c{i}"] = Cut("corner", c, r_corner, f_in, sweep)
                entry[i], exit_[i] = p_in, p_out
            else:
                entry[i] = exit_[i] = c
            continue
        xi = v.z * rot
        gin, gout = rgeo[e_in], rgeo[e_out]
        if gin is not None and gout is not None:
            p_in = _horocycle_hit(gin, xi, delta)
            p_out = _horocycle_hit(gout, xi, delta)
            c0, r0 = (1.0 - delta / 2.0) * xi, delta / 2.0
            f0, f1 = cmath.phase(p_in - c0), cmath.phase(p_out - c0)
            sweep = _ccw_delta(f0, f1, cmath.phase(xi))
            entry[i], exit_[i] = p_in, p_out
            cuts[f"h{i}"] = Cut("horo", c0, r0, f0, sweep)
        elif gin is not None:
            entry[i] = exit_[i] = _circle_hit(gin, xi, rho)
        elif gout is not None:
            entry[i] = exit_[i] = _circle_hit(gout, xi, rho)
        else:
            raise MeshError("consecutive ideal arcs are not supported")
    pieces = []
    for i, e in enumerate(d.edges):
        if f"c{i}" in cuts:
            pieces.append(_Piece(f"c{i}", cuts[f"c{i}"].curve()))
        a, b = exit_[i], entry[(i + 1) % N]
        corner = None if (f"h{i}" in cuts or f"c{i}" in cuts) else f"v{i}"
        if e.kind == "geodesic":
            pieces.append(_Piece(f"e{i}", _geodesic_curve(a, b), corner))
        else:
            f0 = cmath.phase(a)
            sweep = (cmath.phase(b) - f0) % (2 * math.pi)
            pieces.append(_Piece(f"e{i}", _circle_curve(0j, rho, f0, f0 + sweep), corner))
        j = (i + 1) % N
        if f"h{j}" in cuts:
            pieces.append(_Piece(f"h{j}", cuts[f"h{j}"].curve()))
    return pieces, cuts


# -- sizing --------------------------------------------------------------------


def _singular_corners(d: PolygonDomain) -> list[complex]:
    """Finite corners where the boundary data jumps."""
    return [v.z for i, v in enumerate(d.vertices) if isinstance(v, DiskPoint) and _jump_at(d, i)]


def make_sizing(ell: float, corners=(), grading: float = 1.0, r_min: float = 1e-3):
    """Euclidean target edge size: ell / lambda, graded towards ``corners``."""

    def size(z):
        z = np.asarray(z)
        h = ell * (1.0 - np.abs(z) ** 2) / 2.0
        for c in corners:
            h = np.minimum(h, grading * ell * np.maximum(np.abs(z - c), r_min))
        return h

    return size


def _sample(curve, size, n_fine: int = 8001) -> np.ndarray:
    s = np.linspace(0.0, 1.0, n_fine)
    z = curve(s)
    mid = 0.5 * (z[1:] + z[:-1])
    dens = np.abs(np.diff(z)) / size(mid)
    cum = np.concatenate([[0.0], np.cumsum(dens)])
    n = max(1, int(math.ceil(cum[-1] - 1e-9)))
    sk = np.interp(np.linspace(0.0, cum[-1], n + 1)[:-1], cum, s)
    return curve(sk)


def _mesh_polygon(pts: np.ndarray, size, min_angle: float = 30.0, holes=None, segments=None, max_passes: int = 40):
    P = np.column_stack([pts.real, pts.imag])
    n = len(P)
    if segments is None:
        segments = np.column_stack([np.arange(n), (np.arange(n) + 1) % n])
    data = {"vertices": P, "segments": segments}
    if holes is not None:
        data["holes"] = np.asarray(holes, float)
    amax = SQRT3_4 * float(np.max(size(pts))) ** 2
    out = _triangle.triangulate(data, f"pq{min_angle}Ya{amax:.17g}")
    for _ in range(max_passes):
        V = out["vertices"]
        T = out["triangles"]
        c = (V[T, 0].mean(axis=1)) + 1j * (V[T, 1].mean(axis=1))
        target = SQRT3_4 * size(c) ** 2
        p = V[T]
        area = 0.5 * np.abs(
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )
        if np.all(area <= 1.5 * target):
            break
        out["triangle_max_area"] = target[:, None]
        out = _triangle.triangulate(out, f"rpq{min_angle}Ya")
    else:
        raise MeshError("size refinement did not settle")
    V = out["vertices"]
    if not np.array_equal(V[:n], P):
        raise MeshError("mesher moved boundary vertices")
    return V[:, 0] + 1j * V[:, 1], np.asarray(out["triangles"], dtype=np.int64)


def _orient(points, tris):
    p = points[tris]
    e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    neg = (e1.real * e2.imag - e1.imag * e2.real) < 0
    tris = tris.copy()
    tris[neg] = tris[neg][:, [0, 2, 1]]
    return tris


def _sample_boundary(pieces, size):
    pts, tags, owner = [], [], []
    for k, pc in enumerate(pieces):
        z = _sample(pc.curve, size)
        pts.append(z)
        t = np.full(len(z), pc.tag, dtype=object)
        if pc.start_tag is not None:
            t[0] = pc.start_tag
        tags.append(t)
        owner.append(np.full(len(z), k))
    return np.concatenate(pts), np.concatenate(tags), np.concatenate(owner)


def triangulate(
    d: PolygonDomain,
    ell: float = 0.1,
    delta: float = 0.05,
    eps_arc: float = 0.05,
    symmetric: bool = False,
    grading: float | None = 1.0,
    r_corner: float = 1e-3,
    min_angle: float = 30.0,
) -> Mesh:
    """Mesh the truncated domain with hyperbolic edge length about ``ell``.

    Ideal vertices between two geodesics are cut by horocycles of Euclidean
    diameter ``delta``; ideal arcs are replaced by |z| = 1 - eps_arc; finite
    corners where the data jumps are cut by a circle of Euclidean radius
    ``r_corner`` (in the chart centred there) carrying data linear in angle.
    ``symmetric`` meshes half of a sector and mirrors it across the bisector.
    """
    if not (ell > 0 and 0 < delta < 1 and 0 < eps_arc < 1 and 0 <= r_corner < 0.5):
        raise MeshError("mesh parameters out of range")
    corners = _singular_corners(d) if grading else []
    grading = grading or 1.0
    if symmetric:
        pts, tris, btags, cuts = _symmetric(d, ell, delta, eps_arc, corners, grading, r_corner, min_angle)
    else:
        size = make_sizing(ell, corners, grading, max(r_corner, 1e-4))
        pieces, cuts = _pieces(d, delta, eps_arc, r_corner=r_corner)
        bpts, btags, _ = _sample_boundary(pieces, size)
        _check_simple(bpts)
        pts, tris = _mesh_polygon(bpts, size, min_angle)
    nb = len(btags)
    tris = _orient(pts, tris)
    mesh = Mesh(pts, tris, np.arange(nb), np.asarray(btags, dtype=str), None, None, ell, delta, eps_arc, d, cuts)
    mesh.bc_a, mesh.bc_b = boundary_values(d, mesh)
    return mesh


def _check_simple(pts):
    n = len(pts)
    if n < 3:
        raise MeshError("degenerate truncated domain")
    x, y = pts.real, pts.imag
    area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    if not area > 0:
        raise MeshError("truncated boundary is not counter-clockwise; parameters too large")


_SWAP = {"e0": "e2", "e2": "e0", "h1": "h2", "h2": "h1", "v1": "v2", "v2": "v1", "e1": "e1", "c0": "c0"}


def _symmetric(d, ell, delta, eps_arc, corners, grading, r_corner, min_angle):
    V = d.vertices
    if not (
        len(V) == 3 and isinstance(V[0], DiskPoint) and V[0].z == 0 and all(isinstance(v, IdealPoint) for v in V[1:])
    ):
        raise MeshError("symmetric meshing needs a sector with apex at the origin")
    a0, w = V[1].angle, (V[2].angle - V[1].angle) % (2 * math.pi)
    mid = a0 + w / 2
    rot = cmath.exp(-1j * mid)
    size = make_sizing(ell, [c * rot for c in corners], grading, max(r_corner, 1e-4))
    pieces, cuts = _pieces(d, delta, eps_arc, rot, r_corner)
    tags = [p.tag for p in pieces]
    k1 = tags.index("e1")
    e1 = pieces[k1].curve
    X = complex(e1(0.5).real, 0.0)
    upper = [_Piece("e1", lambda s: e1(0.5 + 0.5 * np.asarray(s)))] + pieces[k1 + 1 :]
    if "c0" in cuts:
        upper.append(_Piece("c0", cuts["c0"].curve(0.0, 0.5)))
        start = complex(r_corner, 0.0)
        start_tag = "c0"
    else:
        start, start_tag = 0j, "v0"
    upper.append(_Piece("_axis", lambda s: start + (X - start) * np.asarray(s), start_tag))
    bpts, btags, owner = _sample_boundary(upper, size)
    bpts[0] = X
    on_axis = owner == len(upper) - 1
    bpts[on_axis] = bpts[on_axis].real
    pts, tris = _mesh_polygon(bpts, size, min_angle)
    nb_up = len(bpts)
    axis_idx = np.flatnonzero(on_axis)
    keep = np.ones(len(pts), bool)
    keep[0] = False
    keep[axis_idx] = False
    mirror_of = np.arange(len(pts))
    new = np.flatnonzero(keep)
    mirror_of[new] = len(pts) + np.arange(len(new))
    allpts = np.concatenate([pts, np.conj(pts[new])])
    alltris = np.concatenate([tris, mirror_of[tris][:, [0, 2, 1]]])
    # counter-clockwise: axis start, mirrored upper boundary reversed, X, upper boundary
    up = np.arange(nb_up)[~on_axis]
    up_tags = btags[~on_axis]
    low = mirror_of[up[1:]][::-1]
    low_tags = np.array([_SWAP[t] for t in up_tags[1:]][::-1], dtype=object)
    order = np.concatenate([[axis_idx[0]], low, up])
    btags_all = np.concatenate([[start_tag], low_tags, up_tags])
    rest = np.setdiff1d(np.arange(len(allpts)), order)
    perm = np.concatenate([order, rest])
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    allpts = allpts[perm] * cmath.exp(1j * mid)
    alltris = inv[alltris]
    cuts = {k: c.rotated(mid) for k, c in cuts.items()}
    return allpts, alltris, btags_all, cuts


def boundary_values(d: PolygonDomain, mesh: Mesh):
    """Affine Dirichlet coefficients (a, b), value = a + M b, per boundary vertex."""
    N = len(d.vertices)
    pts = mesh.points[mesh.boundary]
    a = np.zeros(len(pts))
    b = np.zeros(len(pts))

    def edge_val(i, z):
        e = d.edges[i].data
        if e.infinite:
            return 0.0, float(e.sign)
        if d.edges[i].kind == "arc":
            a0 = d.vertices[d.edges[i].start].angle
            t = a0 + (cmath.phase(z) - a0 + 1e-9) % (2 * math.pi) - 1e-9
            return float(e.evaluate(t)), 0.0
        return e.value, 0.0

    def cut_val(tag, z):
        cut = mesh.cuts[tag]
        j = int(tag[1:])
        s = cut.param(z)
        ai, bi = edge_val((j - 1) % N, complex(cut.point(cut.f0)))
        ao, bo = edge_val(j, complex(cut.point(cut.f0 + cut.sweep)))
        return (1 - s) * ai + s * ao, (1 - s) * bi + s * bo

    for k, (z, t) in enumerate(zip(pts, mesh.tags)):
        idx = int(t[1:])
        if t[0] == "e":
            a[k], b[k] = edge_val(idx, z)
        elif t[0] in "hc":
            a[k], b[k] = cut_val(t, z)
        else:
            a1, b1 = edge_val((idx - 1) % N, z)
            a2, b2 = edge_val(idx, z)
            a[k], b[k] = 0.5 * (a1 + a2), 0.5 * (b1 + b2)
    return a, b


def annulus_mesh(r1: float, r2: float, ell: float = 0.1, min_angle: float = 30.0) -> Mesh:
    """Annulus r1 < |z| < r2 with tags ``outer`` and ``inner``."""
    if not 0 < r1 < r2 < 1:
        raise MeshError("need 0 < r1 < r2 < 1")
    size = make_sizing(ell)
    outer = _sample(_circle_curve(0j, r2, 0.0, 2 * math.pi), size)
    inner = _sample(_circle_curve(0j, r1, 2 * math.pi, 0.0), size)
    n1, n2 = len(outer), len(inner)
    segs = np.concatenate(
        [
            np.column_stack([np.arange(n1), (np.arange(n1) + 1) % n1]),
            n1 + np.column_stack([np.arange(n2), (np.arange(n2) + 1) % n2]),
        ]
    )
    pts, tris = _mesh_polygon(np.concatenate([outer, inner]), size, min_angle, holes=[[0.0, 0.0]], segments=segs)
    tags = np.array(["outer"] * n1 + ["inner"] * n2)
    mesh = Mesh(pts, _orient(pts, tris), np.arange(n1 + n2), tags, np.zeros(n1 + n2), np.zeros(n1 + n2), ell, 0.0, 0.0)
    return mesh


def horocycle_points_ok(mesh: Mesh) -> float:
    """Largest deviation of horocycle-tagged vertices from their horocycle level."""
    worst = 0.0
    for tag, cut in mesh.cuts.items():
        idx = mesh.tag_vertices(tag)
        if cut.kind == "horo" and len(idx):
            xi = cut.c / abs(cut.c)
            lev = horocycle_level(2 * cut.r)
            worst = max(worst, float(np.max(np.abs(busemann(xi, mesh.points[idx]) - lev))))
    return worst
