"""Polygonal domains of the disk carrying Jenkins-Serrin boundary data."""
from __future__ import annotations

import configparser
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .hyperbolic import (
    ORIGIN,
    DiskPoint,
    Geodesic,
    IdealPoint,
    busemann,
    geodesic_between,
    horocycle_level,
    hyp_distance,
)

CONSTANT = "constant"
SAMPLED = "sampled"
PLUS_INF = "plus_inf"
MINUS_INF = "minus_inf"
_KINDS = (CONSTANT, SAMPLED, PLUS_INF, MINUS_INF)


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeData:
    """Boundary data on one edge.

    Sampled functions are tabulated against the absolute boundary angle and
    interpolated piecewise linearly.  A repeated angle encodes a jump: the
    first entry is the left limit, the second the right limit.
    """

    kind: str
    value: float | None = None
    angles: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown edge data kind {self.kind!r}")
        if self.kind == CONSTANT:
            if self.value is None or not math.isfinite(float(self.value)):
                raise DomainError("constant edge data needs a finite value")
            object.__setattr__(self, "value", float(self.value))
        if self.kind == SAMPLED:
            a = tuple(float(x) for x in self.angles)
            v = tuple(float(x) for x in self.values)
            if len(a) != len(v) or len(a) < 2:
                raise DomainError("sampled data needs matching angle/value lists of length >= 2")
            if not all(math.isfinite(x) for x in v):
                raise DomainError("sampled data must be finite")
            for i in range(len(a) - 1):
                if a[i + 1] < a[i]:
                    raise DomainError("sample angles must be increasing")
                if a[i + 1] == a[i] and i + 2 < len(a) and a[i + 2] == a[i]:
                    raise DomainError("at most two samples may share an angle")
            object.__setattr__(self, "angles", a)
            object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value) -> "EdgeData":
        return cls(CONSTANT, value=value)

    @classmethod
    def sampled(cls, angles, values) -> "EdgeData":
        return cls(SAMPLED, angles=tuple(angles), values=tuple(values))

    @classmethod
    def from_function(cls, fn: Callable[[float], float], a0: float, a1: float, n: int = 64) -> "EdgeData":
        t = np.linspace(a0, a1, n)
        return cls.sampled(t, [fn(x) for x in t])

    @property
    def infinite(self) -> bool:
        return self.kind in (PLUS_INF, MINUS_INF)

    @property
    def sign(self) -> int:
        return {PLUS_INF: 1, MINUS_INF: -1}.get(self.kind, 0)

    def jumps(self) -> list[float]:
        if self.kind != SAMPLED:
            return []
        a = self.angles
        return [a[i] for i in range(len(a) - 1) if a[i] == a[i + 1]]

    def evaluate(self, angle, M: float | None = None):
        """Value at boundary angle(s); +-inf becomes +-M when M is given."""
        if self.kind == CONSTANT:
            return np.full(np.shape(angle), self.value) if np.ndim(angle) else self.value
        if self.infinite:
            if M is None:
                v = math.inf * self.sign
            else:
                v = M * self.sign
            return np.full(np.shape(angle), v) if np.ndim(angle) else v
        a = np.asarray(self.angles)
        v = np.asarray(self.values)
        x = np.asarray(angle, dtype=float)
        # average of the one-sided limits at a jump
        left = np.interp(x, a, v)
        right = -np.interp(-x, -a[::-1], -v[::-1])
        out = 0.5 * (left + right)
        return float(out) if out.ndim == 0 else out

    def bounds(self, M: float | None = None) -> tuple[float, float]:
        if self.kind == CONSTANT:
            return self.value, self.value
        if self.infinite:
            v = self.evaluate(0.0, M)
            return v, v
        return min(self.values), max(self.values)


PLUS = EdgeData(PLUS_INF)
MINUS = EdgeData(MINUS_INF)


@dataclass(frozen=True)
class Edge:
    start: int
    end: int
    kind: str  # "geodesic" | "arc"
    data: EdgeData
    label: str = ""


@dataclass(frozen=True)
class PolygonDomain:
    """Counter-clockwise ideal/semi-ideal polygon with per-edge data."""

    vertices: tuple
    edges: tuple
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        n = len(self.vertices)
        if n < 2 or len(self.edges) != n:
            raise DomainError("a polygon needs as many edges as vertices (at least two)")
        for i, e in enumerate(self.edges):
            if e.start != i or e.end != (i + 1) % n:
                raise DomainError(f"edge {i} does not join consecutive vertices")
            a, b = self.vertices[e.start], self.vertices[e.end]
            if e.kind == "arc":
                if not (isinstance(a, IdealPoint) and isinstance(b, IdealPoint)):
                    raise DomainError("ideal arcs must join ideal vertices")
                if e.data.infinite:
                    raise DomainError("infinite data is not allowed on ideal arcs")
            elif e.kind == "geodesic":
                if e.data.kind == SAMPLED:
                    raise DomainError("geodesic sides carry constant or infinite data")
            else:
                raise DomainError(f"unknown edge kind {e.kind!r}")

    def geodesic(self, i: int) -> Geodesic:
        e = self.edges[i]
        return geodesic_between(self.vertices[e.start], self.vertices[e.end])

    def edge_index(self, label: str) -> int:
        for i, e in enumerate(self.edges):
            if e.label == label:
                return i
        raise KeyError(label)

    def edge(self, label: str) -> Edge:
        return self.edges[self.edge_index(label)]

    def arc_span(self, i: int) -> tuple[float, float]:
        """Start angle and counter-clockwise width of ideal arc ``i``."""
        e = self.edges[i]
        a0 = self.vertices[e.start].angle
        a1 = self.vertices[e.end].angle
        w = (a1 - a0) % (2 * math.pi)
        return a0, w

    @property
    def has_finite_data(self) -> bool:
        return any(not e.data.infinite for e in self.edges)

    @property
    def infinite_edges(self) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.data.infinite]

    def data_bounds(self) -> tuple[float, float]:
        """Range of the finite boundary data."""
        lo, hi = math.inf, -math.inf
        for e in self.edges:
            if not e.data.infinite:
                a, b = e.data.bounds()
                lo, hi = min(lo, a), max(hi, b)
        return lo, hi


def _check_positive_int(name, v):
    if isinstance(v, bool) or int(v) != v or v < 1:
        raise DomainError(f"{name} must be a positive integer, got {v!r}")
    return int(v)


def _check_height(h):
    h = float(h)
    if not h > 0 or not math.isfinite(h):
        raise DomainError(f"h must be positive, got {h!r}")
    return h


def _check_theta(theta):
    theta = float(theta)
    if not 0.0 < theta < math.pi:
        raise DomainError(f"theta must lie in (0, pi), got {theta!r}")
    return theta


def _finite_arc_data(f: EdgeData, a0: float, a1: float) -> EdgeData:
    if not isinstance(f, EdgeData):
        raise DomainError("boundary function must be EdgeData")
    if f.infinite:
        raise DomainError("infinite data is not allowed on ideal arcs")
    if f.kind == SAMPLED:
        tol = 1e-9
        if f.angles[0] > a0 + tol or f.angles[-1] < a1 - tol:
            raise DomainError(f"samples must cover the arc [{a0}, {a1}]")
    return f


def _alternating(k: int) -> list[EdgeData]:
    return [PLUS if j % 2 == 0 else MINUS for j in range(k + 1)]


def _check_qs(qs, lo, hi) -> tuple:
    qs = tuple(float(q) for q in qs)
    prev = lo
    for q in qs:
        if not (prev < q < hi):
            raise DomainError(f"interior ideal points must be increasing inside ({lo}, {hi})")
        prev = q
    return qs


def scherk_triangle(n: int, h: float) -> PolygonDomain:
    """Triangle 0, p1 = 1, p2 = e^{i pi/2n} with data 0, +inf, h."""
    return generalized_scherk_polygon(n, h, ())


def generalized_scherk_polygon(n: int, h: float, qs: Sequence[float] = ()) -> PolygonDomain:
    n = _check_positive_int("n", n)
    h = _check_height(h)
    top = math.pi / (2 * n)
    qs = _check_qs(qs, 0.0, top)
    verts = [ORIGIN, IdealPoint(0.0)] + [IdealPoint(q) for q in qs] + [IdealPoint(top)]
    names = ["0", "p1"] + [f"q{j + 1}" for j in range(len(qs))] + ["p2"]
    data = [EdgeData.constant(0.0)] + _alternating(len(qs)) + [EdgeData.constant(h)]
    edges = []
    N = len(verts)
    for i in range(N):
        j = (i + 1) % N
        label = "0p2" if j == 0 else names[i] + names[j]
        edges.append(Edge(i, j, "geodesic", data[i], label))
    return PolygonDomain(verts, edges, "helicoidal-scherk", {"n": n, "h": h, "qs": qs})


def helicoid_data(m: int, h: float, samples: int = 64) -> EdgeData:
    """f(e^{it}) = (h m / pi) t on [0, pi/m]."""
    a = h * m / math.pi
    return EdgeData.from_function(lambda t: a * t, 0.0, math.pi / m, samples)


def helicoidal_sector(m: int, h: float, f: EdgeData) -> PolygonDomain:
    m = _check_positive_int("m", m)
    h = _check_height(h)
    top = math.pi / m
    f = _finite_arc_data(f, 0.0, top)
    verts = [ORIGIN, IdealPoint(0.0), IdealPoint(top)]
    edges = [
        Edge(0, 1, "geodesic", EdgeData.constant(0.0), "0p1"),
        Edge(1, 2, "arc", f, "p1p2"),
        Edge(2, 0, "geodesic", EdgeData.constant(h), "0p2"),
    ]
    return PolygonDomain(verts, edges, "helicoidal", {"m": m, "h": h})


def onnis_data(theta: float, h: float, samples: int = 64) -> EdgeData:
    """f(e^{it}) = (h / theta) t on [0, theta]."""
    return EdgeData.from_function(lambda t: h * t / theta, 0.0, theta, samples)


def parabolic_helicoid_data(theta: float, h: float, samples: int = 64) -> EdgeData:
    """Boundary values of the graph u = c * Re(w) invariant under the whole
    parabolic group fixing -1 (w is the half-plane chart sending -1 to infinity)."""
    c = h / math.tan(theta / 2)
    return EdgeData.from_function(lambda t: c * math.tan(t / 2), 0.0, theta, samples)


def axis_at_infinity_domain(
    theta: float,
    h: float,
    variant: str = "scherk",
    qs: Sequence[float] = (),
    f: EdgeData | None = None,
) -> PolygonDomain:
    """Domain with vertices p0 = -1, p1 = 1, p2 = e^{i theta}."""
    theta = _check_theta(theta)
    h = _check_height(h)
    p0 = IdealPoint(math.pi)
    if variant == "scherk":
        qs = _check_qs(qs, 0.0, theta)
        verts = [p0, IdealPoint(0.0)] + [IdealPoint(q) for q in qs] + [IdealPoint(theta)]
        names = ["p0", "p1"] + [f"q{j + 1}" for j in range(len(qs))] + ["p2"]
        data = [EdgeData.constant(0.0)] + _alternating(len(qs)) + [EdgeData.constant(h)]
        N = len(verts)
        edges = []
        for i in range(N):
            j = (i + 1) % N
            label = "p0p2" if j == 0 else names[i] + names[j]
            edges.append(Edge(i, j, "geodesic", data[i], label))
        return PolygonDomain(verts, edges, "axis-at-infinity-scherk", {"theta": theta, "h": h, "qs": qs})
    if variant == "helicoidal":
        if f is None:
            raise DomainError("the helicoidal variant needs boundary data f")
        f = _finite_arc_data(f, 0.0, theta)
        verts = [p0, IdealPoint(0.0), IdealPoint(theta)]
        edges = [
            Edge(0, 1, "geodesic", EdgeData.constant(0.0), "p0p1"),
            Edge(1, 2, "arc", f, "p1p2"),
            Edge(2, 0, "geodesic", EdgeData.constant(h), "p0p2"),
        ]
        return PolygonDomain(verts, edges, "axis-at-infinity-helicoidal", {"theta": theta, "h": h})
    raise DomainError(f"unknown variant {variant!r}")


def nonperiodic_domain(theta: float, f: EdgeData) -> PolygonDomain:
    """Sector of angle theta with data +inf on 0p1, f on the arc, 0 on 0p2."""
    theta = _check_theta(theta)
    f = _finite_arc_data(f, 0.0, theta)
    positive = f.bounds()[0] > 0
    verts = [ORIGIN, IdealPoint(0.0), IdealPoint(theta)]
    edges = [
        Edge(0, 1, "geodesic", PLUS, "0p1"),
        Edge(1, 2, "arc", f, "p1p2"),
        Edge(2, 0, "geodesic", EdgeData.constant(0.0), "0p2"),
    ]
    params = {"theta": theta, "embedding_guaranteed": bool(theta <= math.pi / 2 or positive)}
    return PolygonDomain(verts, edges, "non-periodic", params)


# -- Jenkins-Serrin admissibility ---------------------------------------------


@dataclass(frozen=True)
class JSCertificate:
    admissible: bool
    worst_polygon: tuple
    margin: float
    truncation_param: float
    boundary_case: bool = False
    history: tuple = ()


def _side_length(za: complex, ideal_a: bool, zb: complex, ideal_b: bool, level: float) -> float:
    if ideal_a and ideal_b:
        return math.log(abs(za - zb) ** 2 / 4.0) - 2.0 * level
    if ideal_a:
        return float(busemann(za, zb)) - level
    if ideal_b:
        return float(busemann(zb, za)) - level
    return hyp_distance(za, zb)


def _check_horocycles(d: PolygonDomain, level: float) -> None:
    V = d.vertices
    for i, j in itertools.combinations(range(len(V)), 2):
        a, b = V[i], V[j]
        ia, ib = isinstance(a, IdealPoint), isinstance(b, IdealPoint)
        if not (ia or ib):
            continue
        if _side_length(a.z, ia, b.z, ib, level) <= 0.0:
            raise DomainError(f"horocycles at vertices {i} and {j} overlap; decrease delta")


def _margins(d: PolygonDomain, delta: float):
    level = horocycle_level(delta)
    _check_horocycles(d, level)
    V = d.vertices
    N = len(V)
    ideal = [isinstance(v, IdealPoint) for v in V]
    sign_of_side = {}
    for i, e in enumerate(d.edges):
        if e.kind == "geodesic":
            sign_of_side[(e.start, e.end)] = e.data.sign
    best = (math.inf, ())
    omega_margin = None
    for size in range(3, N + 1):
        for P in itertools.combinations(range(N), size):
            perim = alpha = beta = 0.0
            for k in range(size):
                i, j = P[k], P[(k + 1) % size]
                L = _side_length(V[i].z, ideal[i], V[j].z, ideal[j], level)
                perim += L
                s = sign_of_side.get((i, j), 0)
                if s > 0:
                    alpha += L
                elif s < 0:
                    beta += L
            m = min(perim - 2 * alpha, perim - 2 * beta)
            if size == N:
                omega_margin = (m, perim, alpha, beta)
            if m < best[0]:
                best = (m, P)
    return best, omega_margin


def jenkins_serrin_check(
    d: PolygonDomain,
    delta: float = 0.05,
    auto_halve: bool = True,
    rel_tol: float = 0.05,
    min_delta: float = 1e-9,
) -> JSCertificate:
    """Decide 2 alpha(P) < |P| and 2 beta(P) < |P| over inscribed polygons.

    Lengths are measured between horocycles of Euclidean diameter ``delta``
    at the ideal vertices.  With ``auto_halve`` the horocycles are shrunk
    until the minimal margin changes by less than ``rel_tol``.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    (m, P), omega = _margins(d, delta)
    history = [(delta, m)]
    if auto_halve:
        while delta / 2 >= min_delta:
            (m2, P2), omega2 = _margins(d, delta / 2)
            delta /= 2
            history.append((delta, m2))
            change = abs(m2 - m) / max(abs(m), 1e-300)
            m, P, omega = m2, P2, omega2
            if change < rel_tol:
                break
    boundary = False
    if not d.has_finite_data and omega is not None:
        om, perim, alpha, beta = omega
        boundary = abs(alpha - beta) <= 1e-9 * max(1.0, perim)
    admissible = m > 0
    return JSCertificate(admissible, tuple(P), float(m), float(delta), boundary, tuple(history))


# -- serialisation -------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (tuple, list)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return str(x)


def _parse(s: str):
    s = s.strip()
    if s in ("true", "false"):
        return s == "true"
    if s.startswith("[") and s.endswith("]"):
        body = s[1:-1].strip()
        return tuple(_parse(t) for t in body.split(",")) if body else ()
    if "/" in s:
        p, q = s.split("/")
        return Fraction(int(p), int(q))
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def domain_to_text(d: PolygonDomain) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["domain"] = {"format": "minh2r-domain/1", "family": d.family}
    cp["params"] = {k: _fmt(v) for k, v in sorted(d.params.items())}
    verts = {}
    for i, v in enumerate(d.vertices):
        if isinstance(v, IdealPoint):
            verts[f"v{i}"] = f"ideal {v.angle!r}"
        else:
            verts[f"v{i}"] = f"disk {v.z.real!r} {v.z.imag!r}"
    cp["vertices"] = verts
    edges = {}
    for i, e in enumerate(d.edges):
        val = f" {e.data.value!r}" if e.data.kind == CONSTANT else ""
        edges[f"e{i}"] = f"{e.start} {e.end} {e.kind} {e.label or '-'} {e.data.kind}{val}"
    cp["edges"] = edges
    for i, e in enumerate(d.edges):
        if e.data.kind == SAMPLED:
            cp[f"samples.e{i}"] = {
                f"s{k}": f"{a!r} {v!r}" for k, (a, v) in enumerate(zip(e.data.angles, e.data.values))
            }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def domain_from_text(text: str) -> PolygonDomain:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(text)
    if cp.get("domain", "format", fallback="") != "minh2r-domain/1":
        raise DomainError("not a minh2r domain file")
    family = cp["domain"]["family"]
    params = {k: _parse(v) for k, v in cp["params"].items()}
    verts = []
    for k in sorted(cp["vertices"], key=lambda s: int(s[1:])):
        parts = cp["vertices"][k].split()
        if parts[0] == "ideal":
            verts.append(IdealPoint(float(parts[1])))
        else:
            verts.append(DiskPoint(complex(float(parts[1]), float(parts[2]))))
    edges = []
    for k in sorted(cp["edges"], key=lambda s: int(s[1:])):
        parts = cp["edges"][k].split()
        start, end, kind, label, dkind = int(parts[0]), int(parts[1]), parts[2], parts[3], parts[4]
        label = "" if label == "-" else label
        if dkind == CONSTANT:
            data = EdgeData.constant(float(parts[5]))
        elif dkind == SAMPLED:
            sec = cp[f"samples.{k}"]
            rows = [sec[s].split() for s in sorted(sec, key=lambda s: int(s[1:]))]
            data = EdgeData.sampled([float(r[0]) for r in rows], [float(r[1]) for r in rows])
        else:
            data = EdgeData(dkind)
        edges.append(Edge(start, end, kind, data, label))
    return PolygonDomain(tuple(verts), tuple(edges), family, params)
