"""Complete surfaces from a fundamental piece: reflections, orbits and the
exact bookkeeping of boundary heights over each sector."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .domains import PolygonDomain
from .hyperbolic import (
    IDENTITY,
    IdealPoint,
    Isometry,
    axis_rotation,
    geodesic_between,
    horizontal_reflection,
    ORIGIN,
)
from .solver import GraphSolution

DEDUP_TOL = 1e-10
DEFAULT_L = 6


class AssemblyError(ValueError):
    pass


# -- exact heights -------------------------------------------------------------


@dataclass(frozen=True, order=True)
class HeightExpr:
    """``c_h * h + f_sign * f``, or +-infinity when ``inf`` is +-1."""

    c_h: Fraction = Fraction(0)
    f_sign: int = 0
    inf: int = 0

    def __post_init__(self):
        object.__setattr__(self, "c_h", Fraction(self.c_h))
        if self.inf:
            object.__setattr__(self, "c_h", Fraction(0))
            object.__setattr__(self, "f_sign", 0)

    @classmethod
    def const(cls, c) -> "HeightExpr":
        return cls(Fraction(c))

    @classmethod
    def f(cls, sign: int = 1, c=0) -> "HeightExpr":
        return cls(Fraction(c), sign)

    @classmethod
    def infinity(cls, sign: int) -> "HeightExpr":
        return cls(Fraction(0), 0, 1 if sign > 0 else -1)

    def shift(self, c) -> "HeightExpr":
        if self.inf:
            return self
        return HeightExpr(self.c_h + Fraction(c), self.f_sign)

    def __neg__(self) -> "HeightExpr":
        return HeightExpr(-self.c_h, -self.f_sign, -self.inf)

    def reflect(self, c) -> "HeightExpr":
        """t -> 2c - t with c in units of h."""
        return (-self).shift(2 * Fraction(c))

    def evaluate(self, h: float, f: float = 0.0) -> float:
        if self.inf:
            return math.inf * self.inf
        return float(self.c_h) * h + self.f_sign * f

    def difference(self, other: "HeightExpr", f_range=(0.0, 0.0)):
        """Interval of (self - other) / h for f / h in ``f_range``; None when
        both are the same infinity, (+-inf, +-inf) when they differ."""
        if self.inf or other.inf:
            if self.inf == other.inf:
                return None
            s = self.inf if self.inf else -other.inf
            return (math.inf * s, math.inf * s)
        c = float(self.c_h - other.c_h)
        s = self.f_sign - other.f_sign
        lo, hi = sorted((c + s * f_range[0], c + s * f_range[1]))
        return (lo, hi)

    def __str__(self) -> str:
        if self.inf:
            return "+inf" if self.inf > 0 else "-inf"
        parts = []
        if self.c_h:
            parts.append(f"{self.c_h}h")
        if self.f_sign:
            parts.append(("+" if self.f_sign > 0 else "-") + "f")
        s = "".join(parts) or "0"
        return s[1:] if s.startswith("+") else s


Triple = tuple


@dataclass(frozen=True)
class Sheet:
    values: Triple  # one HeightExpr per edge: (lower ray, upper ray, far edges...)
    word: str


@dataclass(frozen=True)
class SheetStack:
    sector: int
    sheets: tuple

    def first_edge_values(self) -> list:
        return [s.values[0].c_h for s in self.sheets]

    def shifted(self, c) -> "SheetStack":
        sheets = tuple(Sheet(tuple(v.shift(c) for v in s.values), s.word) for s in self.sheets)
        return SheetStack(self.sector, sheets)

    def value_set(self) -> set:
        return {s.values for s in self.sheets}


# The symmetry group generated by the two horizontal reflections R1 (across
# the ray at angle 0, height 0) and R2 (across the ray at angle pi/K, height
# h) together with the axis rotation A is {A^a S^j R1^b}, S = R2 R1.  On a
# sector of angle pi/K the element acts by
#   z -> e^{i (2j + K a) pi / K} (conj z if b),  t -> (-1)^b t + 2 j h.


def _word(a: int, j: int, b: int) -> str:
    parts = []
    if a:
        parts.append("A")
    if j:
        parts.append("S" if j == 1 else f"S^{j}")
    if b:
        parts.append("R1")
    return ".".join(parts) or "e"


def _element_values(base: Triple, j: int, b: int) -> Triple:
    shift = 2 * j
    if not b:
        return tuple(v.shift(shift) for v in base)
    # R1 swaps the two rays and reverses the far edges; t -> -t first
    lower, upper, far = base[0], base[1], base[2:]
    flipped = (-upper, -lower) + tuple(-v for v in reversed(far))
    return tuple(v.shift(shift) for v in flipped)


def _sector_of(K: int, a: int, j: int, b: int) -> int:
    rot = (2 * j + K * a) % (2 * K)
    return rot + 1 if not b else (rot - 1) % (2 * K) + 1


def _elements_over(K: int, sector: int, k_range, axis: bool = True):
    """(a, j, b) with the element mapping the base sector onto ``sector``,
    one per translate index k (j shifted by K k)."""
    out = []
    for a in (0, 1) if axis else (0,):
        for b in (0, 1):
            for j0 in range(K):
                if _sector_of(K, a, j0, b) == sector:
                    out.extend((a, j0 + K * k, b) for k in k_range)
    return out


def _stack(K: int, base: Triple, sector: int, k_range, axis=True) -> SheetStack:
    if not 1 <= sector <= 2 * K:
        raise AssemblyError(f"sector must lie in 1..{2 * K}")
    sheets = [Sheet(_element_values(base, j, b), _word(a, j, b)) for a, j, b in _elements_over(K, sector, k_range, axis)]
    sheets.sort(key=lambda s: (s.values[0].c_h, s.word))
    return SheetStack(sector, tuple(sheets))


def scherk_base(k: int = 0) -> Triple:
    """Fundamental heights (0 on the first ray, h on the second, then the far
    sides) for a polygon with ``k`` interior ideal vertices."""
    far = tuple(HeightExpr.infinity(1 if i % 2 == 0 else -1) for i in range(k + 1))
    return (HeightExpr.const(0), HeightExpr.const(1)) + far


def helicoidal_base() -> Triple:
    return (HeightExpr.const(0), HeightExpr.const(1), HeightExpr.f())


def sheet_stack(n: int, h: float = 1.0, sector: int = 1, k_range=range(-1, 2), k_vertices: int = 0) -> SheetStack:
    """Sheets of the helicoidal-Scherk surface over sector ``sector`` of
    angle pi/2n, in units of h; translate indices ``k_range``."""
    return _stack(2 * n, scherk_base(k_vertices), sector, k_range)


def helicoidal_stack(m: int, sector: int, k_range=range(-1, 2)) -> SheetStack:
    return _stack(m, helicoidal_base(), sector, k_range)


def helicoidal_sheet_values(m: int, h: float = 1.0):
    """(sector m+1 triple of the S-translate, axis-reflected triple), in
    units of h."""
    if m < 1:
        raise AssemblyError("m must be a positive integer")
    stack = helicoidal_stack(m, m + 1, range(0, 1))
    reflected = next(s for s in stack.sheets if s.word.startswith("A"))
    own = next(s for s in stack.sheets if not s.word.startswith("A"))
    return own.values, reflected.values


# -- placed copies ------------------------------------------------------------


@dataclass
class SurfaceComplex:
    piece: GraphSolution
    generators: dict
    placements: list = field(default_factory=list)  # (word, Isometry)
    L: int = DEFAULT_L
    family: str = ""
    symmetries: tuple = ()
    derived: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.placements)

    def words(self) -> list:
        return [w for w, _ in self.placements]

    def isometry(self, word: str) -> Isometry:
        for w, g in self.placements:
            if w == word:
                return g
        raise KeyError(word)

    def contains(self, iso: Isometry, tol: float = DEDUP_TOL) -> bool:
        return _find(self._keys(), iso, tol) >= 0

    def _keys(self) -> np.ndarray:
        return np.array([g.key() for _, g in self.placements]) if self.placements else np.zeros((0, 6))

    def evaluate(self, z) -> np.ndarray:
        """Heights of every placed copy over chart points ``z``: array
        (copies, points), NaN where a copy does not cover the point."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.full((len(self.placements), len(z)), np.nan)
        for k, (_, g) in enumerate(self.placements):
            inv = g.inverse()
            vals = self.piece.evaluate(inv.mobius(z))
            out[k] = g.height(vals)
        return out

    def vertices(self, k: int):
        """Chart points and heights of copy ``k`` at the piece's mesh vertices."""
        _, g = self.placements[k]
        return g.mobius(self.piece.mesh.points), g.height(self.piece.u)

    def write_obj(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(obj_text(self))


def _find(keys: np.ndarray, iso: Isometry, tol: float) -> int:
    if not len(keys):
        return -1
    hit = np.flatnonzero(np.all(np.abs(keys - np.array(iso.key())) <= tol, axis=1))
    return int(hit[0]) if len(hit) else -1


def _inverse_name(name: str) -> str:
    return name[:-3] if name.endswith("^-1") else name + "^-1"


def orbit(cx: SurfaceComplex, L: int | None = None, include_inverses: bool | None = None) -> SurfaceComplex:
    """All placements g_1 ... g_k (k <= L) over the generators, deduplicated
    at DEDUP_TOL.  Non-involutive generators contribute their inverses."""
    L = cx.L if L is None else L
    gens = []
    for name, g in cx.generators.items():
        gens.append((name, g))
        inv = g.inverse()
        involution = g.compose(g).isclose(IDENTITY, DEDUP_TOL)
        if (include_inverses if include_inverses is not None else True) and not involution:
            gens.append((_inverse_name(name), inv))
    placements = [("e", IDENTITY)]
    keys = [IDENTITY.key()]
    frontier = placements[:]
    for _ in range(L):
        nxt = []
        for word, g in frontier:
            for name, s in gens:
                h = s.compose(g)
                if _find(np.array(keys), h, DEDUP_TOL) >= 0:
                    continue
                w = name if word == "e" else f"{name}.{word}"
                placements.append((w, h))
                keys.append(h.key())
                nxt.append((w, h))
        frontier = nxt
    return SurfaceComplex(cx.piece, cx.generators, placements, L, cx.family, cx.symmetries, cx.derived)


def schwarz_reflect_horizontal(piece: GraphSolution, label: str, d: PolygonDomain | None = None, unit: float = 1.0):
    """Placed copy (word, isometry) obtained by the pi-rotation about the
    geodesic side ``label`` at its constant height."""
    d = d or piece.mesh.domain
    i = d.edge_index(label)
    e = d.edges[i]
    if e.kind != "geodesic" or e.data.kind != "constant":
        raise AssemblyError(f"side {label!r} does not carry constant data")
    c = Fraction(e.data.value).limit_denominator(10**12) / Fraction(unit).limit_denominator(10**12)
    return f"R[{label}]", horizontal_reflection(d.geodesic(i), c, unit)


def axis_reflect(piece: GraphSolution, axis: str = "vertical", label: str | None = None, unit: float = 1.0):
    """Vertical axis {0} x R (z, t) -> (-z, t), or the pi-rotation about a
    horizontal boundary geodesic ``label``."""
    mesh = piece.mesh
    if axis == "vertical":
        if np.min(np.abs(mesh.points[mesh.boundary])) > 1e-2:
            raise AssemblyError("the vertical axis does not meet the piece")
        return "A", axis_rotation()
    if label is None:
        raise AssemblyError("a horizontal axis needs a boundary side")
    return schwarz_reflect_horizontal(piece, label, unit=unit)


def trace_mismatch(piece: GraphSolution, word_iso, tag: str) -> float:
    """Largest difference between the piece and its copy along the boundary
    piece ``tag`` (the reflection interface), at shared vertices."""
    _, g = word_iso
    idx = piece.mesh.tag_vertices(tag)
    z = piece.mesh.points[idx]
    zi, ti = g.apply(z, piece.u[idx])
    # the copy fixes the interface pointwise; compare positions and heights
    return float(max(np.max(np.abs(zi - z)), np.max(np.abs(ti - piece.u[idx]))))


# -- families -----------------------------------------------------------------


def family_generators(d: PolygonDomain) -> tuple[dict, tuple, dict]:
    """Generators, the symmetries used, and derived elements (S, T, P)."""
    fam = d.family
    p = d.params
    h = float(p.get("h", 1.0))
    if fam in ("helicoidal-scherk", "helicoidal"):
        K = 2 * int(p["n"]) if fam == "helicoidal-scherk" else int(p["m"])
        g1 = geodesic_between(ORIGIN, IdealPoint(0.0))
        g2 = geodesic_between(ORIGIN, IdealPoint(math.pi / K))
        R1 = horizontal_reflection(g1, 0, h)
        R2 = horizontal_reflection(g2, 1, h)
        S = R2.compose(R1)
        T = IDENTITY
        for _ in range(K):
            T = S.compose(T)
        gens = {"S": S, "R1": R1, "A": axis_rotation()}
        return gens, ("horizontal-reflection", "vertical-axis"), {"R2": R2, "T": T}
    if fam.startswith("axis-at-infinity"):
        g1 = geodesic_between(IdealPoint(math.pi), IdealPoint(0.0))
        g2 = geodesic_between(IdealPoint(math.pi), IdealPoint(float(p["theta"])))
        R1 = horizontal_reflection(g1, 0, h)
        R2 = horizontal_reflection(g2, 1, h)
        return {"P": R2.compose(R1), "R1": R1}, ("horizontal-reflection",), {"R2": R2}
    if fam == "non-periodic":
        i = next(k for k, e in enumerate(d.edges) if e.kind == "geodesic" and not e.data.infinite)
        R = horizontal_reflection(d.geodesic(i), 0, 1.0)
        return {"R": R, "A": axis_rotation()}, ("horizontal-rotation", "vertical-axis"), {}
    raise AssemblyError(f"no symmetry group known for family {fam!r}")


def assemble(piece: GraphSolution, d: PolygonDomain | None = None, L: int = DEFAULT_L) -> SurfaceComplex:
    d = d or piece.mesh.domain
    gens, syms, derived = family_generators(d)
    cx = SurfaceComplex(piece, gens, [], L, d.family, syms, derived)
    return orbit(cx, L)


def assemble_family(d: PolygonDomain, ell: float = 0.1, Ms=(4.0, 8.0, 16.0), L: int = DEFAULT_L, **kw):
    """Triangulate, run the truncation sweep and assemble the last level.
    Returns (complex, sweep solutions)."""
    from .solver import truncation_sweep

    sols = truncation_sweep(d, Ms, ell=ell, **kw)
    return assemble(sols[-1], d, L), sols


def obj_text(cx: SurfaceComplex) -> str:
    """Wavefront OBJ: one group per placement in placement order; vertices of
    each copy follow the piece's vertex order; faces are counter-clockwise in
    the chart (reversed for orientation-reversing copies)."""
    mesh = cx.piece.mesh
    tris = mesh.triangles
    lines = [f"# minh2r {cx.family} copies={len(cx.placements)} vertices_per_copy={mesh.n_vertices}"]
    offset = 1
    for k, (word, g) in enumerate(cx.placements):
        z, t = cx.vertices(k)
        lines.append(f"g {word}")
        lines.extend(f"v {x!r} {y!r} {s!r}" for x, y, s in zip(z.real.tolist(), z.imag.tolist(), t.tolist()))
        faces = tris[:, ::-1] if g.mobius.conj else tris
        lines.extend(f"f {a + offset} {b + offset} {c + offset}" for a, b, c in faces.tolist())
        offset += mesh.n_vertices
    return "\n".join(lines) + "\n"
