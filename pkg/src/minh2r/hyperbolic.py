"""Poincare disk geometry and isometries of H^2 x R.

Disk automorphisms are kept as SU(1,1) pairs ``(alpha, beta)`` acting by
``w -> (alpha w + beta) / (conj(beta) w + conj(alpha))``, optionally preceded
by complex conjugation.  Vertical parts are affine maps ``t -> +-t + c`` with
``c`` stored as an exact :class:`~fractions.Fraction` in units of ``unit``
(normally the height parameter ``h`` of a construction).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

EPS_INTERIOR = 1e-14
TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Invalid input to a geometric primitive."""


class DegenerateError(GeometryError):
    """Coincident or otherwise degenerate configuration."""


@dataclass(frozen=True)
class DiskPoint:
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not abs(z) < 1.0 - EPS_INTERIOR:
            raise GeometryError(f"point {z!r} is not interior to the unit disk")
        object.__setattr__(self, "z", z)

    def __repr__(self):
        return f"DiskPoint({self.z!r})"


ORIGIN = DiskPoint(0j)


@dataclass(frozen=True)
class IdealPoint:
    """A point e^{i angle} of the circle at infinity."""

    angle: float

    def __post_init__(self):
        a = math.fmod(float(self.angle), TWO_PI)
        if a < 0.0:
            a += TWO_PI
        if a >= TWO_PI:
            a = 0.0
        object.__setattr__(self, "angle", a)

    @property
    def z(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def __repr__(self):
        return f"IdealPoint({self.angle!r})"


Point = Union[DiskPoint, IdealPoint]


def _coord(p) -> complex:
    if isinstance(p, (DiskPoint, IdealPoint)):
        return p.z
    return complex(p)


def _check_interior(z):
    if np.any(np.abs(z) >= 1.0 - EPS_INTERIOR):
        raise GeometryError("hyperbolic distance needs interior points")


def conformal_factor(z):
    """lambda = 2 / (1 - |z|^2), vectorised."""
    z = np.asarray(z)
    return 2.0 / (1.0 - (z.real**2 + z.imag**2))


def hyp_distance(p, q):
    """Hyperbolic distance in the disk (curvature -1).

    Uses ``2 asinh(|p-q| / sqrt((1-|p|^2)(1-|q|^2)))``, which equals
    ``arcosh(1 + 2|p-q|^2 / ((1-|p|^2)(1-|q|^2)))`` but keeps full relative
    accuracy for nearby points.  Accepts arrays of complex numbers.
    """
    pz = np.asarray(_coord(p) if not isinstance(p, np.ndarray) else p)
    qz = np.asarray(_coord(q) if not isinstance(q, np.ndarray) else q)
    _check_interior(pz)
    _check_interior(qz)
    den = np.sqrt((1.0 - np.abs(pz) ** 2) * (1.0 - np.abs(qz) ** 2))
    d = 2.0 * np.arcsinh(np.abs(pz - qz) / den)
    return float(d) if d.ndim == 0 else d


def busemann(xi: complex, z):
    """Busemann function log(|xi - z|^2 / (1 - |z|^2)) of the ideal point xi.

    Decreases with unit speed along geodesics running into ``xi``; its level
    sets are the horocycles at ``xi``.
    """
    z = np.asarray(z)
    return np.log(np.abs(xi - z) ** 2 / (1.0 - np.abs(z) ** 2))


def horocycle_level(delta: float) -> float:
    """Busemann level of the horocycle with Euclidean diameter ``delta``."""
    return math.log(delta / (2.0 - delta))


def point_toward(w: complex, target: complex, d: float) -> complex:
    """Point at hyperbolic distance ``d`` from ``w`` on the geodesic to ``target``.

    ``target`` may be interior or ideal.
    """
    w = complex(w)
    t = (target - w) / (1.0 - w.conjugate() * target)
    u = t / abs(t)
    x = math.tanh(d / 2.0) * u
    return (x + w) / (1.0 + w.conjugate() * x)


@dataclass(frozen=True)
class Geodesic:
    """Geodesic through two points of the closed disk.

    ``kind == "diameter"`` stores the unit ``direction``; ``kind == "arc"``
    stores the Euclidean ``center``/``radius`` of the supporting circle,
    which is orthogonal to the unit circle.
    """

    a: Point
    b: Point
    kind: str
    direction: complex | None = None
    center: complex | None = None
    radius: float | None = None

    def reflect(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "diameter":
            out = self.direction**2 * np.conj(z)
        else:
            c = self.center
            out = c + self.radius**2 / np.conj(z - c)
        return complex(out) if out.ndim == 0 else out

    def distance(self, z):
        """Hyperbolic distance from interior points to the full geodesic."""
        z = np.asarray(z, dtype=complex)
        one_minus = 1.0 - np.abs(z) ** 2
        if self.kind == "diameter":
            s = 2.0 * np.abs((z * np.conj(self.direction)).imag) / one_minus
        else:
            s = np.abs(np.abs(z - self.center) ** 2 - self.radius**2) / (self.radius * one_minus)
        d = np.arcsinh(s)
        return float(d) if d.ndim == 0 else d

    def residual(self, z) -> float:
        """How far ``z`` is from the supporting line/circle (Euclidean)."""
        z = complex(z)
        if self.kind == "diameter":
            return abs((z * self.direction.conjugate()).imag)
        return abs(abs(z - self.center) - self.radius)

    def orthogonality_residual(self) -> float:
        if self.kind == "diameter":
            return 0.0
        return abs(abs(self.center) ** 2 - self.radius**2 - 1.0)

    def mobius_reflection(self) -> "Mobius":
        """Reflection in this geodesic as an anti-holomorphic disk map."""
        if self.kind == "diameter":
            return Mobius(complex(self.direction), 0j, conj=True)
        c, r = self.center, self.radius
        return Mobius(-1j * c / r, 1j / r, conj=True)


def geodesic_between(a, b) -> Geodesic:
    """The geodesic joining ``a`` and ``b`` (DiskPoint or IdealPoint)."""
    if not isinstance(a, (DiskPoint, IdealPoint)):
        a = DiskPoint(a)
    if not isinstance(b, (DiskPoint, IdealPoint)):
        b = DiskPoint(b)
    za, zb = a.z, b.z
    if abs(za - zb) < 1e-15 or (
        isinstance(a, IdealPoint) and isinstance(b, IdealPoint) and a.angle == b.angle
    ):
        raise DegenerateError("coincident endpoints do not determine a geodesic")
    cross = za.real * zb.imag - za.imag * zb.real
    if za == 0 or zb == 0 or abs(cross) < 1e-15:
        ref = zb if abs(zb) > abs(za) else za
        return Geodesic(a, b, "diameter", direction=ref / abs(ref))
    # centre c of a circle orthogonal to |z| = 1 through p: Re(p conj c) = (1 + |p|^2) / 2
    ra = (1.0 + abs(za) ** 2) / 2.0
    rb = (1.0 + abs(zb) ** 2) / 2.0
    cx = (ra * zb.imag - rb * za.imag) / cross
    cy = (za.real * rb - zb.real * ra) / cross
    c = complex(cx, cy)
    r = math.sqrt(abs(c) ** 2 - 1.0)
    return Geodesic(a, b, "arc", center=c, radius=r)


def reflect_across(g: Geodesic, p):
    """Reflect a disk point (or array of points) across a geodesic."""
    if isinstance(p, DiskPoint):
        return DiskPoint(g.reflect(p.z))
    return g.reflect(p)


@dataclass(frozen=True)
class Mobius:
    """Disk automorphism ``z -> m(conj(z) if conj else z)`` with m in SU(1,1)."""

    alpha: complex
    beta: complex
    conj: bool = False

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        n = abs(a) ** 2 - abs(b) ** 2
        if n <= 0:
            raise GeometryError("not a disk automorphism")
        s = math.sqrt(n)
        object.__setattr__(self, "alpha", a / s)
        object.__setattr__(self, "beta", b / s)

    @property
    def rotation(self) -> complex:
        """e^{i phi} in the canonical form e^{i phi}(z - a)/(1 - conj(a) z)."""
        return self.alpha / self.alpha.conjugate()

    @property
    def center(self) -> complex:
        """The point ``a`` sent to the origin (before optional conjugation)."""
        return -self.beta / self.alpha

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        w = np.conj(z) if self.conj else z
        out = (self.alpha * w + self.beta) / (self.beta.conjugate() * w + self.alpha.conjugate())
        return complex(out) if out.ndim == 0 else out

    def apply_ideal(self, angle: float) -> float:
        z = cmath.exp(1j * angle)
        w = self(z)
        return IdealPoint(cmath.phase(w)).angle

    def compose(self, other: "Mobius") -> "Mobius":
        """self o other."""
        a2, b2 = other.alpha, other.beta
        if self.conj:
            a2, b2 = a2.conjugate(), b2.conjugate()
        a1, b1 = self.alpha, self.beta
        alpha = a1 * a2 + b1 * b2.conjugate()
        beta = a1 * b2 + b1 * a2.conjugate()
        return Mobius(alpha, beta, self.conj != other.conj)

    def inverse(self) -> "Mobius":
        a, b = self.alpha, self.beta
        ia, ib = a.conjugate(), -b
        if self.conj:
            ia, ib = ia.conjugate(), ib.conjugate()
        return Mobius(ia, ib, self.conj)

    def key(self) -> tuple:
        r, c = self.rotation, self.center
        return (r.real, r.imag, c.real, c.imag, float(self.conj))

    def orientation_reversing(self) -> bool:
        return self.conj


IDENTITY_MOBIUS = Mobius(1 + 0j, 0j)


def _to_frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**12)


@dataclass(frozen=True)
class Isometry:
    """Isometry (z, t) -> (mobius(z), +-t + vshift * unit) of H^2 x R."""

    mobius: Mobius = IDENTITY_MOBIUS
    vshift: Fraction = field(default_factory=Fraction)
    vflip: bool = False
    unit: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "vshift", _to_frac(self.vshift))

    @property
    def shift_value(self) -> float:
        return float(self.vshift) * self.unit

    def height(self, t):
        t = np.asarray(t, dtype=float)
        out = (-t if self.vflip else t) + self.shift_value
        return float(out) if out.ndim == 0 else out

    def apply(self, z, t):
        return self.mobius(z), self.height(t)

    def apply_ideal(self, angle: float) -> float:
        return self.mobius.apply_ideal(angle)

    def compose(self, other: "Isometry") -> "Isometry":
        """self o other (apply ``other`` first)."""
        unit = _merge_units(self, other)
        shift = (-other.vshift if self.vflip else other.vshift) + self.vshift
        return Isometry(self.mobius.compose(other.mobius), shift, self.vflip != other.vflip, unit)

    def inverse(self) -> "Isometry":
        shift = self.vshift if self.vflip else -self.vshift
        return Isometry(self.mobius.inverse(), shift, self.vflip, self.unit)

    def key(self) -> tuple:
        return self.mobius.key() + (float(self.vflip), self.shift_value)

    def isclose(self, other: "Isometry", tol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(np.subtract(self.key(), other.key())) <= tol))


def _merge_units(a: Isometry, b: Isometry) -> float:
    if a.vshift == 0:
        return b.unit
    if b.vshift == 0 or a.unit == b.unit:
        return a.unit
    raise ValueError(f"cannot compose vertical shifts in units {a.unit} and {b.unit}")


def compose(a: Isometry, b: Isometry) -> Isometry:
    return a.compose(b)


def apply(iso: Isometry, p, t):
    z = _coord(p) if isinstance(p, DiskPoint) else p
    return iso.apply(z, t)


IDENTITY = Isometry()


def rotation_about_origin(alpha: float) -> Isometry:
    return Isometry(Mobius(cmath.exp(0.5j * alpha), 0j))


def vertical_translation(shift, unit: float = 1.0) -> Isometry:
    return Isometry(IDENTITY_MOBIUS, _to_frac(shift), False, unit)


def vertical_flip(height, unit: float = 1.0) -> Isometry:
    """t -> 2 * height * unit - t."""
    return Isometry(IDENTITY_MOBIUS, 2 * _to_frac(height), True, unit)


def screw_motion(alpha: float, shift, unit: float = 1.0) -> Isometry:
    return vertical_translation(shift, unit).compose(rotation_about_origin(alpha))


def axis_rotation() -> Isometry:
    """Rotation by pi about the vertical line {0} x R."""
    return rotation_about_origin(math.pi)


def horizontal_reflection(g: Geodesic, height, unit: float = 1.0) -> Isometry:
    """Rotation by pi about the horizontal geodesic g x {height * unit}."""
    return Isometry(g.mobius_reflection(), 2 * _to_frac(height), True, unit)


def _cayley(p: complex) -> np.ndarray:
    # disk -> upper half plane, p -> infinity, -p -> 0
    return np.array([[1j, 1j * p], [-1.0, p]], dtype=complex)


def _su11(m: np.ndarray) -> Mobius:
    m = m / np.sqrt(np.linalg.det(m))
    return Mobius(complex(m[0, 0]), complex(m[0, 1]))


def parabolic_by(fixed: IdealPoint, length: float) -> Mobius:
    """Parabolic automorphism fixing ``fixed``: translation by ``length`` in the
    half-plane chart where ``fixed`` sits at infinity."""
    c = _cayley(fixed.z)
    t = np.array([[1.0, length], [0.0, 1.0]], dtype=complex)
    return _su11(np.linalg.inv(c) @ t @ c)


def _halfplane_coord(fixed: IdealPoint, xi: IdealPoint) -> float:
    p = fixed.z
    w = 1j * (p + xi.z) / (p - xi.z)
    return w.real


def parabolic_translation(fixed: IdealPoint, src: IdealPoint, dst: IdealPoint) -> Isometry:
    """Parabolic translation fixing ``fixed`` and sending ``src`` to ``dst``."""
    if src.angle == fixed.angle or dst.angle == fixed.angle:
        raise DegenerateError("src and dst must differ from the fixed point")
    if abs(src.z - fixed.z) < 1e-15 or abs(dst.z - fixed.z) < 1e-15:
        raise DegenerateError("src and dst must differ from the fixed point")
    b = _halfplane_coord(fixed, dst) - _halfplane_coord(fixed, src)
    return Isometry(parabolic_by(fixed, b))


def parabolic_length(fixed: IdealPoint, src: IdealPoint, dst: IdealPoint) -> float:
    return _halfplane_coord(fixed, dst) - _halfplane_coord(fixed, src)
