"""Closed-form 2x2 linear algebra and projective-line geometry.

Everything here is pure value arithmetic: no iteration, no global state,
safe to call from any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularInputError

PI = math.pi

# |det| below this times the squared entry scale counts as singular.
_DET_RTOL = 1e-14
# alpha1/alpha2 closer than this counts as isotropic.
_ISO_RTOL = 1e-12


@dataclass(frozen=True)
class Mat2:
    """2x2 real matrix, row-major entries."""

    a11: float
    a12: float
    a21: float
    a22: float

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diag(cls, d1: float, d2: float) -> "Mat2":
        return cls(float(d1), 0.0, 0.0, float(d2))

    @classmethod
    def rotation(cls, angle: float) -> "Mat2":
        c, s = math.cos(angle), math.sin(angle)
        return cls(c, -s, s, c)

    @classmethod
    def from_array(cls, a) -> "Mat2":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=float)

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def transpose(self) -> "Mat2":
        return Mat2(self.a11, self.a21, self.a12, self.a22)

    def scale_bound(self) -> float:
        """Largest absolute entry; used for singularity thresholds."""
        return max(abs(self.a11), abs(self.a12), abs(self.a21), abs(self.a22))

    def is_singular(self) -> bool:
        s = self.scale_bound()
        return abs(self.det) <= _DET_RTOL * s * s

    @property
    def inverse(self) -> "Mat2":
        if self.is_singular():
            raise SingularInputError(f"matrix {self} is numerically singular")
        f = 1.0 / self.det
        return Mat2(self.a22 * f, -self.a12 * f, -self.a21 * f, self.a11 * f)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def apply(self, points) -> np.ndarray:
        """Apply to a single 2-vector or an (n, 2) array of row vectors."""
        pts = np.asarray(points, dtype=float)
        return pts @ np.array([[self.a11, self.a21], [self.a12, self.a22]])


def normalize_angle_projective(angle: float) -> float:
    """Reduce a line angle into [0, pi) with floored modulo."""
    a = angle % PI
    return 0.0 if a >= PI else a


@dataclass(frozen=True)
class ProjLine:
    """A line through the origin, represented by its angle in [0, pi)."""

    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", normalize_angle_projective(float(self.angle)))

    def vector(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])


@dataclass(frozen=True)
class Direction:
    """A unit vector on the circle, represented by its angle in [0, 2*pi)."""

    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "angle", float(self.angle) % (2.0 * PI))

    def vector(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])

    def carrier(self) -> ProjLine:
        """The line spanned by this direction; theta and theta+pi agree."""
        return ProjLine(self.angle)

    def opposite(self) -> "Direction":
        return Direction(self.angle + PI)


@dataclass(frozen=True)
class SingularData:
    """Singular values, semiaxis orientations and singular directions of a 2x2 map."""

    alpha1: float
    alpha2: float
    theta1: ProjLine
    theta2: ProjLine
    eta1: tuple[float, float]
    eta2: tuple[float, float]

    @property
    def ratio(self) -> float:
        """alpha1 / alpha2, always >= 1."""
        return self.alpha1 / self.alpha2


@dataclass(frozen=True)
class AffineMap2:
    """x -> linear @ x + translation."""

    linear: Mat2
    translation: tuple[float, float]

    @classmethod
    def identity(cls) -> "AffineMap2":
        return cls(Mat2.identity(), (0.0, 0.0))

    def __call__(self, points) -> np.ndarray:
        return self.linear.apply(points) + np.asarray(self.translation, dtype=float)

    def fixed_point(self) -> np.ndarray:
        """Solve (I - A) p = t; requires 1 not an eigenvalue of A."""
        m = Mat2(
            1.0 - self.linear.a11,
            -self.linear.a12,
            -self.linear.a21,
            1.0 - self.linear.a22,
        )
        return m.inverse.apply(np.asarray(self.translation, dtype=float))


def compose(f: AffineMap2, g: AffineMap2) -> AffineMap2:
    """(f o g)(x) = f(g(x))."""
    lin = f.linear @ g.linear
    t = f.linear.apply(np.asarray(g.translation, dtype=float)) + np.asarray(
        f.translation, dtype=float
    )
    return AffineMap2(lin, (float(t[0]), float(t[1])))


def singular_data(m: Mat2, det: float | None = None) -> SingularData:
    """Exact eigendecomposition of m^T m via the 2x2 quadratic formula.

    The larger eigenvalue comes from the stable root of the characteristic
    polynomial; the smaller one from det^2 / lambda1 to avoid cancellation.
    ``det`` may supply an externally-known exact determinant (e.g. a product
    of factor determinants for composed maps), which sidesteps the
    subtraction cancellation for strongly anisotropic products.
    For isotropic input (alpha1 == alpha2 the decomposition is degenerate),
    the convention is theta1 horizontal, theta2 vertical.
    """
    if det is None:
        if m.is_singular():
            raise SingularInputError(f"matrix {m} is numerically singular")
        det = m.det
    elif det == 0.0:
        raise SingularInputError(f"matrix {m} has zero determinant")
    p = m.a11 * m.a11 + m.a21 * m.a21
    r = m.a12 * m.a12 + m.a22 * m.a22
    q = m.a11 * m.a12 + m.a21 * m.a22
    mean = 0.5 * (p + r)
    spread = math.hypot(0.5 * (p - r), q)
    lam1 = mean + spread
    lam2 = (det * det) / lam1
    alpha1 = math.sqrt(lam1)
    alpha2 = math.sqrt(lam2)

    if spread <= _ISO_RTOL * mean:
        # m^-1 (1, 0) is proportional to (a22, -a21); normalizing avoids
        # dividing by the (possibly tiny) determinant
        nrm = math.hypot(m.a22, m.a21)
        e1 = (m.a22 / nrm, -m.a21 / nrm)
        eta2 = (-e1[1], e1[0])
        return SingularData(alpha1, alpha2, ProjLine(0.0), ProjLine(PI / 2), e1, eta2)

    # Pick the eigenvector expression with the better-conditioned component.
    if p >= r:
        v = np.array([lam1 - r, q])
    else:
        v = np.array([q, lam1 - p])
    nrm = np.hypot(v[0], v[1])
    if nrm == 0.0:
        v = np.array([1.0, 0.0]) if p >= r else np.array([0.0, 1.0])
        nrm = 1.0
    e1 = v / nrm
    eta1 = (float(e1[0]), float(e1[1]))
    eta2 = (-eta1[1], eta1[0])
    img1 = m.apply(np.array(eta1))
    theta1 = ProjLine(math.atan2(img1[1], img1[0]))
    # theta2 is exactly perpendicular; computing it as the image of eta2
    # would amplify rounding noise by the anisotropy ratio
    theta2 = ProjLine(theta1.angle + PI / 2)
    return SingularData(alpha1, alpha2, theta1, theta2, eta1, eta2)


def alpha1_of_stack(mats: np.ndarray) -> np.ndarray:
    """Vectorized largest singular value for an (n, 2, 2) stack."""
    p = mats[:, 0, 0] ** 2 + mats[:, 1, 0] ** 2
    r = mats[:, 0, 1] ** 2 + mats[:, 1, 1] ** 2
    q = mats[:, 0, 0] * mats[:, 0, 1] + mats[:, 1, 0] * mats[:, 1, 1]
    spread = np.hypot(0.5 * (p - r), q)
    return np.sqrt(0.5 * (p + r) + spread)


def alpha_pair_of_stack(
    mats: np.ndarray, dets: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (alpha1, alpha2) for an (n, 2, 2) stack.

    ``dets`` may supply exact determinants (products of factor determinants),
    avoiding cancellation for strongly anisotropic stacks.
    """
    p = mats[:, 0, 0] ** 2 + mats[:, 1, 0] ** 2
    r = mats[:, 0, 1] ** 2 + mats[:, 1, 1] ** 2
    q = mats[:, 0, 0] * mats[:, 0, 1] + mats[:, 1, 0] * mats[:, 1, 1]
    spread = np.hypot(0.5 * (p - r), q)
    lam1 = 0.5 * (p + r) + spread
    if dets is None:
        dets = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    lam2 = (dets * dets) / lam1
    return np.sqrt(lam1), np.sqrt(lam2)


def proj_apply(m: Mat2, line: ProjLine) -> ProjLine:
    """Image of a projective line under an invertible linear map."""
    if m.is_singular():
        raise SingularInputError(f"matrix {m} is numerically singular")
    w = m.apply(line.vector())
    return ProjLine(math.atan2(w[1], w[0]))


def proj_distance(a: ProjLine, b: ProjLine) -> float:
    """Angle between two lines, in [0, pi/2]."""
    d = abs(a.angle - b.angle) % PI
    return min(d, PI - d)


def proj_signed_gap(a: ProjLine, b: ProjLine) -> float:
    """Signed representative of a - b in (-pi/2, pi/2]."""
    d = (a.angle - b.angle + PI / 2) % PI - PI / 2
    return PI / 2 if d == -PI / 2 else d
