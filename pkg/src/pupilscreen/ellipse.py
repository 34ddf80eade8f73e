"""Direct least-squares ellipse fitting, conic/geometric conversion, rasterization.

The fit minimizes the sum of squared algebraic distances
F(x, y) = a x^2 + b xy + c y^2 + d x + e y + f over the data points,
constrained to 4ac - b^2 = 1 so the solution is always an ellipse. The
constrained problem reduces by block elimination to a 3x3 eigenproblem on
the quadratic coefficients; the other three coefficients follow linearly.

All conics are stored in the gauge 4ac - b^2 = 1 with a > 0, which makes the
quadratic part positive definite and the ellipse interior the region where
the polynomial is negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, NoEllipseSolution, NotAnEllipse

_COLLINEARITY_RTOL = 1e-9


@dataclass(frozen=True)
class ConicParams:
    """Coefficients (a, b, c, d, e, f) of a x^2 + b xy + c y^2 + d x + e y + f = 0."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    @classmethod
    def from_coefficients(cls, coeffs) -> "ConicParams":
        """Build from any scalar multiple of the coefficients, normalizing the gauge."""
        theta = np.asarray(coeffs, dtype=float).reshape(-1)
        if theta.shape != (6,):
            raise NotAnEllipse(f"need 6 conic coefficients, got {theta.shape}")
        disc = 4.0 * theta[0] * theta[2] - theta[1] ** 2
        if not np.isfinite(disc) or disc <= 0.0:
            raise NotAnEllipse(f"discriminant b^2 - 4ac = {-disc!r} is not negative")
        scale = 1.0 / math.sqrt(disc)
        if theta[0] * scale < 0.0:
            scale = -scale
        return cls(*(float(v * scale) for v in theta))

    @property
    def theta(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d, self.e, self.f])

    def evaluate(self, x, y):
        """Algebraic distance F(x, y); accepts scalars or arrays."""
        return (
            self.a * x * x
            + self.b * x * y
            + self.c * y * y
            + self.d * x
            + self.e * y
            + self.f
        )


@dataclass(frozen=True)
class EllipseGeometry:
    """Center, semi-axes and major-axis rotation (radians in [0, pi))."""

    center_x: float
    center_y: float
    semi_major: float
    semi_minor: float
    rotation: float


@dataclass(frozen=True)
class FitReport:
    """Result of one ellipse fit."""

    conic: ConicParams
    geometry: EllipseGeometry
    rms_algebraic_distance: float
    n_points: int

    def to_json_dict(self) -> dict:
        g = self.geometry
        return {
            "conic": [self.conic.a, self.conic.b, self.conic.c,
                      self.conic.d, self.conic.e, self.conic.f],
            "center": [g.center_x, g.center_y],
            "semi_major": g.semi_major,
            "semi_minor": g.semi_minor,
            "rotation_rad": g.rotation,
            "rms": self.rms_algebraic_distance,
            "n_points": self.n_points,
        }


def _conic_matrix(theta: np.ndarray) -> np.ndarray:
    a, b, c, d, e, f = theta
    return np.array([
        [a, b / 2.0, d / 2.0],
        [b / 2.0, c, e / 2.0],
        [d / 2.0, e / 2.0, f],
    ])


def _matrix_conic(q: np.ndarray) -> np.ndarray:
    return np.array([q[0, 0], 2.0 * q[0, 1], q[1, 1], 2.0 * q[0, 2], 2.0 * q[1, 2], q[2, 2]])


def _prepare_points(points) -> np.ndarray:
    pts = np.asarray(points)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegenerateInput(f"need an (N, 2) point array, got shape {pts.shape}")
    if np.issubdtype(pts.dtype, np.integer):
        # integer contour coordinates are pixel indices; fit at pixel centers
        return pts.astype(float) + 0.5
    pts = pts.astype(float)
    if not np.isfinite(pts).all():
        raise DegenerateInput("points contain non-finite coordinates")
    return pts


def fit_ellipse(points) -> FitReport:
    """Fit an ellipse to boundary points by direct constrained least squares.

    Accepts an integer contour (pixel indices, converted to pixel centers)
    or real (x, y) coordinates. Input is centered and scaled to unit RMS
    radius before the eigenproblem is solved, then the solution is mapped
    back; the fit is therefore well conditioned for raw pixel coordinates.

    Raises DegenerateInput for < 5 distinct or collinear points and
    NoEllipseSolution when no eigenvector lies on the ellipse branch.
    """
    pts = _prepare_points(points)
    if np.unique(pts, axis=0).shape[0] < 5:
        raise DegenerateInput("need at least 5 distinct points")

    centroid = pts.mean(axis=0)
    centered = pts - centroid
    singular = np.linalg.svd(centered, compute_uv=False)
    if singular[1] < _COLLINEARITY_RTOL * singular[0]:
        raise DegenerateInput("points are collinear within tolerance")
    scale = math.sqrt(float((centered**2).sum(axis=1).mean()))
    xn = centered[:, 0] / scale
    yn = centered[:, 1] / scale

    d1 = np.column_stack([xn * xn, xn * yn, yn * yn])
    d2 = np.column_stack([xn, yn, np.ones_like(xn)])
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    t = -np.linalg.solve(s3, s2.T)
    reduced = s1 + s2 @ t
    # premultiply by the inverse of the constraint matrix [[0,0,2],[0,-1,0],[2,0,0]]
    reduced = np.vstack([reduced[2] / 2.0, -reduced[1], reduced[0] / 2.0])
    eigvals, eigvecs = np.linalg.eig(reduced)

    design = np.column_stack([d1, d2])
    best: np.ndarray | None = None
    best_ssd = math.inf
    for i in range(3):
        if abs(eigvals[i].imag) > 1e-8 * (1.0 + abs(eigvals[i].real)):
            continue
        quad = np.real(eigvecs[:, i])
        disc = 4.0 * quad[0] * quad[2] - quad[1] ** 2
        if disc <= 0.0:
            continue
        theta = np.concatenate([quad, t @ quad]) / math.sqrt(disc)
        ssd = float(((design @ theta) ** 2).sum())
        if ssd < best_ssd:
            best_ssd = ssd
            best = theta
    if best is None:
        raise NoEllipseSolution("no eigenvector satisfies 4ac - b^2 > 0")

    # map the normalized-frame conic back to original coordinates
    transform = np.array([
        [1.0 / scale, 0.0, -centroid[0] / scale],
        [0.0, 1.0 / scale, -centroid[1] / scale],
        [0.0, 0.0, 1.0],
    ])
    q = transform.T @ _conic_matrix(best) @ transform
    try:
        conic = ConicParams.from_coefficients(_matrix_conic(q))
        geometry = conic_to_geometry(conic)
    except NotAnEllipse as exc:
        raise NoEllipseSolution(str(exc)) from exc

    residuals = conic.evaluate(pts[:, 0], pts[:, 1])
    rms = math.sqrt(float((residuals**2).mean()))
    return FitReport(conic=conic, geometry=geometry,
                     rms_algebraic_distance=rms, n_points=pts.shape[0])


def conic_to_geometry(conic: ConicParams) -> EllipseGeometry:
    """Convert conic coefficients to center, semi-axes and rotation.

    The center solves the zero of the conic gradient; axes and rotation come
    from the eigendecomposition of the quadratic-form matrix.
    """
    theta = conic.theta
    disc = 4.0 * theta[0] * theta[2] - theta[1] ** 2
    if disc <= 0.0:
        raise NotAnEllipse(f"discriminant b^2 - 4ac = {-disc!r} is not negative")
    if theta[0] < 0.0:
        theta = -theta
    a, b, c, d, e, _ = theta
    center = np.linalg.solve(np.array([[2.0 * a, b], [b, 2.0 * c]]), [-d, -e])
    f_center = float(
        a * center[0] ** 2 + b * center[0] * center[1] + c * center[1] ** 2
        + d * center[0] + e * center[1] + theta[5]
    )
    if f_center >= 0.0:
        raise NotAnEllipse("conic has no real points (imaginary ellipse)")
    quad = np.array([[a, b / 2.0], [b / 2.0, c]])
    eigvals, eigvecs = np.linalg.eigh(quad)  # ascending, so axis 0 is the major one
    axes = np.sqrt(-f_center / eigvals)
    rotation = math.atan2(eigvecs[1, 0], eigvecs[0, 0]) % math.pi
    return EllipseGeometry(
        center_x=float(center[0]),
        center_y=float(center[1]),
        semi_major=float(axes[0]),
        semi_minor=float(axes[1]),
        rotation=float(rotation),
    )


def geometry_to_conic(geometry: EllipseGeometry) -> ConicParams:
    """Convert center/axes/rotation back to gauge-normalized conic coefficients."""
    if not (geometry.semi_major >= geometry.semi_minor > 0.0):
        raise NotAnEllipse(
            f"need semi_major >= semi_minor > 0, got {geometry.semi_major}, {geometry.semi_minor}"
        )
    cos_r = math.cos(geometry.rotation)
    sin_r = math.sin(geometry.rotation)
    rot = np.array([[cos_r, -sin_r], [sin_r, cos_r]])
    quad = rot @ np.diag([geometry.semi_major**-2.0, geometry.semi_minor**-2.0]) @ rot.T
    center = np.array([geometry.center_x, geometry.center_y])
    linear = -2.0 * quad @ center
    const = float(center @ quad @ center) - 1.0
    return ConicParams.from_coefficients(
        [quad[0, 0], 2.0 * quad[0, 1], quad[1, 1], linear[0], linear[1], const]
    )


def rasterize_ellipse(geometry: EllipseGeometry, width: int, height: int) -> np.ndarray:
    """Fill the ellipse interior on a (height, width) raster.

    Pixel (x, y) has its continuous center at (x + 0.5, y + 0.5) and is
    foreground iff the conic polynomial is negative there, i.e. shares the
    sign it takes at the ellipse center. An ellipse outside the raster
    yields an empty mask.
    """
    if width < 1 or height < 1:
        raise ValueError(f"raster dimensions must be >= 1, got {width}x{height}")
    conic = geometry_to_conic(geometry)
    xs = np.arange(width, dtype=float) + 0.5
    ys = np.arange(height, dtype=float) + 0.5
    values = conic.evaluate(xs[np.newaxis, :], ys[:, np.newaxis])
    return values < 0.0
