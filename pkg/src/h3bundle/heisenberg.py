"""The Heisenberg group H3 = (R^3, g) with its left-invariant metric.

The metric is

    g = (dx1)^2 + (dx2)^2 + (dx3 + x2 dx1 - x1 dx2)^2,

with invariant orthonormal coframe theta^1 = dx1, theta^2 = dx2,
theta^3 = dx3 + x2 dx1 - x1 dx2 and dual frame

    E1 = d/dx1 - x2 d/dx3,   E2 = d/dx2 + x1 d/dx3,   E3 = d/dx3.

Because the frame is invariant, its Levi-Civita connection and curvature
have constant components; the coordinate Christoffel symbols are low-degree
polynomials in x1, x2 and are hard-coded here (the finite-difference Koszul
cross-check lives in the test suite).  This module also provides the
closed-form geodesics through the origin and covariant differentiation of
sampled vector fields along sampled curves.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrate import central_difference

__all__ = [
    "W_EPS",
    "BasePoint",
    "CoordVector",
    "FrameVector",
    "ConnectionTable",
    "CurvatureTable",
    "BaseGeodesicParams",
    "BaseTrajectory",
    "metric_at",
    "frame_at",
    "coord_to_frame",
    "frame_to_coord",
    "frame_connection",
    "christoffel_coord",
    "curvature_frame",
    "curvature_apply",
    "covariant_deriv_along",
    "base_geodesic_closed_form",
    "base_geodesic_velocity",
    "base_geodesic_acceleration",
    "sample_base_geodesic",
    "base_geodesic_rhs",
]

# Below this |w| the trigonometric closed form loses all precision to
# cancellation; the straight-line branch takes over.
W_EPS = 1e-12


def _require_finite(name: str, *values: float) -> None:
    if not all(np.isfinite(v) for v in values):
        raise ValueError(f"{name} components must be finite, got {values}")


@dataclass(frozen=True)
class BasePoint:
    """A point of H3 in the global chart (x1, x2, x3)."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self) -> None:
        _require_finite("BasePoint", self.x1, self.x2, self.x3)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "BasePoint":
        a = np.asarray(arr, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class CoordVector:
    """Tangent-vector components with respect to the coordinate basis d/dx^i."""

    c1: float
    c2: float
    c3: float

    def __post_init__(self) -> None:
        _require_finite("CoordVector", self.c1, self.c2, self.c3)

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "CoordVector":
        a = np.asarray(arr, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class FrameVector:
    """Tangent-vector components with respect to the orthonormal frame E1, E2, E3.

    The squared g-norm is a1^2 + a2^2 + a3^2.
    """

    a1: float
    a2: float
    a3: float

    def __post_init__(self) -> None:
        _require_finite("FrameVector", self.a1, self.a2, self.a3)

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "FrameVector":
        a = np.asarray(arr, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def norm(self) -> float:
        return float(np.sqrt(self.a1**2 + self.a2**2 + self.a3**2))


@dataclass(frozen=True)
class ConnectionTable:
    """Constant frame components of the Levi-Civita connection.

    ``table[k, i, j]`` is the E_k-coefficient of nabla_{E_i} E_j.  Metric
    compatibility in an orthonormal frame means antisymmetry in (k, j).
    """

    table: np.ndarray

    def coefficient(self, k: int, i: int, j: int) -> float:
        return float(self.table[k, i, j])

    def apply(self, x: FrameVector, y: FrameVector) -> FrameVector:
        """nabla_X Y for constant-coefficient frame fields X, Y."""
        out = np.einsum("kij,i,j->k", self.table, x.as_array(), y.as_array())
        return FrameVector.from_array(out)


@dataclass(frozen=True)
class CurvatureTable:
    """Constant frame components of the curvature tensor.

    ``r_up[i, c, a, b]`` gives R(E_a, E_b)E_c = r_up[i,c,a,b] E_i and
    ``r_down[a, b, c, d]`` the fully covariant R(E_a,E_b,E_c,E_d) with the
    pairing R(X, Y, Z, W) = g(R(X, Y)W, Z).
    """

    r_up: np.ndarray
    r_down: np.ndarray


@dataclass(frozen=True)
class BaseGeodesicParams:
    """Initial velocity (u, v, w) of a geodesic through the origin, coordinate basis."""

    u: float
    v: float
    w: float

    def __post_init__(self) -> None:
        _require_finite("BaseGeodesicParams", self.u, self.v, self.w)


@dataclass(frozen=True)
class BaseTrajectory:
    """A uniformly sampled curve in H3: positions xs (n, 3), velocities vs (n, 3).

    Velocities may be omitted, in which case consumers fall back to central
    differences of the positions (second order, one-sided at the ends).
    """

    t0: float
    h: float
    xs: np.ndarray
    vs: np.ndarray | None = None

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=float)
        object.__setattr__(self, "xs", xs)
        if self.h <= 0:
            raise ValueError("step h must be positive")
        if xs.ndim != 2 or xs.shape[1] != 3 or xs.shape[0] == 0:
            raise ValueError("xs must have shape (n, 3) with n >= 1")
        if self.vs is not None:
            vs = np.asarray(self.vs, dtype=float)
            if vs.shape != xs.shape:
                raise ValueError("vs must match xs in shape")
            object.__setattr__(self, "vs", vs)

    @property
    def n_samples(self) -> int:
        return self.xs.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.n_samples)

    def velocities(self) -> np.ndarray:
        if self.vs is not None:
            return self.vs
        if self.n_samples < 3:
            raise ValueError("insufficient samples: need at least 3 for differences")
        return central_difference(self.xs, self.h)


# ---------------------------------------------------------------------------
# metric, frame and basis changes
# ---------------------------------------------------------------------------

def theta3(x: np.ndarray, vec: np.ndarray) -> float | np.ndarray:
    """The contact coframe theta^3 = dx3 + x2 dx1 - x1 dx2 applied to vec at x.

    Accepts single points (shape (3,)) or sample batches (shape (n, 3)).
    """
    return vec[..., 2] + x[..., 1] * vec[..., 0] - x[..., 0] * vec[..., 1]


def metric_at(p: BasePoint) -> np.ndarray:
    """Metric components g_ij(p), the quadratic form of theta^1, theta^2, theta^3."""
    x1, x2 = p.x1, p.x2
    c = np.array([x2, -x1, 1.0])
    g = np.diag([1.0, 1.0, 0.0]) + np.outer(c, c)
    return g


def frame_at(p: BasePoint) -> tuple[CoordVector, CoordVector, CoordVector]:
    """Coordinate components of the invariant frame E1, E2, E3 at p."""
    return (
        CoordVector(1.0, 0.0, -p.x2),
        CoordVector(0.0, 1.0, p.x1),
        CoordVector(0.0, 0.0, 1.0),
    )


def frame_components(x: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Coordinate components -> frame components; works on (3,) or (n, 3) batches."""
    out = np.array(vec, dtype=float, copy=True)
    out[..., 2] = theta3(x, vec)
    return out


def coord_components(x: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Frame components -> coordinate components; inverse of frame_components."""
    out = np.array(a, dtype=float, copy=True)
    out[..., 2] = a[..., 2] - x[..., 1] * a[..., 0] + x[..., 0] * a[..., 1]
    return out


def coord_to_frame(p: BasePoint, x_vec: CoordVector) -> FrameVector:
    """Components of a tangent vector in the invariant frame: (theta^i applied to it)."""
    return FrameVector.from_array(frame_components(p.as_array(), x_vec.as_array()))


def frame_to_coord(p: BasePoint, a: FrameVector) -> CoordVector:
    """Inverse basis change of coord_to_frame at the same point."""
    return CoordVector.from_array(coord_components(p.as_array(), a.as_array()))


# ---------------------------------------------------------------------------
# connection and curvature in the invariant frame (constant tables)
# ---------------------------------------------------------------------------

def _build_connection() -> np.ndarray:
    c = np.zeros((3, 3, 3))
    # nabla_{E1}E2 = E3, nabla_{E1}E3 = -E2
    c[2, 0, 1] = 1.0
    c[1, 0, 2] = -1.0
    # nabla_{E2}E1 = -E3, nabla_{E2}E3 = E1
    c[2, 1, 0] = -1.0
    c[0, 1, 2] = 1.0
    # nabla_{E3}E1 = -E2, nabla_{E3}E2 = E1
    c[1, 2, 0] = -1.0
    c[0, 2, 1] = 1.0
    c.flags.writeable = False
    return c


_CONNECTION = _build_connection()


def frame_connection() -> ConnectionTable:
    """The constant connection table of the invariant frame (diagonal terms vanish)."""
    return ConnectionTable(table=_CONNECTION)


def _build_curvature() -> tuple[np.ndarray, np.ndarray]:
    r_up = np.zeros((3, 3, 3, 3))

    def put(i: int, c: int, a: int, b: int, val: float) -> None:
        r_up[i, c, a, b] = val
        r_up[i, c, b, a] = -val

    put(1, 0, 0, 1, 3.0)   # R(E1,E2)E1 =  3 E2
    put(2, 0, 0, 2, -1.0)  # R(E1,E3)E1 = -E3
    put(0, 1, 0, 1, -3.0)  # R(E1,E2)E2 = -3 E1
    put(0, 2, 0, 2, 1.0)   # R(E1,E3)E3 =  E1
    put(2, 1, 1, 2, -1.0)  # R(E2,E3)E2 = -E3
    put(1, 2, 1, 2, 1.0)   # R(E2,E3)E3 =  E2
    # fully covariant components: R_{abcd} = g(R(E_a,E_b)E_d, E_c) = r_up[c,d,a,b]
    r_down = np.einsum("cdab->abcd", r_up)
    r_up.flags.writeable = False
    r_down.flags.writeable = False
    return r_up, r_down


_R_UP, _R_DOWN = _build_curvature()


def curvature_frame() -> CurvatureTable:
    """The constant curvature tables of the invariant frame."""
    return CurvatureTable(r_up=_R_UP, r_down=_R_DOWN)


def curvature_apply_arr(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """R(a, b)c on frame components, expanded from the six independent entries."""
    d12 = a[0] * b[1] - a[1] * b[0]
    d13 = a[0] * b[2] - a[2] * b[0]
    d23 = a[1] * b[2] - a[2] * b[1]
    return np.array(
        [
            -3.0 * d12 * c[1] + d13 * c[2],
            3.0 * d12 * c[0] + d23 * c[2],
            -d13 * c[0] - d23 * c[1],
        ]
    )


def curvature_apply(x: FrameVector, y: FrameVector, z: FrameVector) -> FrameVector:
    """Trilinear curvature action R(X, Y)Z in the invariant frame."""
    return FrameVector.from_array(
        curvature_apply_arr(x.as_array(), y.as_array(), z.as_array())
    )


# ---------------------------------------------------------------------------
# coordinate Christoffel symbols (closed-form polynomials)
# ---------------------------------------------------------------------------

def christoffel_coord(p: BasePoint) -> np.ndarray:
    """Coordinate Christoffel symbols Gamma^h_{ij}(p), shape (3, 3, 3).

    Polynomial in x1, x2 only; symmetric in the lower indices.
    """
    x1, x2 = p.x1, p.x2
    gam = np.zeros((3, 3, 3))
    gam[0, 0, 1] = gam[0, 1, 0] = x2
    gam[0, 1, 1] = -2.0 * x1
    gam[0, 1, 2] = gam[0, 2, 1] = 1.0
    gam[1, 0, 0] = -2.0 * x2
    gam[1, 0, 1] = gam[1, 1, 0] = x1
    gam[1, 0, 2] = gam[1, 2, 0] = -1.0
    gam[2, 0, 0] = -2.0 * x1 * x2
    gam[2, 0, 1] = gam[2, 1, 0] = x1 * x1 - x2 * x2
    gam[2, 1, 1] = 2.0 * x1 * x2
    gam[2, 0, 2] = gam[2, 2, 0] = -x1
    gam[2, 1, 2] = gam[2, 2, 1] = -x2
    return gam


def gamma_bilinear(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(Gamma^h_{ij} a^i b^j)_h at base point x, expanded for speed."""
    x1, x2 = x[0], x[1]
    s12 = a[0] * b[1] + a[1] * b[0]
    s13 = a[0] * b[2] + a[2] * b[0]
    s23 = a[1] * b[2] + a[2] * b[1]
    return np.array(
        [
            x2 * s12 - 2.0 * x1 * a[1] * b[1] + s23,
            -2.0 * x2 * a[0] * b[0] + x1 * s12 - s13,
            -2.0 * x1 * x2 * a[0] * b[0]
            + (x1 * x1 - x2 * x2) * s12
            + 2.0 * x1 * x2 * a[1] * b[1]
            - x1 * s13
            - x2 * s23,
        ]
    )


def gamma_bilinear_batch(xs: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized gamma_bilinear over sample batches of shape (n, 3)."""
    x1, x2 = xs[:, 0], xs[:, 1]
    s12 = a[:, 0] * b[:, 1] + a[:, 1] * b[:, 0]
    s13 = a[:, 0] * b[:, 2] + a[:, 2] * b[:, 0]
    s23 = a[:, 1] * b[:, 2] + a[:, 2] * b[:, 1]
    out = np.empty_like(a)
    out[:, 0] = x2 * s12 - 2.0 * x1 * a[:, 1] * b[:, 1] + s23
    out[:, 1] = -2.0 * x2 * a[:, 0] * b[:, 0] + x1 * s12 - s13
    out[:, 2] = (
        -2.0 * x1 * x2 * a[:, 0] * b[:, 0]
        + (x1 * x1 - x2 * x2) * s12
        + 2.0 * x1 * x2 * a[:, 1] * b[:, 1]
        - x1 * s13
        - x2 * s23
    )
    return out


# ---------------------------------------------------------------------------
# covariant differentiation along sampled curves
# ---------------------------------------------------------------------------

def covariant_deriv_along(curve: BaseTrajectory, ys: np.ndarray) -> np.ndarray:
    """Dy^i/dt = dy^i/dt + Gamma^i_{kj} y^k dx^j/dt at each sample of the curve.

    ``ys`` has shape (n, 3), matching the curve's grid.  Needs at least three
    samples (central differences inside, second-order one-sided at the ends).
    """
    ys = np.asarray(ys, dtype=float)
    if ys.shape != curve.xs.shape:
        raise ValueError("ys must match the curve's samples in shape")
    if curve.n_samples < 3:
        raise ValueError("insufficient samples: need at least 3 for differences")
    dy = central_difference(ys, curve.h)
    return dy + gamma_bilinear_batch(curve.xs, ys, curve.velocities())


# ---------------------------------------------------------------------------
# closed-form base geodesics through the origin
# ---------------------------------------------------------------------------

def base_geodesic_closed_form(params: BaseGeodesicParams, t: float) -> BasePoint:
    """Geodesic through the origin with initial velocity (u, v, w), evaluated at t.

    For |w| > W_EPS the solution winds:

        x1 = (v cos(2wt) + u sin(2wt) - v) / 2w
        x2 = (-u cos(2wt) + v sin(2wt) + u) / 2w
        x3 = w t + (u^2+v^2)/(2w) t - (u^2+v^2)/(4w^2) sin(2wt)

    and for |w| <= W_EPS it is the straight line (ut, vt, 0).  The constant
    term of x2 and the sine coefficient of x3 are fixed by the initial
    conditions x(0) = 0, dx/dt(0) = (u, v, w); the test suite certifies them
    against the geodesic equation and rejects the nearby wrong constants.
    """
    x = _closed_form_xva(params, np.asarray(float(t)))[0]
    return BasePoint.from_array(x[0])


def base_geodesic_velocity(params: BaseGeodesicParams, t: float) -> CoordVector:
    """dx/dt of the closed-form geodesic at t."""
    return CoordVector.from_array(_closed_form_xva(params, np.asarray(float(t)))[1][0])


def base_geodesic_acceleration(params: BaseGeodesicParams, t: float) -> CoordVector:
    """d^2x/dt^2 of the closed-form geodesic at t."""
    return CoordVector.from_array(_closed_form_xva(params, np.asarray(float(t)))[2][0])


def _closed_form_xva(
    params: BaseGeodesicParams, ts: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positions, velocities and accelerations of the closed form, batched over ts."""
    u, v, w = params.u, params.v, params.w
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if abs(w) <= W_EPS:
        zeros = np.zeros_like(ts)
        x = np.stack([u * ts, v * ts, zeros], axis=-1)
        vel = np.stack([np.full_like(ts, u), np.full_like(ts, v), zeros], axis=-1)
        acc = np.zeros_like(x)
        return x, vel, acc
    s = np.sin(2.0 * w * ts)
    c = np.cos(2.0 * w * ts)
    q = (u * u + v * v) / (2.0 * w)
    x = np.stack(
        [
            (v * c + u * s - v) / (2.0 * w),
            (-u * c + v * s + u) / (2.0 * w),
            w * ts + q * ts - q / (2.0 * w) * s,
        ],
        axis=-1,
    )
    vel = np.stack(
        [
            u * c - v * s,
            u * s + v * c,
            w + q * (1.0 - c),
        ],
        axis=-1,
    )
    acc = np.stack(
        [
            -2.0 * w * (u * s + v * c),
            2.0 * w * (u * c - v * s),
            2.0 * w * q * s,
        ],
        axis=-1,
    )
    return x, vel, acc


def sample_base_geodesic(
    params: BaseGeodesicParams, t_max: float, h: float, t0: float = 0.0
) -> BaseTrajectory:
    """Uniformly sampled closed-form geodesic with exact velocities."""
    if h <= 0:
        raise ValueError("step h must be positive")
    n = int(round(t_max / h)) + 1
    ts = t0 + h * np.arange(n)
    xs, vs, _ = _closed_form_xva(params, ts)
    return BaseTrajectory(t0=t0, h=h, xs=xs, vs=vs)


# ---------------------------------------------------------------------------
# base geodesic equation as a first-order system
# ---------------------------------------------------------------------------

def base_geodesic_rhs(x: BasePoint, v: CoordVector) -> tuple[CoordVector, CoordVector]:
    """First-order form of d^2x^h/dt^2 + Gamma^h_{ij} dx^i/dt dx^j/dt = 0.

    Returns (dx/dt, dv/dt).
    """
    va = v.as_array()
    acc = -gamma_bilinear(x.as_array(), va, va)
    return v, CoordVector.from_array(acc)


def base_rhs_array(t: float, state: np.ndarray) -> np.ndarray:
    """base_geodesic_rhs on a flat state [x(3), v(3)] for the integrator."""
    x = state[:3]
    v = state[3:]
    return np.concatenate([v, -gamma_bilinear(x, v, v)])
