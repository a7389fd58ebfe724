"""Certification of totally-geodesic and isocline distributions on (TH3, g^s).

A distribution F of rank p on the 6-manifold TH3 is described by constant
frame-lift coefficient vectors: p generators X_i and q = 6 - p normal fields
N_a, all expressed on {E_1^H, ..., E_3^V}.  With an adapted orthonormal frame
the two pointwise criteria are

    totally geodesic:  g^s(nabla_{X_i} X_j + nabla_{X_j} X_i, N_a) = 0
    isocline:          g^s(nabla_{N_a} N_b + nabla_{N_b} N_a, X_i) = 0

(the second is defined only for totally geodesic distributions).  Both are
evaluated on a seeded sample grid of bundle points plus deterministic witness
points with fibers along the frame axes; residuals of the built-in
distributions are exact rational combinations, so near machine-precision
tolerances are appropriate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import BundlePoint, BundleVector, _connection_pair
from .heisenberg import BasePoint, CoordVector, coord_components

__all__ = [
    "DEFAULT_SEED",
    "DEFAULT_TOL",
    "BUILTIN_NAMES",
    "NotTotallyGeodesicError",
    "DistributionSpec",
    "CheckReport",
    "DistributionCheckOutcome",
    "orthonormalize",
    "orthonormalize_rows",
    "sample_bundle_points",
    "builtin_distribution",
    "totally_geodesic_check",
    "isocline_check",
    "check_distribution",
]

DEFAULT_SEED = 20260809
DEFAULT_TOL = 1e-10

# A verdict only counts as a genuine failure when the worst residual clears
# 10x the tolerance; the band in between is discretization-grade noise.
FAIL_FACTOR = 10.0

BUILTIN_NAMES = ("htm", "vtm", "ker-omega-h", "ker-omega-v", "f-h", "f-v")


class NotTotallyGeodesicError(ValueError):
    """Raised when the isocline criterion is requested for a non-t.g. distribution."""


@dataclass(frozen=True)
class DistributionSpec:
    """Constant-coefficient distribution on TH3.

    ``generators`` has shape (p, 6) and ``complement`` (q, 6); each row holds
    the coefficients on (E_1^H, E_2^H, E_3^H, E_1^V, E_2^V, E_3^V).
    """

    name: str
    generators: np.ndarray
    complement: np.ndarray

    def __post_init__(self) -> None:
        gen = np.atleast_2d(np.asarray(self.generators, dtype=float))
        comp = np.atleast_2d(np.asarray(self.complement, dtype=float))
        object.__setattr__(self, "generators", gen)
        object.__setattr__(self, "complement", comp)
        if gen.shape[1] != 6 or comp.shape[1] != 6:
            raise ValueError("generator and complement rows must have 6 coefficients")
        if gen.shape[0] + comp.shape[0] != 6:
            raise ValueError("dim + codim must equal 6")
        if np.linalg.matrix_rank(np.vstack([gen, comp])) != 6:
            raise ValueError("generators and complement must span the tangent space")

    @property
    def dim(self) -> int:
        return self.generators.shape[0]

    @property
    def codim(self) -> int:
        return self.complement.shape[0]


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one criterion over a sample set."""

    name: str
    criterion: str  # "totally_geodesic" | "isocline"
    tolerance: float
    per_sample: np.ndarray  # max |residual| at each sample point
    global_max: float
    verdict: str  # "pass" | "fail" | "inconclusive"
    witness_point: BundlePoint
    witness_residual: float


@dataclass(frozen=True)
class DistributionCheckOutcome:
    """Both criteria for one distribution; isocline is None when inapplicable."""

    name: str
    totally_geodesic: CheckReport
    isocline: CheckReport | None
    isocline_skipped: str | None


def orthonormalize_rows(mat: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on rows with respect to the Sasaki inner product.

    In the lifted-frame representation that inner product is the Euclidean
    one on the 6 coefficients.  Raises on rank deficiency, naming the
    offending row.
    """
    mat = np.array(mat, dtype=float, copy=True)
    for i in range(mat.shape[0]):
        for j in range(i):
            mat[i] -= (mat[i] @ mat[j]) * mat[j]
        norm = float(np.linalg.norm(mat[i]))
        if norm < 1e-10:
            raise ValueError(f"rank deficiency: vector {i} is in the span of its predecessors")
        mat[i] /= norm
    return mat


def orthonormalize(vectors) -> list[BundleVector]:
    """Gram-Schmidt a list of BundleVector (span preserved, g^s-orthonormal output)."""
    mat = np.stack([v.as_array() for v in vectors])
    out = orthonormalize_rows(mat)
    return [BundleVector.from_arrays(row[:3], row[3:]) for row in out]


def sample_bundle_points(
    n: int, seed: int = DEFAULT_SEED, include_witnesses: bool = True
) -> list[BundlePoint]:
    """Seeded sample grid: bases uniform in [-2, 2]^3, fibers in the g-ball of radius 2.

    Deterministic witness points (origin, E_i) are prepended because random
    fibers alone can miss curvature-dependent failures whose residual needs a
    fiber component along a particular frame axis.
    """
    pts: list[BundlePoint] = []
    if include_witnesses:
        origin = BasePoint(0.0, 0.0, 0.0)
        for axis in np.eye(3):
            pts.append(BundlePoint(origin, CoordVector.from_array(axis)))
    rng = np.random.default_rng(seed)
    for _ in range(n):
        base = rng.uniform(-2.0, 2.0, size=3)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        fiber_frame = 2.0 * rng.uniform() ** (1.0 / 3.0) * direction
        fiber = coord_components(base, fiber_frame)
        pts.append(BundlePoint(BasePoint.from_array(base), CoordVector.from_array(fiber)))
    return pts


def builtin_distribution(name: str) -> DistributionSpec:
    """The six named distributions, with the adapted bases used in their analysis."""
    e = np.eye(6)
    eh = e[0:3]  # E_1^H, E_2^H, E_3^H
    ev = e[3:6]  # E_1^V, E_2^V, E_3^V
    table = {
        "htm": (eh, ev),
        "vtm": (ev, eh),
        "ker-omega-h": (np.vstack([eh[0], eh[1], ev[0], ev[1], ev[2]]), eh[2:3]),
        "ker-omega-v": (np.vstack([eh[0], eh[1], eh[2], ev[0], ev[1]]), ev[2:3]),
        "f-h": (eh[0:2], np.vstack([eh[2], ev[0], ev[1], ev[2]])),
        "f-v": (ev[0:2], np.vstack([ev[2], eh[0], eh[1], eh[2]])),
    }
    if name not in table:
        raise ValueError(f"unknown distribution name {name!r}; expected one of {BUILTIN_NAMES}")
    gen, comp = table[name]
    return DistributionSpec(name=name, generators=gen, complement=comp)


def _symmetrized_residuals(
    fields: np.ndarray, against: np.ndarray, yf: np.ndarray
) -> float:
    """max over pairs (i <= j) and rows N of |g^s(nabla_{Xi}Xj + nabla_{Xj}Xi, N)|."""
    k = fields.shape[0]
    worst = 0.0
    for i in range(k):
        for j in range(i, k):
            hi, vi = _connection_pair(
                fields[i, :3], fields[i, 3:], fields[j, :3], fields[j, 3:], yf
            )
            hj, vj = _connection_pair(
                fields[j, :3], fields[j, 3:], fields[i, :3], fields[i, 3:], yf
            )
            sym = np.concatenate([hi + hj, vi + vj])
            worst = max(worst, float(np.abs(against @ sym).max()))
    return worst


def _run_criterion(
    dist: DistributionSpec,
    samples: list[BundlePoint],
    tol: float,
    criterion: str,
) -> CheckReport:
    if not samples:
        raise ValueError("need at least one sample point")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    stacked = orthonormalize_rows(np.vstack([dist.generators, dist.complement]))
    gens = stacked[: dist.dim]
    comps = stacked[dist.dim :]
    if criterion == "totally_geodesic":
        fields, against = gens, comps
    elif criterion == "isocline":
        fields, against = comps, gens
    else:
        raise ValueError(f"unknown criterion {criterion!r}")

    per_sample = np.empty(len(samples))
    for k, pt in enumerate(samples):
        per_sample[k] = _symmetrized_residuals(fields, against, pt.fiber_frame())
    k_worst = int(np.argmax(per_sample))
    global_max = float(per_sample[k_worst])
    if global_max < tol:
        verdict = "pass"
    elif global_max > FAIL_FACTOR * tol:
        verdict = "fail"
    else:
        verdict = "inconclusive"
    return CheckReport(
        name=dist.name,
        criterion=criterion,
        tolerance=tol,
        per_sample=per_sample,
        global_max=global_max,
        verdict=verdict,
        witness_point=samples[k_worst],
        witness_residual=global_max,
    )


def totally_geodesic_check(
    dist: DistributionSpec, samples: list[BundlePoint], tol: float = DEFAULT_TOL
) -> CheckReport:
    """Evaluate the totally-geodesic criterion over the samples."""
    return _run_criterion(dist, samples, tol, "totally_geodesic")


def isocline_check(
    dist: DistributionSpec, samples: list[BundlePoint], tol: float = DEFAULT_TOL
) -> CheckReport:
    """Evaluate the isocline criterion; requires the distribution to be totally geodesic."""
    tg = _run_criterion(dist, samples, tol, "totally_geodesic")
    if tg.verdict != "pass":
        raise NotTotallyGeodesicError(
            f"not totally geodesic: {dist.name} has t.g. residual {tg.global_max:.3e}"
        )
    return _run_criterion(dist, samples, tol, "isocline")


def check_distribution(
    name: str,
    n_samples: int = 100,
    seed: int = DEFAULT_SEED,
    tol: float = DEFAULT_TOL,
) -> DistributionCheckOutcome:
    """Run both criteria for a built-in distribution on a seeded sample grid."""
    dist = builtin_distribution(name)
    samples = sample_bundle_points(n_samples, seed=seed)
    tg = totally_geodesic_check(dist, samples, tol)
    if tg.verdict == "pass":
        iso = _run_criterion(dist, samples, tol, "isocline")
        return DistributionCheckOutcome(name, tg, iso, None)
    reason = (
        "inconclusive totally-geodesic verdict"
        if tg.verdict == "inconclusive"
        else "not totally geodesic"
    )
    return DistributionCheckOutcome(name, tg, None, reason)
