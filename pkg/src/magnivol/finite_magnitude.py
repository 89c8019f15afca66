"""Magnitude of finite positive-definite metric spaces.

The similarity matrix of a finite metric space at scale t > 0 is
Z[i][j] = exp(-t * d(x_i, x_j)).  When Z is positive definite the magnitude
is 1^T Z^{-1} 1, computed by solving Z w = 1 for the weighting w and summing
it; the quadratic-form quotient (sum w)^2 / (w^T Z w) of any vector is a
lower bound, with equality at the solved weighting.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, lapack

from .core import (
    FiniteMetricSpace,
    IllConditionedWarning,
    NotPositiveDefiniteError,
    ZeroQuadraticFormError,
)

__all__ = [
    "SimilarityMatrix",
    "Weighting",
    "MagnitudePoint",
    "MagnitudeFunctionSamples",
    "build_similarity",
    "is_positive_definite",
    "magnitude",
    "rayleigh_quotient",
    "magnitude_function",
]

PIVOT_TOL = 1e-12
CONDITION_WARN_THRESHOLD = 1e12
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SimilarityMatrix:
    """exp(-t * d) entrywise, for one scale t > 0.

    Symmetric with unit diagonal; off-diagonal entries lie in (0, 1) because
    distinct points are at positive distance.
    """

    Z: np.ndarray
    t: float

    def __post_init__(self):
        self.Z.setflags(write=False)

    @property
    def n(self) -> int:
        return self.Z.shape[0]


@dataclass(frozen=True)
class Weighting:
    """Solution candidate of Z w = 1 together with solve diagnostics.

    flags may contain "fallback_lstsq" (factorization pivots dipped below
    tolerance, least squares used), "ill_conditioned" (condition estimate
    above 1e12), and "residual_above_tol".
    """

    w: np.ndarray
    residual: float
    cond_estimate: float
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        self.w.setflags(write=False)


@dataclass(frozen=True)
class MagnitudePoint:
    t: float
    magnitude: float
    cond_estimate: float
    ok: bool
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class MagnitudeFunctionSamples:
    """Per-scale magnitudes of one space; failed scales are flagged, not fatal."""

    points: tuple[MagnitudePoint, ...]

    def __post_init__(self):
        ts = [p.t for p in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("t grid must be strictly increasing")

    def as_rows(self) -> list[dict]:
        return [
            {
                "t": p.t,
                "magnitude": p.magnitude,
                "cond_estimate": p.cond_estimate,
                "ok": p.ok,
                "flags": list(p.flags),
            }
            for p in self.points
        ]


def build_similarity(space: FiniteMetricSpace, t: float) -> SimilarityMatrix:
    """Similarity matrix exp(-t * d) of the space at scale t > 0."""
    if not t > 0:
        raise ValueError(f"scale t must be positive, got {t}")
    return SimilarityMatrix(Z=np.exp(-t * space.dist), t=float(t))


def _cholesky(Z: np.ndarray):
    """Cholesky factor, or None when the matrix is numerically indefinite."""
    try:
        return cho_factor(Z, lower=True)
    except np.linalg.LinAlgError:
        return None


def is_positive_definite(sim: SimilarityMatrix,
                         pivot_tol: float = PIVOT_TOL) -> bool:
    """True when the Cholesky pivots all exceed the tolerance."""
    factor = _cholesky(sim.Z)
    if factor is None:
        return False
    pivots = np.diag(factor[0]) ** 2
    return bool(pivots.min() > pivot_tol)


def _solve_unit_system(sim: SimilarityMatrix) -> Weighting:
    """Solve Z w = 1, falling back to least squares on tiny pivots."""
    Z = sim.Z
    ones = np.ones(Z.shape[0])
    flags: list[str] = []
    factor = _cholesky(Z)
    if factor is None:
        raise NotPositiveDefiniteError(
            f"similarity matrix at t = {sim.t} has no positive-definite "
            f"factorization"
        )
    pivots = np.diag(factor[0]) ** 2
    if pivots.min() > PIVOT_TOL:
        w = cho_solve(factor, ones)
        anorm = np.abs(Z).sum(axis=0).max()
        rcond, info = lapack.dpocon(factor[0], anorm, lower=1)
        cond = float(1.0 / rcond) if (info == 0 and rcond > 0) else np.inf
    else:
        w, _, rank, sv = np.linalg.lstsq(Z, ones, rcond=None)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
        flags.append("fallback_lstsq")
    if cond > CONDITION_WARN_THRESHOLD:
        flags.append("ill_conditioned")
        warnings.warn(
            f"similarity matrix at t = {sim.t} has condition estimate "
            f"{cond:.3e}",
            IllConditionedWarning,
            stacklevel=3,
        )
    residual = float(np.abs(Z @ w - ones).max())
    if residual > RESIDUAL_TOL:
        flags.append("residual_above_tol")
    return Weighting(w=w, residual=residual, cond_estimate=cond,
                     flags=tuple(flags))


def magnitude(space: FiniteMetricSpace, t: float) -> tuple[float, Weighting]:
    """Magnitude of the space at scale t, with the solved weighting.

    Raises NotPositiveDefiniteError when the similarity matrix fails to
    factor; ill conditioning and least-squares fallbacks are reported as
    flags on the weighting instead of as errors.
    """
    sim = build_similarity(space, t)
    weighting = _solve_unit_system(sim)
    return float(weighting.w.sum()), weighting


def rayleigh_quotient(sim: SimilarityMatrix, w: np.ndarray) -> float:
    """(sum w)^2 / (w^T Z w): a magnitude lower bound for any nonzero w."""
    w = np.asarray(w, dtype=float)
    if w.shape != (sim.n,):
        raise ValueError(f"w must have shape ({sim.n},), got {w.shape}")
    if not np.any(w):
        raise ZeroQuadraticFormError("w must be nonzero")
    quad = float(w @ (sim.Z @ w))
    if abs(quad) < 1e-300:
        raise ZeroQuadraticFormError(
            "quadratic form vanishes for the supplied vector"
        )
    return float(w.sum()) ** 2 / quad


def magnitude_function(space: FiniteMetricSpace,
                       ts: Sequence[float]) -> MagnitudeFunctionSamples:
    """Magnitude sampled over a strictly increasing positive t grid.

    A scale whose similarity matrix fails to factor yields a flagged NaN
    entry rather than aborting the whole sweep.
    """
    ts = [float(t) for t in ts]
    if any(t <= 0 for t in ts):
        raise ValueError("all scales must be positive")
    points = []
    for t in ts:
        try:
            mag, weighting = magnitude(space, t)
            points.append(
                MagnitudePoint(t=t, magnitude=mag,
                               cond_estimate=weighting.cond_estimate,
                               ok=True, flags=weighting.flags)
            )
        except NotPositiveDefiniteError:
            points.append(
                MagnitudePoint(t=t, magnitude=float("nan"),
                               cond_estimate=float("nan"), ok=False,
                               flags=("not_positive_definite",))
            )
    return MagnitudeFunctionSamples(points=tuple(points))
