"""Shared domain types for magnitude and intrinsic-volume computations.

Exact rational arithmetic (scalars, polynomials, rational functions in the
scale variable t), unit-ball volumes, finite metric spaces, convex body
descriptions, and reproducible random streams.  Everything here is immutable
after construction and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import gammaln

__all__ = [
    "MagnivolError",
    "NotPositiveDefiniteError",
    "ZeroQuadraticFormError",
    "ResourceLimitError",
    "DimensionTooLargeError",
    "SectionNotContainedError",
    "IllConditionedWarning",
    "ExactRational",
    "omega",
    "omega_exact",
    "half_binomial",
    "PolynomialQ",
    "RationalFunctionQ",
    "FiniteMetricSpace",
    "Ball",
    "Box",
    "Polytope",
    "Interval",
    "ConvexBodySpec",
    "body_dimension",
    "RandomStream",
]


# ---------------------------------------------------------------------------
# Errors and warnings


class MagnivolError(Exception):
    """Base class for errors raised by this package."""


class NotPositiveDefiniteError(MagnivolError):
    """The similarity matrix admits no positive-definite factorization."""


class ZeroQuadraticFormError(MagnivolError):
    """Quotient requested for a vector whose quadratic form vanishes."""


class ResourceLimitError(MagnivolError):
    """Requested computation exceeds a configured size cap."""


class DimensionTooLargeError(MagnivolError):
    """Hull volumes (and the estimators built on them) stop at k = 3."""


class SectionNotContainedError(MagnivolError):
    """A claimed inscribed ball of an affine section lies outside the body."""


class IllConditionedWarning(UserWarning):
    """A linear solve succeeded but its condition estimate exceeds 1e12."""


# ---------------------------------------------------------------------------
# Exact scalars

# Arbitrary-precision rational p/q, kept normalized (q > 0, gcd(p, q) = 1)
# by the stdlib after every arithmetic operation.
ExactRational = Fraction

RationalLike = Union[int, Fraction]


def omega(n: int) -> float:
    """Volume of the unit ball in n-dimensional Euclidean space.

    Computed as pi**(n/2) / Gamma(1 + n/2) through log-gamma so that large
    n stays finite instead of overflowing intermediate factorials.
    """
    if n < 0:
        raise ValueError(f"dimension must be nonnegative, got {n}")
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(1.0 + 0.5 * n))


def omega_exact(n: int) -> tuple[Fraction, int]:
    """Unit-ball volume as (rational, p) with value rational * pi**(p/2).

    Splitting off the power of pi lets downstream formulas cancel pi exactly
    and assert that a combination is rational.
    """
    if n < 0:
        raise ValueError(f"dimension must be nonnegative, got {n}")
    if n % 2 == 0:
        return Fraction(1, math.factorial(n // 2)), n
    # Gamma(1 + n/2) = Gamma(j + 1/2) = (2j)! / (4**j j!) * sqrt(pi), j = (n+1)/2
    j = (n + 1) // 2
    return Fraction(4**j * math.factorial(j), math.factorial(2 * j)), n - 1


def half_binomial(x: RationalLike, k: int) -> Fraction:
    """Generalized binomial coefficient binom(x, k) for rational x.

    binom(x, k) = x (x-1) ... (x-k+1) / k!, with binom(x, 0) = 1.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    x = Fraction(x)
    out = Fraction(1)
    for j in range(k):
        out *= x - j
    return out / math.factorial(k)


# ---------------------------------------------------------------------------
# Exact polynomials and rational functions


class PolynomialQ:
    """Polynomial in the scale variable t with exact rational coefficients.

    ``coeffs[i]`` is the coefficient of t**i; trailing zeros are stripped so
    the zero polynomial has an empty coefficient tuple.  Instances are
    immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, coeff: RationalLike, power: int) -> "PolynomialQ":
        if power < 0:
            raise ValueError(f"power must be nonnegative, got {power}")
        return cls([0] * power + [coeff])

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    def __call__(self, t):
        """Evaluate by Horner's rule; exact when t is int or Fraction."""
        acc = Fraction(0) if isinstance(t, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "PolynomialQ":
        return PolynomialQ([i * c for i, c in enumerate(self.coeffs)][1:])

    def __add__(self, other):
        if not isinstance(other, PolynomialQ):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return PolynomialQ(
            [self.coefficient(i) + other.coefficient(i) for i in range(n)]
        )

    def __neg__(self):
        return PolynomialQ([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, PolynomialQ):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PolynomialQ):
            if self.is_zero or other.is_zero:
                return PolynomialQ()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return PolynomialQ(out)
        if isinstance(other, (int, Fraction)):
            return PolynomialQ([c * other for c in self.coeffs])
        return NotImplemented

    __rmul__ = __mul__

    def __divmod__(self, other):
        """Exact polynomial division: self = q * other + r, deg r < deg other."""
        if not isinstance(other, PolynomialQ):
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        div = other.coeffs
        q = [Fraction(0)] * max(len(rem) - len(div) + 1, 0)
        for i in range(len(rem) - len(div), -1, -1):
            factor = rem[i + len(div) - 1] / div[-1]
            q[i] = factor
            for j, d in enumerate(div):
                rem[i + j] -= factor * d
        return PolynomialQ(q), PolynomialQ(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if not isinstance(other, PolynomialQ):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("PolynomialQ", self.coeffs))

    def __repr__(self):
        return f"PolynomialQ({[str(c) for c in self.coeffs]})"


@dataclass(frozen=True)
class RationalFunctionQ:
    """Quotient of two exact polynomials in t."""

    num: PolynomialQ
    den: PolynomialQ

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("denominator polynomial must be nonzero")

    def __call__(self, t):
        d = self.den(t)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at t = {t}")
        return self.num(t) / d

    def polynomial_part(self) -> PolynomialQ:
        """Quotient of the polynomial long division num = q * den + r.

        As t -> infinity the function equals q(t) + O(1/t), so q carries the
        leading coefficients of the expansion at infinity.
        """
        return divmod(self.num, self.den)[0]


# ---------------------------------------------------------------------------
# Finite metric spaces


class FiniteMetricSpace:
    """Finite metric space given by its symmetric matrix of distances.

    Points are identified with indices 0..n-1.  Distinct points must be at
    strictly positive distance, so duplicate points are rejected.  The
    triangle-inequality check is O(n^3) and can be skipped for matrices that
    come from an actual embedding.
    """

    __slots__ = ("dist",)

    def __init__(self, dist, *, check_triangle: bool = True,
                 triangle_tol: float = 1e-9):
        mat = np.array(dist, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"distance matrix must be square, got {mat.shape}")
        if mat.shape[0] == 0:
            raise ValueError("metric space must contain at least one point")
        if not np.all(np.isfinite(mat)):
            raise ValueError("distances must be finite")
        if np.abs(mat - mat.T).max() > 1e-12:
            raise ValueError("distance matrix must be symmetric")
        mat = (mat + mat.T) / 2.0
        if np.any(np.diag(mat) != 0.0):
            raise ValueError("diagonal must be exactly zero")
        off = mat[~np.eye(mat.shape[0], dtype=bool)]
        if off.size and off.min() <= 0.0:
            raise ValueError(
                "off-diagonal distances must be positive (duplicate points?)"
            )
        if check_triangle:
            for k in range(mat.shape[0]):
                gap = mat - (mat[:, [k]] + mat[[k], :])
                if gap.max() > triangle_tol:
                    i, j = np.unravel_index(np.argmax(gap), gap.shape)
                    raise ValueError(
                        f"triangle inequality violated: d({i},{j}) > "
                        f"d({i},{k}) + d({k},{j}) by {gap[i, j]:.3e}"
                    )
        mat.setflags(write=False)
        self.dist = mat

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @classmethod
    def from_points(cls, points, p: int = 2, *,
                    check_triangle: bool = False) -> "FiniteMetricSpace":
        """Metric space of a point cloud under the l_p metric, p in {1, 2}.

        Point-cloud metrics satisfy the triangle inequality by construction,
        so the O(n^3) check defaults to off here.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if p == 1:
            mat = cdist(pts, pts, metric="cityblock")
        elif p == 2:
            mat = cdist(pts, pts, metric="euclidean")
        else:
            raise ValueError(f"p must be 1 or 2, got {p}")
        np.fill_diagonal(mat, 0.0)
        return cls(mat, check_triangle=check_triangle)

    def subspace(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        """Restriction to a subset of the points."""
        idx = np.asarray(indices, dtype=int)
        return FiniteMetricSpace(self.dist[np.ix_(idx, idx)],
                                 check_triangle=False)

    def scaled(self, factor: float) -> "FiniteMetricSpace":
        """The same point set with all distances multiplied by factor > 0."""
        if factor <= 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        return FiniteMetricSpace(self.dist * factor, check_triangle=False)

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n})"


# ---------------------------------------------------------------------------
# Convex body descriptions


@dataclass(frozen=True)
class Ball:
    """Euclidean ball of a given dimension and radius, centered at 0."""

    dim: int
    radius: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [0, a_1] x ... x [0, a_N] with positive edges."""

    edges: tuple[float, ...]

    def __init__(self, edges: Iterable[float]):
        object.__setattr__(self, "edges", tuple(float(a) for a in edges))
        if not self.edges:
            raise ValueError("box needs at least one edge")
        if min(self.edges) <= 0:
            raise ValueError(f"edges must be positive, got {self.edges}")

    @property
    def dim(self) -> int:
        return len(self.edges)

    def vertex_array(self) -> np.ndarray:
        """All corner points, shape (2**dim, dim)."""
        if self.dim > 20:
            raise ResourceLimitError(
                f"corner enumeration of a {self.dim}-dimensional box"
            )
        corners = np.indices((2,) * self.dim).reshape(self.dim, -1).T
        return corners * np.asarray(self.edges)


@dataclass(frozen=True)
class Polytope:
    """Convex hull of finitely many points, stored by their coordinates."""

    dim: int
    vertices: tuple[tuple[float, ...], ...]

    def __init__(self, dim: int, vertices):
        verts = tuple(tuple(float(x) for x in v) for v in vertices)
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        if not verts:
            raise ValueError("polytope needs at least one vertex")
        if any(len(v) != dim for v in verts):
            raise ValueError("all vertices must have length dim")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "vertices", verts)

    def vertex_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)


@dataclass(frozen=True)
class Interval:
    """The segment [0, length] on the real line."""

    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def dim(self) -> int:
        return 1

    def vertex_array(self) -> np.ndarray:
        return np.array([[0.0], [self.length]])


ConvexBodySpec = Union[Ball, Box, Polytope, Interval]


def body_dimension(body: ConvexBodySpec) -> int:
    """Ambient dimension of a convex body description."""
    return body.dim


# ---------------------------------------------------------------------------
# Reproducible randomness


@dataclass(frozen=True)
class RandomStream:
    """Named, reproducible source of randomness.

    The same (seed, index) pair always yields the same sample sequence.
    Distinct indices give statistically independent streams, which is what
    lets Monte Carlo work fan out over chunks without sharing state.
    """

    seed: int
    index: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.index,))
        )

    def chunk_generator(self, chunk: int) -> np.random.Generator:
        """Generator for one chunk of a partitioned sampling run."""
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed,
                                   spawn_key=(self.index, chunk))
        )

    def substream(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, index)
