"""Exact magnitude of odd-dimensional Euclidean balls via Schröder paths.

A Schröder path of index i runs from (-i, i) to (i, i) in the integer grid
using ascents (x, y) -> (x+1, y+1), descents (x, y) -> (x+1, y-1), and flat
steps (x, y) -> (x+2, y).  A disjoint k-collection holds one path per index
0..k (index 0 is the trivial path at the origin) with no grid node shared
between paths.

Each step carries a weight depending on an integer offset j: ascents weigh
1, flat steps weigh t, and a descent leaving height y weighs y + 1 - j.
Summing the step-weight products over all disjoint collections produces the
two polynomials whose quotient is the magnitude of t * B^d for odd d:

    magnitude(t * B^d) = N(t) / (d! * D(t)),   d = 2m + 1,

where N sums offset-2 weights over (m+1)-collections and D sums offset-0
weights over (m-1)-collections.  Everything here is exact integer/rational
arithmetic: no floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .core import PolynomialQ, RationalFunctionQ, ResourceLimitError

__all__ = [
    "ASCENT",
    "DESCENT",
    "FLAT",
    "SchroederPath",
    "DisjointCollection",
    "DEFAULT_MAX_INDEX",
    "enumerate_collections",
    "iter_collections",
    "weight_product",
    "weight_sum",
    "roof_collection",
    "lift_collection",
    "single_flat_collection",
    "single_flat_weight_ratio",
    "BallMagnitudeResult",
    "ball_magnitude_function",
    "derivative_at_zero",
    "IdentityRow",
    "IdentityReport",
    "verify_combinatorial_identities",
]

ASCENT = "ascent"
DESCENT = "descent"
FLAT = "flat"

_MOVES = {ASCENT: (1, 1), DESCENT: (1, -1), FLAT: (2, 0)}

# Collections are enumerated path by path; beyond this top index the search
# space is large enough that callers must raise the cap explicitly.
DEFAULT_MAX_INDEX = 7


@dataclass(frozen=True)
class SchroederPath:
    """One Schröder path; index i fixes the endpoints (-i, i) and (i, i)."""

    index: int
    steps: tuple[str, ...]

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"path index must be >= 0, got {self.index}")
        for s in self.steps:
            if s not in _MOVES:
                raise ValueError(f"unknown step kind {s!r}")
        end = self.nodes()[-1]
        if end != (self.index, self.index):
            raise ValueError(
                f"path of index {self.index} must end at "
                f"({self.index}, {self.index}), ends at {end}"
            )

    def nodes(self) -> tuple[tuple[int, int], ...]:
        """Grid nodes visited, start and end included.

        A flat step jumps two columns, so no node is created in between.
        """
        x, y = -self.index, self.index
        out = [(x, y)]
        for s in self.steps:
            dx, dy = _MOVES[s]
            x, y = x + dx, y + dy
            out.append((x, y))
        return tuple(out)

    @property
    def flat_count(self) -> int:
        return sum(1 for s in self.steps if s == FLAT)


@dataclass(frozen=True)
class DisjointCollection:
    """Node-disjoint Schröder paths, one per index 0..k.

    k = -1 denotes the empty collection (no paths at all); k = 0 holds just
    the trivial path at the origin.
    """

    k: int
    paths: tuple[SchroederPath, ...]

    def __post_init__(self):
        if self.k < -1:
            raise ValueError(f"k must be >= -1, got {self.k}")
        if len(self.paths) != self.k + 1:
            raise ValueError(
                f"a {self.k}-collection needs {self.k + 1} paths, "
                f"got {len(self.paths)}"
            )
        seen: set[tuple[int, int]] = set()
        for i, path in enumerate(self.paths):
            if path.index != i:
                raise ValueError(f"path {i} carries index {path.index}")
            for node in path.nodes():
                if node in seen:
                    raise ValueError(f"paths share the node {node}")
                seen.add(node)

    @property
    def flat_count(self) -> int:
        return sum(p.flat_count for p in self.paths)


def weight_product(collection: DisjointCollection, offset: int) -> PolynomialQ:
    """Product of step weights over the collection, as a monomial in t.

    Ascents contribute 1, flat steps t, and a descent leaving height y the
    integer y + 1 - offset, so the product is (integer) * t**(flat count).
    """
    coeff = 1
    flats = 0
    for path in collection.paths:
        y = path.index
        for s in path.steps:
            if s == DESCENT:
                coeff *= y + 1 - offset
                y -= 1
            elif s == ASCENT:
                y += 1
            else:
                flats += 1
    return PolynomialQ.monomial(coeff, flats)


# ---------------------------------------------------------------------------
# Enumeration


def _admissible_paths(index: int, occupied: set[tuple[int, int]],
                      flat_budget: Optional[int]):
    """All paths of the given index avoiding occupied nodes.

    Returns tuples (steps, nodes, flats, w0, w2) where w0 and w2 are the
    integer descent-weight products at offsets 0 and 2.  The start node is
    checked against occupancy too.
    """
    i = index
    start = (-i, i)
    if start in occupied:
        return
    found: list[tuple] = []
    steps: list[str] = []
    nodes: list[tuple[int, int]] = [start]

    def rec(x: int, y: int, flats: int, w0: int, w2: int):
        if x == i:
            if y == i:
                found.append((tuple(steps), tuple(nodes), flats, w0, w2))
            return
        for kind, (dx, dy) in _MOVES.items():
            nx, ny = x + dx, y + dy
            if nx > i or abs(i - ny) > i - nx:
                continue
            if kind == FLAT and flat_budget is not None \
                    and flats + 1 > flat_budget:
                continue
            node = (nx, ny)
            if node in occupied:
                continue
            steps.append(kind)
            nodes.append(node)
            if kind == DESCENT:
                rec(nx, ny, flats, w0 * (y + 1), w2 * (y - 1))
            elif kind == ASCENT:
                rec(nx, ny, flats, w0, w2)
            else:
                rec(nx, ny, flats + 1, w0, w2)
            steps.pop()
            nodes.pop()

    rec(-i, i, 0, 1, 1)
    return found


def _iter_collections_raw(k: int, max_flats: Optional[int]) -> Iterator[tuple]:
    """Yield raw collections as tuples of (steps, nodes, flats, w0, w2).

    Paths are chosen bottom-up (index 1 first): the small paths crowd the
    region near the origin, so they prune the search far earlier than
    starting from the top index would.
    """
    if k == -1:
        yield ()
        return
    origin_entry = ((), ((0, 0),), 0, 1, 1)
    chosen: list[tuple] = [origin_entry]
    occupied: set[tuple[int, int]] = {(0, 0)}

    def rec(i: int, flats_used: int) -> Iterator[tuple]:
        if i > k:
            yield tuple(chosen)
            return
        budget = None if max_flats is None else max_flats - flats_used
        for entry in _admissible_paths(i, occupied, budget):
            _, nodes, flats, _, _ = entry
            chosen.append(entry)
            occupied.update(nodes)
            yield from rec(i + 1, flats_used + flats)
            occupied.difference_update(nodes)
            chosen.pop()

    yield from rec(1, 0)


def _check_cap(k: int, max_index: int):
    if k > max_index:
        raise ResourceLimitError(
            f"enumeration of {k}-collections exceeds the configured cap "
            f"(max index {max_index}); pass a larger max_index to override"
        )


def iter_collections(k: int, *, max_flats: Optional[int] = None,
                     max_index: int = DEFAULT_MAX_INDEX
                     ) -> Iterator[DisjointCollection]:
    """Stream all disjoint k-collections (optionally capped in flat steps)."""
    if k < -1:
        raise ValueError(f"k must be >= -1, got {k}")
    _check_cap(k, max_index)
    for raw in _iter_collections_raw(k, max_flats):
        paths = tuple(
            SchroederPath(index=i, steps=entry[0])
            for i, entry in enumerate(raw)
        )
        yield DisjointCollection(k=k, paths=paths)


def enumerate_collections(k: int, *, max_flats: Optional[int] = None,
                          max_index: int = DEFAULT_MAX_INDEX
                          ) -> list[DisjointCollection]:
    """All disjoint k-collections as a list; see iter_collections."""
    return list(iter_collections(k, max_flats=max_flats,
                                 max_index=max_index))


def weight_sum(k: int, offset: int, *, max_flats: Optional[int] = None,
               max_index: int = DEFAULT_MAX_INDEX) -> PolynomialQ:
    """Sum of weight products over all disjoint k-collections.

    Streams the enumeration without materializing path objects, so this is
    the workhorse behind the exact ball magnitude.
    """
    if k < -1:
        raise ValueError(f"k must be >= -1, got {k}")
    _check_cap(k, max_index)
    if offset not in (0, 2):
        # uncommon offsets: recompute weights per collection
        total = PolynomialQ()
        for collection in iter_collections(k, max_flats=max_flats,
                                           max_index=max_index):
            total = total + weight_product(collection, offset)
        return total
    pick = 3 if offset == 0 else 4
    coeffs: dict[int, int] = {}
    for raw in _iter_collections_raw(k, max_flats):
        coeff = 1
        flats = 0
        for entry in raw:
            flats += entry[2]
            coeff *= entry[pick]
        coeffs[flats] = coeffs.get(flats, 0) + coeff
    top = max(coeffs) if coeffs else -1
    return PolynomialQ([coeffs.get(p, 0) for p in range(top + 1)])


# ---------------------------------------------------------------------------
# Distinguished collections


def roof_collection(k: int) -> DisjointCollection:
    """The unique flat-free k-collection: path i is i ascents, i descents."""
    if k < -1:
        raise ValueError(f"k must be >= -1, got {k}")
    paths = tuple(
        SchroederPath(index=i, steps=(ASCENT,) * i + (DESCENT,) * i)
        for i in range(k + 1)
    )
    return DisjointCollection(k=k, paths=paths)


def lift_collection(collection: DisjointCollection) -> DisjointCollection:
    """Embed a k-collection into the (k+2)-collections.

    Every old path is shifted up two units and re-indexed one higher, gaining
    an ascent in front and a descent at the end; a fresh trivial path takes
    index 0 and a roof path is added at the new top index k + 2.  The step
    weights are arranged so that the offset-2 product of the lifted
    collection equals (2k + 3)! times the offset-0 product of the original.
    """
    k = collection.k
    new_paths = [SchroederPath(index=0, steps=())]
    for old in collection.paths:
        new_paths.append(
            SchroederPath(index=old.index + 1,
                          steps=(ASCENT,) + old.steps + (DESCENT,))
        )
    top = k + 2
    new_paths.append(
        SchroederPath(index=top, steps=(ASCENT,) * top + (DESCENT,) * top)
    )
    return DisjointCollection(k=top, paths=tuple(new_paths))


def single_flat_collection(k: int, p: int, q: int) -> DisjointCollection:
    """The one-flat k-collection labeled by (p, q).

    Path p spends its middle step flat; paths p+1..p+q each dip once (one
    descent immediately undone by an ascent) to slot above the flat step;
    all other paths are roofs.  Ranges: 1 <= p <= k and 0 <= q <= k - p.
    Every one-flat collection arises this way exactly once.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 1 <= p <= k:
        raise ValueError(f"p must lie in 1..{k}, got {p}")
    if not 0 <= q <= k - p:
        raise ValueError(f"q must lie in 0..{k - p}, got {q}")
    paths = [SchroederPath(index=0, steps=())]
    for i in range(1, k + 1):
        if i == p:
            steps = (ASCENT,) * (p - 1) + (FLAT,) + (DESCENT,) * (p - 1)
        elif p < i <= p + q:
            steps = ((ASCENT,) * (i - 1) + (DESCENT, ASCENT)
                     + (DESCENT,) * (i - 1))
        else:
            steps = (ASCENT,) * i + (DESCENT,) * i
        paths.append(SchroederPath(index=i, steps=steps))
    return DisjointCollection(k=k, paths=tuple(paths))


def single_flat_weight_ratio(k: int, p: int, q: int) -> Fraction:
    """Closed form for the one-flat collection's weight relative to the roof.

    With w the offset-2 weight product, this returns the exact value of
    w(single_flat_collection(k, p, q)) / (t * w(roof_collection(k))):

        prod_{j=1..q} (2(p+j) - 2)  /  prod_{j=0..q} (2(p+j) - 1)
    """
    if not 1 <= p <= k or not 0 <= q <= k - p:
        raise ValueError(f"(p, q) = ({p}, {q}) out of range for k = {k}")
    num = 1
    for j in range(1, q + 1):
        num *= 2 * (p + j) - 2
    den = 1
    for j in range(0, q + 1):
        den *= 2 * (p + j) - 1
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# Ball magnitude


@dataclass(frozen=True)
class BallMagnitudeResult:
    """Exact magnitude function of t * B^d for odd d, as N(t) / (d! D(t))."""

    d: int
    m: int
    num: PolynomialQ
    den: PolynomialQ

    def __post_init__(self):
        if self.num(0) != math.factorial(self.d) * self.den(0):
            raise ArithmeticError(
                f"numerator at 0 must equal d! * denominator at 0 for "
                f"d = {self.d}; got {self.num(0)} vs "
                f"{math.factorial(self.d)} * {self.den(0)}"
            )

    @property
    def ratfun(self) -> RationalFunctionQ:
        return RationalFunctionQ(self.num,
                                 math.factorial(self.d) * self.den)

    def magnitude(self, t):
        """Evaluate the magnitude; exact for int or Fraction input."""
        return self.ratfun(t)

    def to_dict(self) -> dict:
        """JSON-friendly form with bit-exact decimal coefficient strings."""
        scaled_den = math.factorial(self.d) * self.den
        return {
            "d": self.d,
            "m": self.m,
            "num": [str(c) for c in self.num.coeffs],
            "den": [str(c) for c in scaled_den.coeffs],
            "derivative_at_zero": str(derivative_at_zero(self)),
        }


def ball_magnitude_function(d: int, *,
                            max_index: int = DEFAULT_MAX_INDEX
                            ) -> BallMagnitudeResult:
    """Exact magnitude function of the odd-dimensional unit ball t * B^d."""
    if d < 1 or d % 2 == 0:
        raise ValueError(f"d must be an odd positive integer, got {d}")
    m = (d - 1) // 2
    num = weight_sum(m + 1, 2, max_index=max_index)
    den = weight_sum(m - 1, 0, max_index=max_index)
    return BallMagnitudeResult(d=d, m=m, num=num, den=den)


def derivative_at_zero(result: BallMagnitudeResult) -> Fraction:
    """Exact t-derivative of the ball magnitude at t = 0.

    By the quotient rule and num(0) = d! den(0) this is
    (num'(0) - d! den'(0)) / num(0); it equals half the mean-width term
    of the ball, which tests cross-check against the closed form.
    """
    dfac = math.factorial(result.d)
    n0 = result.num(0)
    n1 = result.num.derivative()(0)
    d1 = result.den.derivative()(0)
    return Fraction(n1 - dfac * d1, n0)


# ---------------------------------------------------------------------------
# Identity suite


@dataclass(frozen=True)
class IdentityRow:
    """Exact checks of the three half-integer binomial identities at one m."""

    m: int
    flat_sum_matches: bool
    binomial_sum_matches: bool
    telescoping_matches: bool

    @property
    def all_match(self) -> bool:
        return (self.flat_sum_matches and self.binomial_sum_matches
                and self.telescoping_matches)


@dataclass(frozen=True)
class IdentityReport:
    rows: tuple[IdentityRow, ...]

    @property
    def all_match(self) -> bool:
        return all(r.all_match for r in self.rows)


def verify_combinatorial_identities(m_max: int) -> IdentityReport:
    """Exactly check the binomial identities behind the ball derivative.

    For every m <= m_max:

    * sum_{q=0..m-1} 1/binom(q + 1/2, q) = 1/binom(m - 1/2, m) - 1
    * sum_{k=0..m} binom(k - 1/2, k) = binom(m + 1/2, m)
    * 1/binom(m + 1/2, m + 1) - 1/binom(m - 1/2, m) = 1/binom(m + 1/2, m)

    All arithmetic is exact; the report records equality verbatim.
    """
    from .core import half_binomial

    if m_max < 0:
        raise ValueError(f"m_max must be >= 0, got {m_max}")
    rows = []
    for m in range(m_max + 1):
        half = Fraction(1, 2)
        flat_sum = sum(
            (1 / half_binomial(q + half, q) for q in range(m)), Fraction(0)
        )
        flat_ok = flat_sum == 1 / half_binomial(m - half, m) - 1
        binom_sum = sum(
            (half_binomial(k - half, k) for k in range(m + 1)), Fraction(0)
        )
        binom_ok = binom_sum == half_binomial(m + half, m)
        tele_ok = (
            1 / half_binomial(m + half, m + 1)
            - 1 / half_binomial(m - half, m)
            == 1 / half_binomial(m + half, m)
        )
        rows.append(IdentityRow(m=m, flat_sum_matches=flat_ok,
                                binomial_sum_matches=binom_ok,
                                telescoping_matches=tele_ok))
    return IdentityReport(rows=tuple(rows))
