"""Points, configurations, discrete measures, test functions, and kernels.

Conventions shared by the whole package:

* a point is a plain tuple of finite floats, compared bitwise, so that
  configurations form exact subset lattices;
* a configuration never contains the same point twice; multiplicity is
  expressed through :class:`DiscreteMeasure` weights;
* the points of a configuration are kept sorted lexicographically, which
  fixes enumeration order and makes floating point sums reproducible;
* symmetric kernels sort their arguments before evaluating, so permuting
  the arguments returns the identical float.

All values are immutable after construction and every operation is a pure
function, so concurrent use needs no locking.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

Point = tuple[float, ...]

#: Half-width, in units of ``width``, of the box outside which a Gaussian
#: bump is treated as zero.  The neglected mass is below 1e-16 relative.
GAUSSIAN_BOX_HALF_WIDTHS = 8.5

#: Points per axis used when a test function is sampled on its support
#: to bound its infimum (the "1 + phi > 0" domain check).
SUPPORT_GRID_POINTS = 32


class OverlapError(ValueError):
    """Two configurations share a point where disjointness is required."""


class MembershipError(ValueError):
    """A point is (or is not) in a configuration, contrary to a precondition."""


class ArityError(ValueError):
    """A kernel was applied to the wrong number of points."""


class DomainError(ValueError):
    """A functional was evaluated outside its domain (e.g. 1 + phi <= 0)."""


def make_point(coords: Iterable[float]) -> Point:
    """Coerce ``coords`` to a point, checking finiteness and d >= 1."""
    pt = tuple(float(c) for c in coords)
    if len(pt) == 0:
        raise ValueError("a point needs at least one coordinate")
    if not all(math.isfinite(c) for c in pt):
        raise ValueError(f"point coordinates must be finite, got {pt}")
    return pt


def _check_same_dimension(points: Sequence[Point]) -> int | None:
    dims = {len(p) for p in points}
    if len(dims) > 1:
        raise ValueError(f"points of mixed dimension: {sorted(dims)}")
    return dims.pop() if dims else None


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with strictly positive volume."""

    lo: Point
    hi: Point

    def __post_init__(self) -> None:
        lo = make_point(self.lo)
        hi = make_point(self.hi)
        if len(lo) != len(hi):
            raise ValueError("box corners must share a dimension")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError(f"box needs lo < hi coordinatewise, got {lo}, {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return math.prod(b - a for a, b in zip(self.lo, self.hi))

    def contains(self, x: Point) -> bool:
        return all(a <= c <= b for a, c, b in zip(self.lo, x, self.hi))

    def contains_box(self, other: "Box") -> bool:
        return self.contains(other.lo) and self.contains(other.hi)

    @staticmethod
    def hull(boxes: Sequence["Box"]) -> "Box":
        if not boxes:
            raise ValueError("hull of no boxes")
        lo = tuple(min(b.lo[i] for b in boxes) for i in range(boxes[0].dimension))
        hi = tuple(max(b.hi[i] for b in boxes) for i in range(boxes[0].dimension))
        return Box(lo, hi)


@dataclass(frozen=True)
class FiniteConfiguration:
    """A finite set of pairwise distinct points, kept in canonical order.

    The constructor accepts any iterable of point-like sequences, sorts
    them lexicographically and rejects exact duplicates.  The empty
    configuration is valid and carries no dimension of its own.
    """

    points: tuple[Point, ...] = ()

    def __post_init__(self) -> None:
        pts = tuple(sorted(make_point(p) for p in self.points))
        _check_same_dimension(pts)
        for a, b in itertools.pairwise(pts):
            if a == b:
                raise ValueError(f"duplicate point {a}; use DiscreteMeasure for multiplicity")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, x) -> bool:
        return tuple(x) in self.points

    @property
    def dimension(self) -> int | None:
        """Dimension of the points, or None for the empty configuration."""
        return len(self.points[0]) if self.points else None

    def with_point(self, x: Point) -> "FiniteConfiguration":
        """Configuration with ``x`` added; ``x`` must not be present."""
        x = make_point(x)
        if x in self.points:
            raise MembershipError(f"point {x} already in configuration")
        return FiniteConfiguration(self.points + (x,))

    def without_point(self, x: Point) -> "FiniteConfiguration":
        """Configuration with ``x`` removed; ``x`` must be present."""
        x = make_point(x)
        if x not in self.points:
            raise MembershipError(f"point {x} not in configuration")
        return FiniteConfiguration(tuple(p for p in self.points if p != x))

    def to_json(self) -> dict:
        return {"points": [list(p) for p in self.points]}


def decode_configuration(data: dict) -> FiniteConfiguration:
    return FiniteConfiguration(tuple(map(tuple, data["points"])))


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many weighted atoms at pairwise distinct locations.

    Weights may be any finite real; positivity is only needed when the
    measure is read probabilistically.  A configuration embeds as the
    measure with unit weights.
    """

    atoms: tuple[tuple[Point, float], ...] = ()

    def __post_init__(self) -> None:
        normalized = tuple(sorted((make_point(loc), float(w)) for loc, w in self.atoms))
        _check_same_dimension([loc for loc, _ in normalized])
        for (a, _), (b, _) in itertools.pairwise(normalized):
            if a == b:
                raise ValueError(f"duplicate atom location {a}")
        if not all(math.isfinite(w) for _, w in normalized):
            raise ValueError("atom weights must be finite")
        object.__setattr__(self, "atoms", normalized)

    def __len__(self) -> int:
        return len(self.atoms)

    @classmethod
    def from_configuration(cls, gamma: FiniteConfiguration) -> "DiscreteMeasure":
        return cls(tuple((p, 1.0) for p in gamma))

    def add(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        """Pointwise sum of two measures, merging coincident atoms."""
        weights: dict[Point, float] = {}
        for loc, w in self.atoms + other.atoms:
            weights[loc] = weights.get(loc, 0.0) + w
        return DiscreteMeasure(tuple(weights.items()))

    def to_json(self) -> dict:
        return {"atoms": [{"loc": list(loc), "w": w} for loc, w in self.atoms]}


def decode_measure(data: dict) -> DiscreteMeasure:
    return DiscreteMeasure(tuple((tuple(a["loc"]), a["w"]) for a in data["atoms"]))


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------


class TestFunction:
    """A function on R^d with an exact integral and a bounding box.

    Subclasses are closed under scaling and finite sums, and every
    descriptor can be serialized to a tagged JSON dict.
    """

    def __call__(self, x: Point) -> float:
        raise NotImplementedError

    def integral(self) -> float:
        """Exact integral over all of R^d."""
        raise NotImplementedError

    def bounding_box(self) -> Box:
        """Box outside which the function is (numerically) zero."""
        raise NotImplementedError

    def special_points(self) -> list[Point]:
        """Points where descriptor-specific extremes are attained."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class IndicatorBox(TestFunction):
    """Indicator of a closed box, 1 inside and 0 outside."""

    lo: Point
    hi: Point

    def __post_init__(self) -> None:
        box = Box(self.lo, self.hi)  # validates
        object.__setattr__(self, "lo", box.lo)
        object.__setattr__(self, "hi", box.hi)

    def __call__(self, x: Point) -> float:
        return 1.0 if all(a <= c <= b for a, c, b in zip(self.lo, x, self.hi, strict=True)) else 0.0

    def integral(self) -> float:
        return Box(self.lo, self.hi).volume

    def bounding_box(self) -> Box:
        return Box(self.lo, self.hi)

    def special_points(self) -> list[Point]:
        center = tuple((a + b) / 2.0 for a, b in zip(self.lo, self.hi))
        return [center, self.lo, self.hi]

    def to_json(self) -> dict:
        return {"kind": "indicator_box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class GaussianBump(TestFunction):
    """Isotropic Gaussian ``amplitude * exp(-|x - center|^2 / (2 width^2))``."""

    center: Point
    width: float
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", make_point(self.center))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError("width must be positive and finite")
        if not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")

    def __call__(self, x: Point) -> float:
        sq = math.fsum((c - m) ** 2 for c, m in zip(x, self.center, strict=True))
        return self.amplitude * math.exp(-sq / (2.0 * self.width**2))

    def integral(self) -> float:
        d = len(self.center)
        return self.amplitude * (self.width * math.sqrt(2.0 * math.pi)) ** d

    def bounding_box(self) -> Box:
        r = GAUSSIAN_BOX_HALF_WIDTHS * self.width
        return Box(tuple(c - r for c in self.center), tuple(c + r for c in self.center))

    def special_points(self) -> list[Point]:
        return [self.center]

    def to_json(self) -> dict:
        return {
            "kind": "gaussian_bump",
            "center": list(self.center),
            "width": self.width,
            "amplitude": self.amplitude,
        }


@dataclass(frozen=True)
class ScaledFunction(TestFunction):
    c: float
    inner: TestFunction

    def __call__(self, x: Point) -> float:
        return self.c * self.inner(x)

    def integral(self) -> float:
        return self.c * self.inner.integral()

    def bounding_box(self) -> Box:
        return self.inner.bounding_box()

    def special_points(self) -> list[Point]:
        return self.inner.special_points()

    def to_json(self) -> dict:
        return {"kind": "scaled", "c": self.c, "inner": self.inner.to_json()}


@dataclass(frozen=True)
class FunctionSum(TestFunction):
    terms: tuple[TestFunction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("FunctionSum needs at least one term")

    def __call__(self, x: Point) -> float:
        return math.fsum(t(x) for t in self.terms)

    def integral(self) -> float:
        return math.fsum(t.integral() for t in self.terms)

    def bounding_box(self) -> Box:
        return Box.hull([t.bounding_box() for t in self.terms])

    def special_points(self) -> list[Point]:
        return [p for t in self.terms for p in t.special_points()]

    def to_json(self) -> dict:
        return {"kind": "sum", "terms": [t.to_json() for t in self.terms]}


def decode_test_function(data: dict) -> TestFunction:
    kind = data.get("kind")
    if kind == "indicator_box":
        return IndicatorBox(tuple(data["lo"]), tuple(data["hi"]))
    if kind == "gaussian_bump":
        return GaussianBump(tuple(data["center"]), data["width"], data["amplitude"])
    if kind == "scaled":
        return ScaledFunction(float(data["c"]), decode_test_function(data["inner"]))
    if kind == "sum":
        return FunctionSum(tuple(decode_test_function(t) for t in data["terms"]))
    raise ValueError(f"unknown test function kind: {kind!r}")


def min_on_box(phi: TestFunction, box: Box) -> float:
    """Lower bound estimate for phi on ``box``, by grid plus extremes.

    Samples a SUPPORT_GRID_POINTS**d grid over the box (endpoints
    included), adds the descriptor-specific extreme points that fall
    inside, and the value 0.0 attained outside every descriptor's
    support.
    """
    d = box.dimension
    axes = [
        [box.lo[i] + (box.hi[i] - box.lo[i]) * j / (SUPPORT_GRID_POINTS - 1) for j in range(SUPPORT_GRID_POINTS)]
        for i in range(d)
    ]
    values = [phi(pt) for pt in itertools.product(*axes)]
    values.extend(phi(p) for p in phi.special_points() if box.contains(p))
    values.append(0.0)
    return min(values)


def min_on_support(phi: TestFunction) -> float:
    return min_on_box(phi, phi.bounding_box())


def require_above_minus_one(phi: TestFunction, box: Box | None = None) -> None:
    """Raise DomainError unless inf(phi) > -1 on the given box or support."""
    m = min_on_box(phi, box) if box is not None else min_on_support(phi)
    if m <= -1.0:
        raise DomainError(f"1 + phi must stay positive; sampled minimum {m}")


# ---------------------------------------------------------------------------
# Symmetric kernels
# ---------------------------------------------------------------------------


class SymmetricKernel:
    """Symmetric function of ``order`` points, symmetric by construction.

    Evaluation sorts its arguments into canonical order first, so a
    permutation of the arguments returns the bit-identical float.
    """

    order: int

    def _eval_sorted(self, xs: tuple[Point, ...]) -> float:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class TensorPower(SymmetricKernel):
    """Product kernel ``phi(x_1) * ... * phi(x_n)``."""

    phi: TestFunction
    order: int

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValueError("order must be >= 0")

    def _eval_sorted(self, xs: tuple[Point, ...]) -> float:
        return math.prod(self.phi(x) for x in xs)

    def to_json(self) -> dict:
        return {"kind": "tensor_power", "order": self.order, "phi": self.phi.to_json()}


@dataclass(frozen=True)
class SymmetrizedProduct(SymmetricKernel):
    """Symmetrization of ``phi_1 x ... x phi_n`` with 1/n! normalization.

    The normalization makes a symmetrized product of n copies of phi
    agree with ``TensorPower(phi, n)``.
    """

    factors: tuple[TestFunction, ...]
    order: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "order", len(self.factors))

    def _eval_sorted(self, xs: tuple[Point, ...]) -> float:
        n = self.order
        if n == 0:
            return 1.0
        terms = [
            math.prod(self.factors[j](xs[i]) for i, j in enumerate(perm))
            for perm in itertools.permutations(range(n))
        ]
        return math.fsum(terms) / math.factorial(n)

    def to_json(self) -> dict:
        return {"kind": "symmetrized_product", "factors": [f.to_json() for f in self.factors]}


@dataclass(frozen=True)
class ConstantKernel(SymmetricKernel):
    value: float
    order: int

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValueError("order must be >= 0")

    def _eval_sorted(self, xs: tuple[Point, ...]) -> float:
        return float(self.value)

    def to_json(self) -> dict:
        return {"kind": "constant", "order": self.order, "value": self.value}


@dataclass(frozen=True)
class ScaledKernel(SymmetricKernel):
    c: float
    inner: SymmetricKernel

    @property
    def order(self) -> int:  # type: ignore[override]
        return self.inner.order

    def _eval_sorted(self, xs: tuple[Point, ...]) -> float:
        return self.c * self.inner._eval_sorted(xs)

    def to_json(self) -> dict:
        return {"kind": "scaled", "c": self.c, "inner": self.inner.to_json()}


@dataclass(frozen=True)
class KernelSum(SymmetricKernel):
    terms: tuple[SymmetricKernel, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("KernelSum needs at least one term")
        if len({t.order for t in self.terms}) != 1:
            raise ValueError("KernelSum terms must share one order")

    @property
    def order(self) -> int:  # type: ignore[override]
        return self.terms[0].order

    def _eval_sorted(self, xs: tuple[Point, ...]) -> float:
        return math.fsum(t._eval_sorted(xs) for t in self.terms)

    def to_json(self) -> dict:
        return {"kind": "sum", "terms": [t.to_json() for t in self.terms]}


def decode_kernel(data: dict) -> SymmetricKernel:
    kind = data.get("kind")
    if kind == "tensor_power":
        return TensorPower(decode_test_function(data["phi"]), data["order"])
    if kind == "symmetrized_product":
        return SymmetrizedProduct(tuple(decode_test_function(f) for f in data["factors"]))
    if kind == "constant":
        return ConstantKernel(data["value"], data["order"])
    if kind == "scaled":
        return ScaledKernel(float(data["c"]), decode_kernel(data["inner"]))
    if kind == "sum":
        return KernelSum(tuple(decode_kernel(t) for t in data["terms"]))
    raise ValueError(f"unknown kernel kind: {kind!r}")


def eval_kernel(f: SymmetricKernel, xs: Sequence[Point]) -> float:
    """Evaluate ``f`` at a tuple of points (repetitions allowed).

    The tuple length must equal ``f.order``.  Arguments are sorted into
    canonical order before evaluation, which enforces exact permutation
    invariance of the float result.
    """
    pts = tuple(make_point(x) for x in xs)
    if len(pts) != f.order:
        raise ArityError(f"kernel of order {f.order} applied to {len(pts)} points")
    return float(f._eval_sorted(tuple(sorted(pts))))


# ---------------------------------------------------------------------------
# Configuration operations
# ---------------------------------------------------------------------------


def union_disjoint(g1: FiniteConfiguration, g2: FiniteConfiguration) -> FiniteConfiguration:
    """Set union of disjoint configurations; overlap raises OverlapError."""
    common = set(g1.points) & set(g2.points)
    if common:
        raise OverlapError(f"configurations share points: {sorted(common)}")
    return FiniteConfiguration(g1.points + g2.points)


def subsets_of_size(gamma: FiniteConfiguration, k: int) -> Iterator[FiniteConfiguration]:
    """Yield every k-subset exactly once, in canonical enumeration order."""
    if k < 0:
        raise ValueError("subset size must be >= 0")
    for combo in itertools.combinations(gamma.points, k):
        yield FiniteConfiguration(combo)


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def dumps(obj) -> str:
    """Serialize a core value (or plain JSON data) to a canonical string.

    Floats are written with Python's shortest round-trip repr, so
    ``loads(dumps(x))`` restores every coordinate and weight bit-exactly.
    """
    data = obj.to_json() if hasattr(obj, "to_json") else obj
    return json.dumps(data, sort_keys=True)


_DECODERS: dict[str, Callable] = {
    "configuration": decode_configuration,
    "measure": decode_measure,
    "test_function": decode_test_function,
    "kernel": decode_kernel,
}


def loads(text: str, kind: str):
    """Decode a JSON string produced by :func:`dumps`.

    ``kind`` is one of 'configuration', 'measure', 'test_function',
    'kernel', or 'point'.
    """
    data = json.loads(text)
    if kind == "point":
        return make_point(data)
    try:
        return _DECODERS[kind](data)
    except KeyError:
        raise ValueError(f"unknown kind {kind!r}") from None
