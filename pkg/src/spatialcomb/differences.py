"""Birth/death difference operators on observables, and their classical kin.

An observable is a real function of a finite configuration.  The death
gradient removes a point, the birth gradient adds one; directional
derivatives weight those gradients by a test function, with the birth
side integrated over space by quadrature.  The classical one-variable
difference operators and Newton-series utilities live here too.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .core import Box, FiniteConfiguration, Point, SymmetricKernel, TestFunction, make_point
from .factorial import generating_functional, pair_factorial
from .ktransform import QuasiObservable, k_transform


class Observable:
    """Total, finite-valued function on finite configurations."""

    def __init__(self, fn: Callable[[FiniteConfiguration], float], kind: str = "custom"):
        self._fn = fn
        self.kind = kind

    def __call__(self, gamma: FiniteConfiguration) -> float:
        return float(self._fn(gamma))

    @classmethod
    def generating_functional(cls, phi: TestFunction) -> "Observable":
        return cls(lambda g: generating_functional(g, phi), kind="generating_functional")

    @classmethod
    def newton_monomial(cls, f: SymmetricKernel) -> "Observable":
        """The factorial pairing ``gamma -> <f, (gamma)_n>`` as an observable."""
        return cls(lambda g: pair_factorial(g, f), kind="newton_monomial")

    @classmethod
    def k_transform_of(cls, G: QuasiObservable) -> "Observable":
        return cls(lambda g: k_transform(G, g), kind="k_transform_of")

    @classmethod
    def cardinality(cls) -> "Observable":
        return cls(lambda g: float(len(g)), kind="custom")

    @classmethod
    def custom(cls, fn: Callable[[FiniteConfiguration], float]) -> "Observable":
        return cls(fn, kind="custom")


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

DEFAULT_GRID_POINTS = 64


@dataclass(frozen=True)
class GridQuadrature:
    """Deterministic midpoint rule on a product grid."""

    box: Box
    points_per_axis: int = DEFAULT_GRID_POINTS

    def __post_init__(self) -> None:
        if self.points_per_axis < 2:
            raise ValueError("points_per_axis must be >= 2")

    def _nodes(self, points_per_axis: int) -> Iterator[tuple[Point, float]]:
        lo, hi = self.box.lo, self.box.hi
        steps = [(b - a) / points_per_axis for a, b in zip(lo, hi)]
        weight = math.prod(steps)
        axes = [
            [a + (j + 0.5) * h for j in range(points_per_axis)]
            for a, h in zip(lo, steps)
        ]
        for pt in itertools.product(*axes):
            yield pt, weight

    def integrate(self, fn: Callable[[Point], float]) -> float:
        return math.fsum(w * fn(x) for x, w in self._nodes(self.points_per_axis))

    def integrate_with_error(self, fn: Callable[[Point], float]) -> tuple[float, float]:
        """Integral at doubled resolution plus a certified tolerance.

        The tolerance is the Richardson difference |I_2p - I_p|, about
        three times the actual error of I_2p for smooth integrands under
        the midpoint rule's h^2 convergence.
        """
        coarse = self.integrate(fn)
        fine = math.fsum(w * fn(x) for x, w in self._nodes(2 * self.points_per_axis))
        return fine, abs(fine - coarse)


@dataclass(frozen=True)
class MonteCarloQuadrature:
    """Uniform sampling on a box with a seed-deterministic stream."""

    box: Box
    n_samples: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")

    def _values(self, fn: Callable[[Point], float]) -> np.ndarray:
        rng = np.random.Generator(np.random.Philox(key=[self.seed & 0xFFFFFFFFFFFFFFFF, 0]))
        lo = np.asarray(self.box.lo)
        hi = np.asarray(self.box.hi)
        nodes = rng.uniform(lo, hi, size=(self.n_samples, self.box.dimension))
        return np.array([fn(tuple(float(c) for c in row)) for row in nodes])

    def integrate(self, fn: Callable[[Point], float]) -> float:
        return float(self.box.volume * np.mean(self._values(fn)))

    def integrate_with_error(self, fn: Callable[[Point], float]) -> tuple[float, float]:
        """Estimate plus a 3-standard-error tolerance."""
        vals = self._values(fn)
        est = float(self.box.volume * np.mean(vals))
        if len(vals) < 2:
            return est, math.inf
        stderr = float(self.box.volume * np.std(vals, ddof=1) / math.sqrt(len(vals)))
        return est, 3.0 * stderr


Quadrature = GridQuadrature | MonteCarloQuadrature


def default_quadrature(psi: TestFunction) -> GridQuadrature:
    return GridQuadrature(psi.bounding_box(), DEFAULT_GRID_POINTS)


# ---------------------------------------------------------------------------
# Spatial difference operators
# ---------------------------------------------------------------------------


def death_gradient(F: Observable, gamma: FiniteConfiguration, x: Point) -> float:
    """F(gamma minus x) - F(gamma); x must be a point of gamma."""
    x = make_point(x)
    return F(gamma.without_point(x)) - F(gamma)


def birth_gradient(F: Observable, gamma: FiniteConfiguration, x: Point) -> float:
    """F(gamma plus x) - F(gamma); x must not be a point of gamma."""
    x = make_point(x)
    return F(gamma.with_point(x)) - F(gamma)


def directional_death(F: Observable, gamma: FiniteConfiguration, psi: TestFunction) -> float:
    """Sum over points of gamma of psi(x) times the death gradient at x."""
    base = F(gamma)
    return math.fsum(psi(x) * (F(gamma.without_point(x)) - base) for x in gamma)


def _nudge_off(x: Point, gamma: FiniteConfiguration) -> Point:
    # Quadrature node exactly on a configuration point: shift the first
    # coordinate by one ulp so gamma plus x stays a valid configuration.
    while x in gamma:
        x = (math.nextafter(x[0], math.inf),) + x[1:]
    return x


def directional_birth(
    F: Observable,
    gamma: FiniteConfiguration,
    psi: TestFunction,
    q: Quadrature | None = None,
) -> float:
    """Quadrature approximation of the psi-weighted birth gradient integral."""
    value, _ = directional_birth_with_error(F, gamma, psi, q)
    return value


def directional_birth_with_error(
    F: Observable,
    gamma: FiniteConfiguration,
    psi: TestFunction,
    q: Quadrature | None = None,
) -> tuple[float, float]:
    """Directional birth derivative with the quadrature's certified tolerance."""
    if q is None:
        q = default_quadrature(psi)
    base = F(gamma)

    def integrand(x: Point) -> float:
        x = _nudge_off(x, gamma)
        return psi(x) * (F(gamma.with_point(x)) - base)

    return q.integrate_with_error(integrand)


# ---------------------------------------------------------------------------
# Classical one-variable difference calculus
# ---------------------------------------------------------------------------


def classical_forward_diff(f: Callable[[float], float], t: float) -> float:
    return f(t + 1.0) - f(t)


def classical_backward_diff(f: Callable[[float], float], t: float) -> float:
    return f(t - 1.0) - f(t)


def falling_factorial_poly(t: float, n: int) -> float:
    """t (t-1) ... (t-n+1), with the empty product 1 for n = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return math.prod(t - j for j in range(n))


def newton_poly(t: float, n: int) -> float:
    """Falling factorial divided by n!, the binomial-coefficient polynomial."""
    return falling_factorial_poly(t, n) / math.factorial(n)


def newton_series_coeffs(f: Callable[[float], float], m: int) -> list[float]:
    """Forward differences of f at 0, orders 0..m.

    These are the coefficients of the interpolation of f on the integer
    nodes 0..m in the newton_poly basis.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    row = [float(f(float(k))) for k in range(m + 1)]
    coeffs = [row[0]]
    for _ in range(m):
        row = [b - a for a, b in itertools.pairwise(row)]
        coeffs.append(row[0])
    return coeffs


def newton_series_eval(coeffs: Sequence[float], t: float) -> float:
    """Evaluate sum_n coeffs[n] * newton_poly(t, n) with compensated summation."""
    return math.fsum(a * newton_poly(t, n) for n, a in enumerate(coeffs))
