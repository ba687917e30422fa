"""Falling-factorial pairings and the multiplicative generating functional.

Pairing convention, fixed once for the whole package: the factorial
pairing of a symmetric kernel f of order n with a configuration gamma is
the sum of f over all ORDERED n-tuples of DISTINCT points of gamma.  For
symmetric f this equals n! times the sum of f over n-subsets, which is
how it is computed here.  The tensor pairing (module ``stirling``) sums
over ordered tuples with repetition instead.  With this convention the
generating functional's series carries plain 1/n! coefficients.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Sequence

from .core import (
    DiscreteMeasure,
    DomainError,
    FiniteConfiguration,
    Point,
    SymmetricKernel,
    TensorPower,
    TestFunction,
    eval_kernel,
    union_disjoint,
)


def _pair_factorial_callable(points: Sequence[Point], n: int, fn: Callable[[tuple[Point, ...]], float]) -> float:
    """Factorial pairing of a symmetric callable with a point tuple.

    ``fn`` must be symmetric in its n arguments; it is evaluated once per
    n-subset (points in canonical order) and scaled by n!.
    """
    if n == 0:
        return float(fn(()))
    if n > len(points):
        return 0.0
    subset_sum = math.fsum(fn(combo) for combo in itertools.combinations(points, n))
    return float(math.factorial(n)) * subset_sum


def pair_factorial(gamma: FiniteConfiguration, f: SymmetricKernel) -> float:
    """Sum of ``f`` over ordered tuples of distinct points of ``gamma``.

    Returns 0 when the kernel order exceeds the number of points, and the
    kernel's scalar value for order 0.
    """
    return _pair_factorial_callable(gamma.points, f.order, lambda xs: eval_kernel(f, xs))


def pair_factorial_measure(omega: DiscreteMeasure, f: SymmetricKernel) -> float:
    """Factorial pairing against a weighted discrete measure.

    Sums ``f`` over ordered atom-index tuples (repetition allowed), each
    weighted by the product of sequentially depleted weights: the j-th
    pick of atom i contributes ``weight_i - (previous picks of i)``.
    Branches whose partial weight product hits exactly zero are pruned,
    so unit-weight measures cost the same as distinct-point enumeration
    and the result then coincides with :func:`pair_factorial`.
    """
    n = f.order
    if n == 0:
        return eval_kernel(f, ())
    atoms = omega.atoms
    terms: list[float] = []
    counts = [0] * len(atoms)
    chosen: list[Point] = []

    def descend(depth: int, weight: float) -> None:
        if depth == n:
            terms.append(weight * eval_kernel(f, tuple(chosen)))
            return
        for i, (loc, w) in enumerate(atoms):
            factor = w - counts[i]
            if factor == 0.0:
                continue
            counts[i] += 1
            chosen.append(loc)
            descend(depth + 1, weight * factor)
            chosen.pop()
            counts[i] -= 1

    descend(0, 1.0)
    return math.fsum(terms)


def generating_functional(gamma: FiniteConfiguration, phi: TestFunction) -> float:
    """Product of ``1 + phi(x)`` over the points of ``gamma``.

    Equals the factorial-pairing series sum_n (1/n!) <phi^(x)n, (gamma)_n>,
    which terminates at n = |gamma|.  Raises DomainError if some factor
    is not positive.
    """
    result = 1.0
    for x in gamma:
        factor = 1.0 + phi(x)
        if factor <= 0.0:
            raise DomainError(f"1 + phi({x}) = {factor} is not positive")
        result *= factor
    return result


def check_chu_vandermonde(
    g1: FiniteConfiguration,
    g2: FiniteConfiguration,
    n: int,
    phi: TestFunction,
) -> tuple[float, float]:
    """Both sides of the binomial splitting identity for a disjoint union.

    lhs pairs ``phi^(x)n`` with the union; rhs is the binomial sum over
    splits of the order between the two parts.  The caller asserts that
    the two agree.
    """
    lhs = pair_factorial(union_disjoint(g1, g2), TensorPower(phi, n))
    rhs = math.fsum(
        math.comb(n, k)
        * pair_factorial(g1, TensorPower(phi, k))
        * pair_factorial(g2, TensorPower(phi, n - k))
        for k in range(n + 1)
    )
    return lhs, rhs


def newton_binomial(gamma_or_omega, n: int, f: SymmetricKernel) -> float:
    """Factorial pairing divided by n!, the binomial-coefficient analogue."""
    if n != f.order:
        raise ValueError(f"n = {n} does not match kernel order {f.order}")
    if isinstance(gamma_or_omega, FiniteConfiguration):
        paired = pair_factorial(gamma_or_omega, f)
    elif isinstance(gamma_or_omega, DiscreteMeasure):
        paired = pair_factorial_measure(gamma_or_omega, f)
    else:
        raise TypeError("expected a FiniteConfiguration or DiscreteMeasure")
    return paired / math.factorial(n)
