"""Adaptive Gauss-Legendre integration on (0, 1) with endpoint substitutions.

The integrands arising from coalescent rate computations are smooth in the
interior of (0, 1) but typically carry algebraic endpoint behaviour
``p**(a-1)`` at 0 and ``(1-p)**(b-1)`` at 1 with possibly fractional
exponents.  Integrable endpoint singularities (exponent in (0, 1)) are
removed by the power substitution ``p = t**m`` with integer ``m >= 1/a``,
after which panel-adaptive Gauss-Legendre converges geometrically.

Only the panel driver lives here; nodes come from
``numpy.polynomial.legendre.leggauss``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Low/high rule orders compared on each panel; their difference drives refinement.
_ORDER_LOW = 15
_ORDER_HIGH = 31
_MAX_DEPTH = 48
_MAX_PANELS = 4096

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-14

# Floor for the reflected distance-to-endpoint coordinate: below 2**-52 the
# expression 1 - q rounds to 1.0 and a right-singular integrand would be
# evaluated at its pole.  The clamp discards only O(eps**exponent) mass.
_REFLECT_MIN = 2.0 ** -52


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for adaptive integration.

    ``rel_tol`` is relative to the accumulated integral estimate,
    ``abs_tol`` is an absolute floor so that integrals that are genuinely
    zero do not trigger endless refinement.
    """

    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@lru_cache(maxsize=32)
def _rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_estimates(f, lo: float, hi: float) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    xl, wl = _rule(_ORDER_LOW)
    xh, wh = _rule(_ORDER_HIGH)
    coarse = half * float(np.dot(wl, f(mid + half * xl)))
    fine = half * float(np.dot(wh, f(mid + half * xh)))
    return coarse, fine


def adaptive_integrate(f, lo: float, hi: float,
                       config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Integrate a vectorized callable over [lo, hi] by adaptive bisection.

    ``f`` must accept a numpy array and return an array of the same shape.
    Panels where the order-15 and order-31 Gauss-Legendre estimates disagree
    by more than the width-prorated tolerance are split until they agree or
    the depth cap is hit.
    """
    if hi <= lo:
        return 0.0
    total_width = hi - lo
    # Rough global scale for the relative tolerance.
    _, rough = _panel_estimates(f, lo, hi)
    scale = abs(rough)

    result = 0.0
    npanels = 0
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        coarse, fine = _panel_estimates(f, a, b)
        err = abs(fine - coarse)
        budget = max(config.abs_tol, config.rel_tol * max(scale, abs(result))) \
            * (b - a) / total_width
        if err <= budget or depth >= _MAX_DEPTH or npanels >= _MAX_PANELS:
            result += fine
            npanels += 1
            scale = max(scale, abs(result))
        else:
            m = 0.5 * (a + b)
            stack.append((a, m, depth + 1))
            stack.append((m, b, depth + 1))
    return result


def power_substitution(f, exponent: float):
    """Map int_0^c f(p) dp with f ~ p**(exponent-1) to a bounded integrand.

    Returns (g, m) where int_0^c f(p) dp = int_0^(c**(1/m)) g(t) dt and g is
    bounded at 0 (g(t) = m t**(m-1) f(t**m) ~ t**(m*exponent - 1)).
    """
    if exponent >= 1.0:
        return f, 1
    m = max(2, math.ceil(1.0 / exponent))

    def g(t):
        tm = t ** m
        return m * t ** (m - 1) * f(tm)

    return g, m


def integrate_unit_interval(f, left_exponent: float = 1.0,
                            right_exponent: float = 1.0,
                            config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Integrate f over (0, 1) given its algebraic endpoint exponents.

    ``left_exponent`` a means f(p) = O(p**(a-1)) as p -> 0; ``right_exponent``
    b means f(p) = O((1-p)**(b-1)) as p -> 1.  Both must be positive
    (integrability).  The interval is split at 1/2 and each half substituted
    so the transformed integrand is bounded.
    """
    if left_exponent <= 0 or right_exponent <= 0:
        raise ValueError("endpoint exponents must be positive for integrability")
    gl, ml = power_substitution(f, left_exponent)
    left = adaptive_integrate(gl, 0.0, 0.5 ** (1.0 / ml), config)

    def reflected(q):
        return f(1.0 - np.maximum(q, _REFLECT_MIN))

    gr, mr = power_substitution(reflected, right_exponent)
    right = adaptive_integrate(gr, 0.0, 0.5 ** (1.0 / mr), config)
    return left + right


def integrate_tail(f, lo: float, hi: float = 1.0,
                   right_exponent: float = 1.0,
                   config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Integrate f over (lo, hi) in log space, for integrands peaked near lo.

    Used for tail moments like int_u^1 p**(a-3) dp where the mass sits at the
    lower endpoint over several decades.  Substituting p = exp(v) equalizes
    the decades; the right endpoint keeps its algebraic substitution.
    """
    if lo <= 0:
        raise ValueError("integrate_tail requires lo > 0")
    if hi <= lo:
        return 0.0
    split = min(hi, 0.5)
    result = 0.0
    if lo < split:
        def g(v):
            p = np.exp(v)
            return p * f(p)

        result += adaptive_integrate(g, math.log(lo), math.log(split), config)
    if split < hi:
        def reflected(q):
            return f(hi - np.maximum(q, _REFLECT_MIN))

        gr, mr = power_substitution(reflected, right_exponent)
        result += adaptive_integrate(gr, 0.0, (hi - split) ** (1.0 / mr), config)
    return result
