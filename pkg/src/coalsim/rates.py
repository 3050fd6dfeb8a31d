"""Merger rates, the block-count decay rate, and derived scaling sequences.

For b current blocks, k of them merge at rate

    lam(b, k) = int p**(k-2) (1-p)**(b-k) L(dp),

where the p = 0 atom contributes only to k = 2.  The total jump rate is
lam(b) = sum_k C(b,k) lam(b,k) and the decay rate of the block count,
extended to real arguments x >= 1, is

    mu(x) = int (x p - 1 + (1-p)**x) / p**2 L(dp),

with integrand x(x-1)/2 at p = 0.  mu is increasing and convex with
mu(1) = 0, which makes the scale sequence s(n) solving mu(s) = mu(n)/n
well defined for any nontrivial measure.

Everything here has two evaluation paths: exact expressions for recognized
components (point masses, power-beta densities, the uniform density via
digamma) and kernel quadrature for the rest.  Construct with
``use_closed_forms=False`` to force quadrature; the test suite compares the
two against each other and against direct sums over k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .measure import CustomDensity, LambdaMeasure, PowerBetaDensity
from .quadrature import (DEFAULT_CONFIG, QuadratureConfig, adaptive_integrate,
                         power_substitution, integrate_tail,
                         integrate_unit_interval)

EULER_GAMMA = float(np.euler_gamma)

# Below p0 = _SERIES_CROSSOVER * min(1, 1/x) the kernels are evaluated by
# 4-term series; direct evaluation there loses digits to cancellation.
_SERIES_CROSSOVER = 1e-3


# ---------------------------------------------------------------------------
# kernels: stable pointwise evaluation of the 1/p**2 integrands

def _mu_kernel(p, x: float):
    """(x p - 1 + (1-p)**x) / p**2, series-stabilized near p = 0."""
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    p0 = _SERIES_CROSSOVER * min(1.0, 1.0 / max(x, 1.0))
    small = p < p0
    ps = p[small]
    t2 = x * (x - 1.0) / 2.0
    t3 = t2 * (x - 2.0) / 3.0
    t4 = t3 * (x - 3.0) / 4.0
    t5 = t4 * (x - 4.0) / 5.0
    out[small] = t2 - ps * (t3 - ps * (t4 - ps * t5))
    pl = p[~small]
    out[~small] = (x * pl - 1.0 + np.exp(x * np.log1p(-pl))) / pl ** 2
    return out


def _mu1_kernel(p, x: float):
    """((1-p)**x log(1-p) + p) / p**2, series-stabilized near p = 0."""
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    p0 = _SERIES_CROSSOVER * min(1.0, 1.0 / max(x, 1.0))
    small = p < p0
    ps = p[small]
    c0 = x - 0.5
    c1 = (3.0 * x * x - 6.0 * x + 2.0) / 6.0
    c2 = (2.0 * x - 3.0) * (x * x - 3.0 * x + 1.0) / 12.0
    c3 = (5.0 * x ** 4 - 40.0 * x ** 3 + 105.0 * x * x - 100.0 * x + 24.0) / 120.0
    out[small] = c0 - ps * (c1 - ps * (c2 - ps * c3))
    pl = p[~small]
    w = np.log1p(-pl)
    out[~small] = (np.exp(x * w) * w + pl) / pl ** 2
    return out


def _mu2_kernel(p, x: float):
    """(1-p)**x log(1-p)**2 / p**2; no cancellation, defined as 1 at p = 0."""
    p = np.asarray(p, dtype=float)
    w = np.log1p(-p)
    ratio = np.where(p > 0, np.divide(w, p, out=np.full_like(p, -1.0),
                                      where=p > 0), -1.0)
    return np.exp(x * w) * ratio ** 2


def _event_kernel(p, b: float):
    """P(Binomial(b, p) >= 2) / p**2 = sum_k C(b,k) p**(k-2) (1-p)**(b-k).

    Series coefficients are (i-1) C(b,i); direct evaluation goes through
    -expm1((b-1) log1p(-p) + log1p((b-1) p)).
    """
    p = np.asarray(p, dtype=float)
    out = np.empty_like(p)
    p0 = _SERIES_CROSSOVER / max(b, 1.0)
    small = p < p0
    ps = p[small]
    t2 = b * (b - 1.0) / 2.0
    t3 = 2.0 * (b * (b - 1.0) * (b - 2.0) / 6.0)
    t4 = 3.0 * (b * (b - 1.0) * (b - 2.0) * (b - 3.0) / 24.0)
    t5 = 4.0 * (b * (b - 1.0) * (b - 2.0) * (b - 3.0) * (b - 4.0) / 120.0)
    out[small] = t2 - ps * (t3 - ps * (t4 - ps * t5))
    pl = p[~small]
    z = (b - 1.0) * np.log1p(-pl) + np.log1p((b - 1.0) * pl)
    out[~small] = -np.expm1(z) / pl ** 2
    return out


def _beta_continued(u, v):
    """Beta(u, v) by analytic continuation (gammasgn/gammaln), vectorized."""
    sign = special.gammasgn(u) * special.gammasgn(v) * special.gammasgn(u + v)
    return sign * np.exp(special.gammaln(u) + special.gammaln(v)
                         - special.gammaln(u + v))


def _log_binom(b, k):
    return (special.gammaln(b + 1.0) - special.gammaln(k + 1.0)
            - special.gammaln(b - k + 1.0))


@dataclass(frozen=True)
class DustDiagnostic:
    """Outcome of the dust test int L(dp)/p = infinity (dustless) or not."""

    verdict: str          # "dustless" | "dusty" | "inconclusive"
    rule: str             # which rule fired, for reporting

    def __str__(self) -> str:
        return self.verdict


class RateFunctions:
    """All rate-level quantities for one measure, with per-measure caches."""

    def __init__(self, measure: LambdaMeasure,
                 config: QuadratureConfig = DEFAULT_CONFIG,
                 use_closed_forms: bool = True):
        if measure.is_trivial:
            raise ValueError("rates need a nonzero measure")
        self.measure = measure
        self.config = config
        self.use_closed_forms = use_closed_forms
        self._weights = lru_cache(maxsize=512)(self._weights_uncached)
        self._custom_rate = lru_cache(maxsize=4096)(self._custom_rate_uncached)
        self._mu_interp = None

    # -- component views ----------------------------------------------------

    def _density_parts(self):
        return self.measure.densities

    def _closed_powerbeta(self, dens) -> bool:
        return self.use_closed_forms and isinstance(dens, PowerBetaDensity)

    # -- merger rates -------------------------------------------------------

    def merger_rate(self, b: int, k: int) -> float:
        """lam(b, k): rate at which a given k-set of the b blocks merges."""
        if not (isinstance(b, (int, np.integer)) and isinstance(k, (int, np.integer))):
            raise ValueError("merger_rate takes integer block counts")
        if not 2 <= k <= b:
            raise ValueError(f"need 2 <= k <= b, got k={k}, b={b}")
        total = 0.0
        if k == 2:
            total += self.measure.atom_at_zero
        for p, m in self.measure.atoms:
            total += m * math.exp((k - 2) * math.log(p)
                                  + (b - k) * math.log1p(-p))
        for dens in self._density_parts():
            if self._closed_powerbeta(dens):
                total += dens.c * math.exp(
                    special.betaln(dens.a + k - 2, dens.b + b - k))
            else:
                le = dens.left_exponent + k - 2
                re = dens.right_exponent + b - k

                def f(p, dens=dens):
                    return p ** (k - 2) * (1.0 - p) ** (b - k) * dens(p)

                total += integrate_unit_interval(f, le, re, self.config)
        return total

    def _custom_rate_uncached(self, which: str, b: float) -> float:
        """Quadrature values that only depend on (kernel, b); memoized."""
        total = 0.0
        for dens in self._density_parts():
            if which == "event":
                def f(p, dens=dens):
                    return _event_kernel(p, b) * dens(p)
            else:
                raise AssertionError(which)
            total += integrate_unit_interval(f, dens.left_exponent,
                                             dens.right_exponent, self.config)
        return total

    def total_jump_rate(self, b) -> float:
        """lam(b) = sum_k C(b,k) lam(b,k); vectorized over integer arrays."""
        arr = np.atleast_1d(np.asarray(b, dtype=float))
        if np.any(arr < 2) or np.any(arr != np.floor(arr)):
            raise ValueError("total_jump_rate needs integer b >= 2")
        out = np.zeros_like(arr)
        if self.measure.atom_at_zero:
            out += self.measure.atom_at_zero * arr * (arr - 1.0) / 2.0
        for p, m in self.measure.atoms:
            z = (arr - 1.0) * math.log1p(-p) + np.log1p((arr - 1.0) * p)
            out += -np.expm1(z) * (m / p ** 2)
        for dens in self._density_parts():
            if self._closed_powerbeta(dens):
                out += self._powerbeta_total_rate(dens, arr)
            else:
                out += np.array([self._custom_rate("event", bi) for bi in arr])
        return float(out[0]) if np.isscalar(b) or np.ndim(b) == 0 else out

    def _powerbeta_total_rate(self, dens: PowerBetaDensity, arr: np.ndarray):
        c, a, bp = dens.c, dens.a, dens.b
        if a == 1.0 and bp == 1.0:
            return c * (arr - 1.0)
        if a not in (1.0, 2.0):
            return c * (_beta_continued(a - 2.0, bp)
                        - _beta_continued(a - 2.0, bp + arr)
                        - arr * _beta_continued(a - 1.0, bp + arr - 1.0))
        # a in {1, 2} with bp != 1: continuation hits a gamma pole; sum the
        # closed per-k terms instead (O(b), exact).
        out = np.empty_like(arr)
        for i, bi in enumerate(arr):
            ks = np.arange(2.0, bi + 1.0)
            logw = (_log_binom(bi, ks) + special.gammaln(a + ks - 2.0)
                    + special.gammaln(bp + bi - ks)
                    - special.gammaln(a + bp + bi - 2.0))
            out[i] = c * np.exp(logw).sum()
        return out

    def merger_size_weights(self, b: int) -> np.ndarray:
        """Unnormalized P(K = k) weights C(b,k) lam(b,k) for k = 2..b."""
        if b < 2:
            raise ValueError("need b >= 2")
        return self._weights(int(b))

    def _weights_uncached(self, b: int) -> np.ndarray:
        ks = np.arange(2.0, b + 1.0)
        w = np.zeros(b - 1)
        logc = _log_binom(float(b), ks)
        if self.measure.atom_at_zero:
            w[0] += self.measure.atom_at_zero * b * (b - 1.0) / 2.0
        for p, m in self.measure.atoms:
            w += m * np.exp(logc + (ks - 2.0) * math.log(p)
                            + (b - ks) * math.log1p(-p))
        for dens in self._density_parts():
            if self._closed_powerbeta(dens):
                w += dens.c * np.exp(
                    logc + special.gammaln(dens.a + ks - 2.0)
                    + special.gammaln(dens.b + b - ks)
                    - special.gammaln(dens.a + dens.b + b - 2.0))
            else:
                w += np.array([
                    math.exp(_log_binom(float(b), float(k)))
                    * self.merger_rate(b, int(k)) for k in range(2, b + 1)])
        w.setflags(write=False)
        return w

    def merger_size_distribution(self, b: int) -> np.ndarray:
        """P(K = k), k = 2..b: merger size of the next jump from b blocks."""
        w = self.merger_size_weights(b)
        return w / w.sum()

    def mean_decrement(self, b: int) -> float:
        """Expected drop of the block count per jump, mu(b)/lam(b)."""
        return self.rate_of_decrease(float(b)) / self.total_jump_rate(b)

    # -- mu and friends -----------------------------------------------------

    def rate_of_decrease(self, x) -> float:
        """mu(x) for real x >= 1 (scalar or array)."""
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(arr < 1.0):
            raise ValueError("mu is defined for x >= 1")
        out = self._mu_parts(arr, order=0)
        return float(out[0]) if np.ndim(x) == 0 else out

    def mu_derivatives(self, x: float) -> tuple[float, float, float]:
        """(mu(x), mu'(x), mu''(x)) at scalar x >= 1."""
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(arr < 1.0):
            raise ValueError("mu is defined for x >= 1")
        return tuple(float(self._mu_parts(arr, order=r)[0]) for r in (0, 1, 2))

    def _mu_parts(self, arr: np.ndarray, order: int) -> np.ndarray:
        out = np.zeros_like(arr)
        a0 = self.measure.atom_at_zero
        if a0:
            if order == 0:
                out += a0 * arr * (arr - 1.0) / 2.0
            elif order == 1:
                out += a0 * (arr - 0.5)
            else:
                out += a0
        kernel = (_mu_kernel, _mu1_kernel, _mu2_kernel)[order]
        for p, m in self.measure.atoms:
            out += m * np.array([float(kernel(np.array([p]), xi)[0])
                                 for xi in arr])
        for dens in self._density_parts():
            if self._closed_powerbeta(dens) and self._has_mu_closed_form(dens):
                out += self._powerbeta_mu(dens, arr, order)
            else:
                out += np.array([self._mu_quad(dens, xi, order) for xi in arr])
        return out

    @staticmethod
    def _has_mu_closed_form(dens: PowerBetaDensity) -> bool:
        return (dens.a == 1.0 and dens.b == 1.0) or dens.a not in (1.0, 2.0)

    def _powerbeta_mu(self, dens: PowerBetaDensity, arr: np.ndarray,
                      order: int) -> np.ndarray:
        c, a, bp = dens.c, dens.a, dens.b
        if a == 1.0 and bp == 1.0:
            # uniform density: mu(x) = x (psi(x+1) + gamma - 1)
            if order == 0:
                return c * arr * (special.digamma(arr + 1.0) + EULER_GAMMA - 1.0)
            if order == 1:
                return c * (special.digamma(arr + 1.0) + EULER_GAMMA - 1.0
                            + arr * special.polygamma(1, arr + 1.0))
            return c * (2.0 * special.polygamma(1, arr + 1.0)
                        + arr * special.polygamma(2, arr + 1.0))
        # mu(x) = c [x B(a-1,bp) - B(a-2,bp) + B(a-2,bp+x)], continued Betas
        tail = _beta_continued(a - 2.0, bp + arr)
        if order == 0:
            return c * (arr * _beta_continued(a - 1.0, bp)
                        - _beta_continued(a - 2.0, bp) + tail)
        d = special.digamma(bp + arr) - special.digamma(a - 2.0 + bp + arr)
        if order == 1:
            return c * (_beta_continued(a - 1.0, bp) + tail * d)
        dp = (special.polygamma(1, bp + arr)
              - special.polygamma(1, a - 2.0 + bp + arr))
        return c * tail * (d * d + dp)

    def _mu_quad(self, dens, x: float, order: int) -> float:
        kernel = (_mu_kernel, _mu1_kernel, _mu2_kernel)[order]

        def f(p):
            return kernel(p, x) * dens(p)

        return integrate_unit_interval(f, dens.left_exponent,
                                       dens.right_exponent, self.config)

    def kappa(self, x):
        """mu(x)/x, the per-block decay rate."""
        return self.rate_of_decrease(x) / x

    def invert_mu(self, y: float) -> float:
        """The x >= 1 with mu(x) = y, to |mu(x) - y| <= 1e-9 max(1, y)."""
        if y < 0:
            raise ValueError("mu is nonnegative")
        if y == 0:
            return 1.0
        hi = 2.0
        for _ in range(200):
            if self.rate_of_decrease(hi) >= y:
                break
            hi *= 2.0
        else:
            raise ValueError(f"mu never reaches {y}")
        x = brentq(lambda t: self.rate_of_decrease(t) - y, 1.0, hi,
                   rtol=8.9e-16, maxiter=200)
        # Newton polish; brentq already lands within a few ulp.
        for _ in range(3):
            err = self.rate_of_decrease(x) - y
            if abs(err) <= 1e-10 * max(1.0, y):
                break
            slope = self._mu_parts(np.array([x]), order=1)[0]
            if slope <= 0:
                break
            x = min(max(x - err / slope, 1.0), hi)
        if abs(self.rate_of_decrease(x) - y) > 1e-9 * max(1.0, y):
            raise ArithmeticError("mu inversion did not converge")
        return float(x)

    def s_at(self, n) -> float:
        """Scale s with mu(s) = mu(n)/n; s(n) ~ n**((alpha-1)/alpha)."""
        arr = np.atleast_1d(np.asarray(n, dtype=float))
        if np.any(arr <= 1.0):
            raise ValueError("s(n) needs n > 1")
        out = np.array([self.invert_mu(self.rate_of_decrease(v) / v)
                        for v in arr])
        return float(out[0]) if np.ndim(n) == 0 else out

    # -- H transform --------------------------------------------------------

    def _density_partial_mass(self, dens, u: float) -> float:
        if u <= 0:
            return 0.0
        if isinstance(dens, PowerBetaDensity):
            if u >= 1.0:
                return dens.mass()
            return dens.c * special.beta(dens.a, dens.b) * special.betainc(
                dens.a, dens.b, u)
        if u >= 1.0:
            return dens.mass()
        g, m = power_substitution(dens, dens.left_exponent)
        return adaptive_integrate(g, 0.0, u ** (1.0 / m), self.config)

    def _density_tail_moment(self, dens, u: float, power: int) -> float:
        """int_(u,1] p**(-power) against the density component."""
        if u >= 1.0:
            return 0.0
        if isinstance(dens, PowerBetaDensity) and dens.b == 1.0:
            a, c = dens.a, dens.c
            e = a - power
            if e == 0.0:
                return -c * math.log(u)
            return c * (1.0 - u ** e) / e
        def f(p, dens=dens):
            return dens(p) / p ** power

        return integrate_tail(f, u, 1.0, dens.right_exponent, self.config)

    def h_function(self, z: float) -> float:
        """h(z) = int_(z,1] (p - z) L(dp) / p**2, the inner H integrand."""
        if not 0.0 <= z <= 1.0:
            raise ValueError("h is defined on [0, 1]")
        total = 0.0
        for p, m in self.measure.atoms:
            if p > z:
                total += m * (p - z) / p ** 2
        for dens in self._density_parts():
            total += (self._density_tail_moment(dens, z, 1)
                      - z * self._density_tail_moment(dens, z, 2))
        return total

    def H_function(self, u: float) -> float:
        """H(u) = L({0})/2 + int_0^u h(z) dz, by exact reduction to
        L([0,u])/2 + u int_(u,1] L(dp)/p - u**2/2 int_(u,1] L(dp)/p**2."""
        if not 0.0 <= u <= 1.0:
            raise ValueError("H is defined on [0, 1]")
        total = self.measure.atom_at_zero / 2.0
        for p, m in self.measure.atoms:
            if p <= u:
                total += m / 2.0
            else:
                total += m * (u / p - u * u / (2.0 * p * p))
        for dens in self._density_parts():
            total += self._density_partial_mass(dens, u) / 2.0
            if u > 0.0:
                total += u * self._density_tail_moment(dens, u, 1)
                total -= 0.5 * u * u * self._density_tail_moment(dens, u, 2)
        return total

    # -- diagnostics --------------------------------------------------------

    def dust_diagnostic(self) -> DustDiagnostic:
        """Does int L(dp)/p diverge (dustless regime of the limit theorems)?"""
        if self.measure.atom_at_zero > 0:
            return DustDiagnostic("dustless", "atom at zero")
        power_beta = [d for d in self._density_parts()
                      if isinstance(d, PowerBetaDensity)]
        custom = [d for d in self._density_parts()
                  if isinstance(d, CustomDensity)]
        if any(d.a <= 1.0 for d in power_beta):
            return DustDiagnostic("dustless",
                                  "power-beta left exponent a <= 1")
        if not custom:
            if power_beta:
                return DustDiagnostic("dusty",
                                      "all power-beta left exponents a > 1")
            return DustDiagnostic("dusty", "finitely many interior atoms")
        if all(d.left_exponent > 1.0 for d in custom):
            # declared O(p**(le-1)) bound with le > 1 makes int 1/p finite
            return DustDiagnostic("dusty",
                                  "declared left exponents all > 1")
        # Declared exponents only bound from above; fall back to the trend of
        # mu(n)/n over four decades.
        lo, hi = 1e2, 1e6
        ratio = (self.rate_of_decrease(hi) / hi) / (self.rate_of_decrease(lo) / lo)
        if ratio > 5.0:
            return DustDiagnostic("dustless",
                                  f"mu(n)/n grew by {ratio:.3g} over [1e2, 1e6]")
        if ratio < 1.5:
            return DustDiagnostic("dusty",
                                  f"mu(n)/n flat (factor {ratio:.3g}) over [1e2, 1e6]")
        return DustDiagnostic("inconclusive",
                              f"mu(n)/n trend factor {ratio:.3g} in [1.5, 5]")

    def rv_exponent_estimate(self, grid=None) -> float:
        """Least-squares slope of log mu over a log-spaced grid.

        Estimates the regular-variation index alpha of mu; default grid is
        25 points on [1e3, 1e6].  Slowly varying factors (e.g. the uniform
        measure's log) bias the fit, which is why this is an estimate and
        the dust diagnostic is a separate rule-based check.
        """
        if grid is None:
            grid = np.geomspace(1e3, 1e6, 25)
        grid = np.asarray(grid, dtype=float)
        mu = self.rate_of_decrease(grid)
        slope, _ = np.polyfit(np.log(grid), np.log(mu), 1)
        return float(slope)

    def mu_interpolator(self, lo: float = 1.5, hi: float = 1e6):
        """Monotone cubic interpolant of mu on a 64-points-per-decade log
        grid.  Plotting convenience only; every quantitative path calls the
        exact evaluators."""
        if self._mu_interp is None:
            decades = math.log10(hi / lo)
            grid = np.geomspace(lo, hi, max(2, int(64 * decades) + 1))
            self._mu_interp = PchipInterpolator(
                np.log(grid), np.log(self.rate_of_decrease(grid)))
        interp = self._mu_interp

        def mu_approx(x):
            return np.exp(interp(np.log(np.asarray(x, dtype=float))))

        return mu_approx


# ---------------------------------------------------------------------------
# measure-free sequences

def t_sequence(n) -> float:
    """loglog n - logloglog n + logloglog n / loglog n, clamped to 0.

    The clamp covers both undefined iterated logs (n <= e) and small n where
    the expression dips below 0.
    """
    arr = np.atleast_1d(np.asarray(n, dtype=float))
    out = np.zeros_like(arr)
    for i, v in enumerate(arr):
        if v <= 1.0:
            raise ValueError("t(n) needs n > 1")
        ll = math.log(math.log(v)) if math.log(v) > 0 else float("-inf")
        if ll <= 0.0:
            continue
        lll = math.log(ll)
        out[i] = max(0.0, ll - lll + lll / ll)
    return float(out[0]) if np.ndim(n) == 0 else out


def t_c_sequence(n, c: float) -> float:
    """t(n) - log(c)/loglog n, clamped to 0; the N(t) observation times."""
    if c <= 0:
        raise ValueError("c must be positive")
    arr = np.atleast_1d(np.asarray(n, dtype=float))
    out = np.zeros_like(arr)
    base = np.atleast_1d(t_sequence(arr))
    for i, v in enumerate(arr):
        ll = math.log(math.log(v)) if math.log(v) > 0 else 0.0
        if ll <= 0.0:
            continue
        out[i] = max(0.0, base[i] - math.log(c) / ll)
    return float(out[0]) if np.ndim(n) == 0 else out


# ---------------------------------------------------------------------------
# functional front door, memoized per measure

@lru_cache(maxsize=64)
def rates_for(measure: LambdaMeasure,
              use_closed_forms: bool = True) -> RateFunctions:
    return RateFunctions(measure, use_closed_forms=use_closed_forms)


def merger_rate(measure: LambdaMeasure, b: int, k: int) -> float:
    return rates_for(measure).merger_rate(b, k)


def total_jump_rate(measure: LambdaMeasure, b) -> float:
    return rates_for(measure).total_jump_rate(b)


def merger_size_distribution(measure: LambdaMeasure, b: int) -> np.ndarray:
    return rates_for(measure).merger_size_distribution(b)


def rate_of_decrease(measure: LambdaMeasure, x) -> float:
    return rates_for(measure).rate_of_decrease(x)


def mu_derivatives(measure: LambdaMeasure, x: float):
    return rates_for(measure).mu_derivatives(x)


def invert_mu(measure: LambdaMeasure, y: float) -> float:
    return rates_for(measure).invert_mu(y)


def s_sequence(measure: LambdaMeasure, n):
    return rates_for(measure).s_at(n)


def H_function(measure: LambdaMeasure, u: float) -> float:
    return rates_for(measure).H_function(u)


def h_function(measure: LambdaMeasure, z: float) -> float:
    return rates_for(measure).h_function(z)


def dust_diagnostic(measure: LambdaMeasure) -> DustDiagnostic:
    return rates_for(measure).dust_diagnostic()


def rv_exponent_estimate(measure: LambdaMeasure, grid=None) -> float:
    return rates_for(measure).rv_exponent_estimate(grid)
