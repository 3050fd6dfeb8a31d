"""Closed-form limit laws for external branch lengths.

Covers the scaled typical-length family indexed by the regular-variation
exponent alpha in [1, 2] (alpha = 1 degenerates to the standard
exponential), the Frechet law and Poisson tail intensity of the scaled
maximum for alpha > 1, the finite-sample and limiting joint densities of
the top order statistics, the logistic law of the centered maximum in the
alpha = 1 regime together with an exact sampler of its Cox-process
construction, and the exact ascending factorial moments of the block count
under the uniform measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .quadrature import DEFAULT_CONFIG, adaptive_integrate
from .sim import DEFAULT_SEED, _make_rng

FAMILIES = ("typical", "frechet", "poisson_tail", "logistic",
            "gumbel_shifted", "exact_bs_moment")


def _check_alpha(alpha: float, low_open: bool = False) -> float:
    alpha = float(alpha)
    lo_ok = alpha > 1.0 if low_open else alpha >= 1.0
    if not (lo_ok and alpha <= 2.0):
        bracket = "(1, 2]" if low_open else "[1, 2]"
        raise ValueError(f"alpha must lie in {bracket}, got {alpha}")
    return alpha


def _nonnegative(t, name: str = "t") -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError(f"{name} must be nonnegative")
    return t


def _scalar_or_array(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


# ---------------------------------------------------------------------------
# typical external length

def typical_density(alpha: float, t) -> float | np.ndarray:
    """Density alpha (1+(alpha-1)t)^(-1-alpha/(alpha-1)); e^-t at alpha=1.

    The alpha = 1 case is its own branch: the exponent alpha/(alpha-1)
    diverges there and the exponential law is the honest limit.
    """
    alpha = _check_alpha(alpha)
    t = _nonnegative(t)
    scalar = t.ndim == 0
    if alpha == 1.0:
        return _scalar_or_array(np.exp(-t), scalar)
    expo = 1.0 + alpha / (alpha - 1.0)
    return _scalar_or_array(alpha * (1.0 + (alpha - 1.0) * t) ** -expo, scalar)


def typical_cdf(alpha: float, t) -> float | np.ndarray:
    """F(t) = 1 - (1+(alpha-1)t)^(-alpha/(alpha-1)); 1 - e^-t at alpha=1."""
    alpha = _check_alpha(alpha)
    t = _nonnegative(t)
    scalar = t.ndim == 0
    if alpha == 1.0:
        return _scalar_or_array(-np.expm1(-t), scalar)
    expo = alpha / (alpha - 1.0)
    return _scalar_or_array(1.0 - (1.0 + (alpha - 1.0) * t) ** -expo, scalar)


# ---------------------------------------------------------------------------
# maximum for alpha > 1: Frechet law and Poisson tail intensity

def poisson_intensity_tail(alpha: float, x) -> float | np.ndarray:
    """Mean number of limit points above x: ((alpha-1)x)^(-alpha/(alpha-1))."""
    alpha = _check_alpha(alpha, low_open=True)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    scalar = x.ndim == 0
    expo = alpha / (alpha - 1.0)
    return _scalar_or_array(((alpha - 1.0) * x) ** -expo, scalar)


def frechet_cdf(alpha: float, x) -> float | np.ndarray:
    """The void probability of the tail Poisson count above x."""
    alpha = _check_alpha(alpha, low_open=True)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    scalar = x.ndim == 0
    return _scalar_or_array(np.exp(-poisson_intensity_tail(alpha, x)), scalar)


# ---------------------------------------------------------------------------
# joint densities of the top order statistics

def _check_ordered(u, ell: int, nonneg: bool) -> np.ndarray:
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (ell,):
        raise ValueError(f"u must hold exactly {ell} values")
    if np.any(np.diff(u) > 0):
        raise ValueError("u must be sorted in decreasing order")
    if nonneg and np.any(u < 0):
        raise ValueError("u must be nonnegative")
    return u


def order_stat_density(alpha: float, y: int, ell: int, u,
                       shifted: bool = False) -> float:
    """Joint density at u (decreasing) of the ell largest among y draws
    from the typical law; with shifted=True, its y -> infinity limit after
    the appropriate power rescaling (needs alpha > 1)."""
    if ell < 1 or (not shifted and ell > y):
        raise ValueError("need 1 <= ell <= y")
    u = _check_ordered(u, ell, nonneg=not shifted)
    if shifted:
        alpha = _check_alpha(alpha, low_open=True)
        if u[-1] <= 0:
            return 0.0
        inv_beta = alpha / (alpha - 1.0)
        tail = ((alpha - 1.0) * u[-1]) ** -inv_beta
        dens = math.exp(-tail)
        for ui in u:
            dens *= alpha * ((alpha - 1.0) * ui) ** (-1.0 - inv_beta)
        return dens
    alpha = _check_alpha(alpha)
    # ell! C(y, ell) = y!/(y-ell)!
    dens = math.exp(special.gammaln(y + 1) - special.gammaln(y - ell + 1))
    dens *= typical_cdf(alpha, u[-1]) ** (y - ell)
    for ui in u:
        dens *= typical_density(alpha, ui)
    return float(dens)


def bs_order_stat_density(y: int, ell: int, u) -> float:
    """Exact joint density of the ell largest of y i.i.d. standard
    exponentials, evaluated at decreasing u >= 0."""
    if not 1 <= ell <= y:
        raise ValueError("need 1 <= ell <= y")
    u = _check_ordered(u, ell, nonneg=True)
    dens = math.exp(special.gammaln(y + 1) - special.gammaln(y - ell + 1))
    dens *= (-math.expm1(-u[-1])) ** (y - ell)
    return float(dens * np.exp(-u).prod())


def bs_limit_density(ell: int, u) -> float:
    """Shifted limit: density of the ell top points of a Poisson process
    with intensity e^-x dx, at decreasing real u."""
    if ell < 1:
        raise ValueError("ell must be positive")
    u = _check_ordered(u, ell, nonneg=False)
    return float(math.exp(-math.exp(-u[-1])) * np.exp(-u).prod())


# ---------------------------------------------------------------------------
# alpha = 1 extremes: logistic law and the Cox construction

def logistic_cdf(x) -> float | np.ndarray:
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    return _scalar_or_array(special.expit(x), scalar)


def cox_max_cdf(x, integral_form: bool = False) -> float:
    """CDF of the centered maximum: mixing the Gumbel void probability
    e^(-y e^-x) over the unit-exponential intensity level y gives the
    logistic law; integral_form=True evaluates that mixture by quadrature
    instead of returning the closed form."""
    if not integral_form:
        return logistic_cdf(x)
    x = float(x)
    rate = 1.0 + math.exp(-x)
    upper = 60.0 / rate

    def integrand(y):
        return np.exp(-y * rate)

    return adaptive_integrate(integrand, 0.0, upper, DEFAULT_CONFIG)


def sample_cox_extremes(ell: int, seed: int = DEFAULT_SEED,
                        reps: int = 1) -> np.ndarray:
    """Exact draws of the ell top points of the Cox limit, decreasing.

    The k-th largest point of a Poisson process with intensity e^-x dx is
    -log(Gamma_k) with Gamma_k the k-th unit-rate Poisson arrival; the
    random intensity level contributes an independent Gumbel shift -G.
    Inverse-transform exponentials keep the sampler exact.  Returns shape
    (ell,) for reps=1, else (reps, ell).
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    if reps < 1:
        raise ValueError("reps must be positive")
    rng = _make_rng(seed)
    exps = -np.log1p(-rng.random((reps, ell + 1)))
    arrivals = np.cumsum(exps[:, :ell], axis=1)
    gumbel = -np.log(exps[:, ell])
    out = -np.log(arrivals) - gumbel[:, None]
    return out[0] if reps == 1 else out


# ---------------------------------------------------------------------------
# exact block-count moments under the uniform measure

def moehle_factorial_moment(n: int, t, r: int) -> float | np.ndarray:
    """E[N(t)(N(t)+1)...(N(t)+r-1)] started from n blocks, exact:
    Gamma(r+1)/Gamma(1+r e^-t) * Gamma(n+r e^-t)/Gamma(n), in log-gamma
    form so large n cannot overflow."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if r < 1:
        raise ValueError("r must be a positive integer")
    t = _nonnegative(t)
    scalar = t.ndim == 0
    w = r * np.exp(-t)
    value = np.exp(special.gammaln(r + 1.0) - special.gammaln(1.0 + w)
                   + special.gammaln(n + w) - special.gammaln(n))
    return _scalar_or_array(value, scalar)


# ---------------------------------------------------------------------------
# family record

@dataclass(frozen=True)
class LimitLaw:
    """Tagged limit family with its exponent, for report plumbing."""

    family: str
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; "
                             f"choose from {FAMILIES}")
        if self.family == "typical":
            _check_alpha(self.alpha)
        elif self.family in ("frechet", "poisson_tail"):
            _check_alpha(self.alpha, low_open=True)
        elif self.alpha is not None:
            raise ValueError(f"{self.family} takes no alpha")

    @property
    def beta(self) -> float:
        if self.alpha is None:
            raise ValueError(f"{self.family} has no exponent")
        return (self.alpha - 1.0) / self.alpha

    def cdf(self, x):
        if self.family == "typical":
            return typical_cdf(self.alpha, x)
        if self.family == "frechet":
            return frechet_cdf(self.alpha, x)
        if self.family == "logistic":
            return logistic_cdf(x)
        if self.family == "gumbel_shifted":
            x = np.asarray(x, dtype=float)
            return _scalar_or_array(np.exp(-np.exp(-x)), x.ndim == 0)
        raise ValueError(f"{self.family} is not a distribution")

    def density(self, x):
        if self.family == "typical":
            return typical_density(self.alpha, x)
        if self.family == "logistic":
            x = np.asarray(x, dtype=float)
            p = special.expit(x)
            return _scalar_or_array(p * (1.0 - p), x.ndim == 0)
        if self.family == "gumbel_shifted":
            x = np.asarray(x, dtype=float)
            return _scalar_or_array(np.exp(-x - np.exp(-x)), x.ndim == 0)
        raise ValueError(f"no density for {self.family}")
