"""Finite measures on [0, 1] driving coalescent merger rates.

A measure is stored in three parts that later integrate differently against
the ``1/p**2`` kernels: a point mass at 0, point masses in (0, 1], and
absolutely continuous components.  Named density components are power-beta,
``c * p**(a-1) * (1-p)**(b-1)``, whose moments against ``p**j (1-p)**k``
have the closed form ``c * B(a+j, b+k)``; user-supplied densities carry
declared endpoint exponents so the quadrature can substitute them away.

Text form (case-insensitive, terms joined by "+")::

    kingman[:mass]                unit (or given) mass at 0
    bolthausen-sznitman           uniform density on (0, 1)
    beta:x,y                      normalized Beta(x, y) probability density
    powerbeta:c=C,a=A,b=B         unnormalized power-beta density
    dirac:p=P,m=M                 mass M at P in (0, 1]

Instances are immutable; ``+`` concatenates components without merging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_unit_interval


class MeasureParseError(ValueError):
    """Raised on malformed measure text; carries the character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class PowerBetaDensity:
    """Density c * p**(a-1) * (1-p)**(b-1) on (0, 1).

    ``a`` is the left endpoint exponent (behaviour p**(a-1) at 0), ``b`` the
    right one.  ``c`` is an arbitrary positive coefficient, so the component
    is in general not a probability density.
    """

    c: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.c > 0 and self.a > 0 and self.b > 0):
            raise ValueError("power-beta parameters must be positive")

    @property
    def left_exponent(self) -> float:
        return self.a

    @property
    def right_exponent(self) -> float:
        return self.b

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        return self.c * p ** (self.a - 1.0) * (1.0 - p) ** (self.b - 1.0)

    def mass(self) -> float:
        return self.c * special.beta(self.a, self.b)

    def moment(self, j: float, k: float) -> float:
        """int p**j (1-p)**k against this component: c * B(a+j, b+k)."""
        return self.c * special.beta(self.a + j, self.b + k)


@dataclass(frozen=True)
class CustomDensity:
    """User-supplied vectorized density with declared endpoint exponents.

    ``fn(p)`` must accept numpy arrays with values in (0, 1).  The declared
    exponents promise fn(p) = O(p**(left_exponent - 1)) at 0 and
    O((1-p)**(right_exponent - 1)) at 1; integrability requires both > 0.
    """

    fn: object = field(compare=False)
    left_exponent: float = 1.0
    right_exponent: float = 1.0

    def __post_init__(self) -> None:
        if not (self.left_exponent > 0 and self.right_exponent > 0):
            raise ValueError("declared endpoint exponents must be positive")
        if not callable(self.fn):
            raise ValueError("custom density needs a callable")

    def __call__(self, p):
        return self.fn(np.asarray(p, dtype=float))

    def mass(self) -> float:
        return integrate_unit_interval(self, self.left_exponent,
                                       self.right_exponent)


@dataclass(frozen=True)
class LambdaMeasure:
    """Immutable finite measure on [0, 1].

    Attributes
    ----------
    atom_at_zero : float
        Mass at p = 0 (the Kingman component).
    atoms : tuple of (p, mass)
        Point masses at locations in (0, 1].
    densities : tuple
        PowerBetaDensity / CustomDensity components, summed.
    """

    atom_at_zero: float = 0.0
    atoms: tuple = ()
    densities: tuple = ()

    def __post_init__(self) -> None:
        if self.atom_at_zero < 0:
            raise ValueError("atom at zero must be nonnegative")
        object.__setattr__(self, "atoms", tuple(
            (float(p), float(m)) for p, m in self.atoms))
        object.__setattr__(self, "densities", tuple(self.densities))
        for p, m in self.atoms:
            if not 0.0 < p <= 1.0:
                raise ValueError(
                    "interior atoms live in (0, 1]; use atom_at_zero for p = 0")
            if m <= 0:
                raise ValueError("atom masses must be positive")
        for dens in self.densities:
            if not isinstance(dens, (PowerBetaDensity, CustomDensity)):
                raise ValueError(f"unsupported density component: {dens!r}")

    def __add__(self, other: "LambdaMeasure") -> "LambdaMeasure":
        if not isinstance(other, LambdaMeasure):
            return NotImplemented
        return LambdaMeasure(self.atom_at_zero + other.atom_at_zero,
                             self.atoms + other.atoms,
                             self.densities + other.densities)

    @property
    def is_trivial(self) -> bool:
        return (self.atom_at_zero == 0 and not self.atoms
                and not self.densities)

    def total_mass(self) -> float:
        return (self.atom_at_zero + sum(m for _, m in self.atoms)
                + sum(d.mass() for d in self.densities))

    def integrate(self, f, config: QuadratureConfig = DEFAULT_CONFIG,
                  left_exponent: float = 1.0,
                  right_exponent: float = 1.0) -> float:
        """Integral of f against the measure (no 1/p**2 kernel).

        ``f`` must be vectorized on (0, 1) and finite at 0 and 1 (the atom
        endpoints evaluate it pointwise).  If f itself vanishes algebraically
        at an endpoint, declaring that via left/right_exponent (> 1) tightens
        the substitution; the defaults assume f bounded and nonvanishing.
        """
        total = 0.0
        if self.atom_at_zero:
            total += self.atom_at_zero * float(f(0.0))
        for p, m in self.atoms:
            total += m * float(f(p))
        for dens in self.densities:
            def integrand(p, dens=dens):
                return np.asarray(f(p)) * dens(p)

            total += integrate_unit_interval(
                integrand,
                dens.left_exponent + left_exponent - 1.0,
                dens.right_exponent + right_exponent - 1.0,
                config)
        return total

    def serialize(self) -> str:
        """Canonical text form; parse(serialize(m)) reproduces m exactly."""
        terms = []
        if self.atom_at_zero:
            if self.atom_at_zero == 1.0:
                terms.append("kingman")
            else:
                terms.append(f"kingman:{self.atom_at_zero!r}")
        for dens in self.densities:
            if isinstance(dens, CustomDensity):
                raise ValueError("custom densities have no text form")
            if dens.c == 1.0 and dens.a == 1.0 and dens.b == 1.0:
                terms.append("bolthausen-sznitman")
            else:
                terms.append(f"powerbeta:c={dens.c!r},a={dens.a!r},b={dens.b!r}")
        for p, m in self.atoms:
            terms.append(f"dirac:p={p!r},m={m!r}")
        if not terms:
            raise ValueError("cannot serialize the zero measure")
        return " + ".join(terms)


def total_mass(measure: LambdaMeasure) -> float:
    return measure.total_mass()


def integrate(measure: LambdaMeasure, f,
              config: QuadratureConfig = DEFAULT_CONFIG, **kwargs) -> float:
    return measure.integrate(f, config, **kwargs)


# ---------------------------------------------------------------------------
# parsing

def _parse_number(text: str, position: int, what: str) -> float:
    token = text.strip()
    if not token:
        raise MeasureParseError(f"missing {what}", position)
    try:
        value = float(token)
    except ValueError:
        raise MeasureParseError(f"bad {what} {token!r}", position) from None
    if not math.isfinite(value):
        raise MeasureParseError(f"{what} must be finite", position)
    return value


def _parse_keyvals(body: str, offset: int, keys: tuple[str, ...],
                   what: str) -> dict[str, float]:
    out: dict[str, float] = {}
    pos = offset
    for part in body.split(","):
        if "=" not in part:
            raise MeasureParseError(
                f"{what} takes key=value pairs {keys}", pos)
        key, _, val = part.partition("=")
        key = key.strip()
        if key not in keys:
            raise MeasureParseError(f"unknown {what} key {key!r}", pos)
        if key in out:
            raise MeasureParseError(f"duplicate {what} key {key!r}", pos)
        out[key] = _parse_number(val, pos + part.index("=") + 1, f"{what} {key}")
        pos += len(part) + 1
    missing = [k for k in keys if k not in out]
    if missing:
        raise MeasureParseError(f"{what} missing {missing}", offset)
    return out


def _parse_term(term: str, offset: int) -> LambdaMeasure:
    stripped = term.strip()
    pos = offset + (len(term) - len(term.lstrip()))
    if not stripped:
        raise MeasureParseError("empty term", pos)
    head, colon, body = stripped.partition(":")
    name = head.strip().lower()
    body_pos = pos + len(head) + 1

    if name == "kingman":
        mass = _parse_number(body, body_pos, "kingman mass") if colon else 1.0
        if mass <= 0:
            raise MeasureParseError("kingman mass must be positive", body_pos)
        return LambdaMeasure(atom_at_zero=mass)

    if name == "bolthausen-sznitman":
        if colon:
            raise MeasureParseError("bolthausen-sznitman takes no parameters",
                                    body_pos)
        return LambdaMeasure(densities=(PowerBetaDensity(1.0, 1.0, 1.0),))

    if not colon:
        raise MeasureParseError(f"unknown measure term {name!r}", pos)

    if name == "beta":
        parts = body.split(",")
        if len(parts) != 2:
            raise MeasureParseError("beta takes two parameters x,y", body_pos)
        x = _parse_number(parts[0], body_pos, "beta parameter")
        y = _parse_number(parts[1], body_pos + len(parts[0]) + 1,
                          "beta parameter")
        if x <= 0 or y <= 0:
            raise MeasureParseError("beta parameters must be positive",
                                    body_pos)
        return LambdaMeasure(densities=(
            PowerBetaDensity(1.0 / special.beta(x, y), x, y),))

    if name == "powerbeta":
        kv = _parse_keyvals(body, body_pos, ("c", "a", "b"), "powerbeta")
        if min(kv.values()) <= 0:
            raise MeasureParseError("powerbeta parameters must be positive",
                                    body_pos)
        return LambdaMeasure(densities=(
            PowerBetaDensity(kv["c"], kv["a"], kv["b"]),))

    if name == "dirac":
        kv = _parse_keyvals(body, body_pos, ("p", "m"), "dirac")
        if not 0.0 < kv["p"] <= 1.0:
            raise MeasureParseError(
                "dirac location must lie in (0, 1]; use kingman for mass at 0",
                body_pos)
        if kv["m"] <= 0:
            raise MeasureParseError("dirac mass must be positive", body_pos)
        return LambdaMeasure(atoms=((kv["p"], kv["m"]),))

    raise MeasureParseError(f"unknown measure term {name!r}", pos)


def parse_measure(text: str) -> LambdaMeasure:
    """Parse the textual measure grammar; see the module docstring."""
    if not text or not text.strip():
        raise MeasureParseError("empty measure", 0)
    result = LambdaMeasure()
    offset = 0
    for term in text.split("+"):
        result = result + _parse_term(term, offset)
        offset += len(term) + 1
    return result


# Ready-made building blocks used throughout the tests and demos.
def kingman(mass: float = 1.0) -> LambdaMeasure:
    return LambdaMeasure(atom_at_zero=mass)


def bolthausen_sznitman() -> LambdaMeasure:
    return LambdaMeasure(densities=(PowerBetaDensity(1.0, 1.0, 1.0),))


def power_beta(c: float, a: float, b: float = 1.0) -> LambdaMeasure:
    return LambdaMeasure(densities=(PowerBetaDensity(c, a, b),))
