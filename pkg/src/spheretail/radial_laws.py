"""Probability laws of the squared radial part of the field.

Each law describes the distribution of the squared norm R = ||xi||^2 of the
driving random vector.  A law exposes its exact upper tail function, a
sampler, a (beta, gamma) tail-class descriptor, and the closed-form
correction term used by the asymptotic error formulas.

A ``scale`` factor ``a`` means the law of ``a * X`` for ``X`` from the base
family, so ``tail(x) = base_tail(x / a)``.  Law objects are immutable and
all operations except ``sample`` are pure; sampling draws from an explicitly
passed generator.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sci_special

from .special_functions import reg_inc_beta, reg_inc_gamma_upper

__all__ = [
    "UnsupportedLawError",
    "TailClass",
    "RadialLaw",
    "ChiSquare",
    "Chi",
    "FDist",
    "LogNormal",
    "Bessel",
    "g_beta",
    "law_from_dict",
]


class UnsupportedLawError(ValueError):
    """The requested operation is not defined for this law family."""


@dataclass(frozen=True)
class TailClass:
    """Tail classification of a law.

    ``beta <= 1`` and ``gamma > 0`` (possibly ``inf``) index the tail decay:
    the tail is asymptotically ``exp(-integral of ell(t)/t^beta)`` with
    ``ell -> gamma``.  ``ell0_const`` holds the representative slowly varying
    term when it is constant; ``None`` means the logarithmic representative
    ``log t``.  ``c_limit`` records the limiting constant descriptively (it
    cancels from every implemented ratio and is never evaluated).
    """

    beta: float
    gamma: float
    ell0_const: float | None
    c_limit: str
    regularly_varying: bool

    def ell0(self, t):
        """Evaluate the representative slowly varying term at ``t``."""
        if self.ell0_const is None:
            return np.log(t)
        return self.ell0_const if np.ndim(t) == 0 else np.full(np.shape(t), self.ell0_const)


def g_beta(beta, y):
    """Integrated tail-exponent kernel g_beta(y) on (0, 1].

    Equals ``(y**(beta-1) - 1) / (1 - beta)`` for ``beta < 1`` and
    ``-log(y)`` at ``beta = 1``; continuous in ``beta`` at 1.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0) or np.any(y > 1.0):
        raise ValueError("y must lie in (0, 1]")
    logy = np.log(y)
    if beta > 1.0:
        raise ValueError("beta must be <= 1")
    if beta == 1.0:
        out = -logy
    else:
        # -expm1((beta-1) log y) / (beta-1): stable as beta -> 1
        out = -np.expm1((beta - 1.0) * logy) / (beta - 1.0)
    return float(out) if np.ndim(out) == 0 else out


class RadialLaw:
    """Base class for the law of the squared radial part."""

    family = "base"

    def tail(self, x):
        """Upper tail Pr(R > x) for x >= 0; accepts scalars or arrays."""
        xa = np.asarray(x, dtype=float)
        if np.any(xa < 0.0):
            raise ValueError("tail argument must be nonnegative")
        out = self._base_tail(np.atleast_1d(xa) / self.scale)
        return float(out[0]) if np.ndim(x) == 0 else out.reshape(xa.shape)

    def sample(self, rng, size=None):
        """Draw variates using an explicitly passed ``numpy`` generator."""
        return self.scale * self._base_sample(rng, size)

    def class_descriptor(self):
        raise NotImplementedError

    def r_beta(self, h, y):
        """Closed-form limit of the slowly-varying correction term.

        Defined per family; equals 0 at ``y = 1`` and is evaluated at the
        asymptotic limit (the ``h`` dependence has already been taken).
        """
        if h < 1.0:
            raise ValueError("h must be >= 1")
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0.0) or np.any(y > 1.0):
            raise ValueError("y must lie in (0, 1]")
        return self._r_beta_limit(np.log(y))

    def _r_beta_limit(self, logy):
        raise UnsupportedLawError(
            f"no closed-form correction term for the {self.family} family"
        )

    def to_dict(self):
        out = {"family": self.family, "scale": self.scale}
        for key in ("nu", "nu1", "nu2"):
            if hasattr(self, key):
                out[key] = getattr(self, key)
        return out

    def _validate_positive(self, **fields):
        for name, value in fields.items():
            if not value > 0.0:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class ChiSquare(RadialLaw):
    """Chi-square law with ``nu`` degrees of freedom (light-tailed)."""

    nu: float
    scale: float = 1.0
    family = "chi_square"

    def __post_init__(self):
        self._validate_positive(nu=self.nu, scale=self.scale)

    def _base_tail(self, x):
        return reg_inc_gamma_upper(self.nu / 2.0, x / 2.0)

    def _base_sample(self, rng, size):
        return rng.gamma(self.nu / 2.0, 2.0, size)

    def class_descriptor(self):
        return TailClass(0.0, 0.5, 0.5, "power-of-x prefactor of the chi-square tail", False)

    def _r_beta_limit(self, logy):
        return (self.nu - 2.0) / 2.0 * logy


@dataclass(frozen=True)
class Chi(RadialLaw):
    """Chi law (square root of a chi-square) with ``nu`` degrees of freedom."""

    nu: float
    scale: float = 1.0
    family = "chi"

    def __post_init__(self):
        self._validate_positive(nu=self.nu, scale=self.scale)

    def _base_tail(self, x):
        return reg_inc_gamma_upper(self.nu / 2.0, x * x / 2.0)

    def _base_sample(self, rng, size):
        return np.sqrt(rng.gamma(self.nu / 2.0, 2.0, size))

    def class_descriptor(self):
        return TailClass(-1.0, 1.0, 1.0, "power prefactor of the chi tail", False)


@dataclass(frozen=True)
class FDist(RadialLaw):
    """F law with ``(nu1, nu2)`` degrees of freedom (regularly varying)."""

    nu1: float
    nu2: float
    scale: float = 1.0
    family = "f"

    def __post_init__(self):
        self._validate_positive(nu1=self.nu1, nu2=self.nu2, scale=self.scale)

    def _base_tail(self, x):
        t = self.nu2 / (self.nu1 * x + self.nu2)
        return reg_inc_beta(t, self.nu2 / 2.0, self.nu1 / 2.0)

    def _base_sample(self, rng, size):
        num = rng.gamma(self.nu1 / 2.0, 2.0, size) / self.nu1
        den = rng.gamma(self.nu2 / 2.0, 2.0, size) / self.nu2
        return num / den

    def class_descriptor(self):
        return TailClass(
            1.0, self.nu2 / 2.0, self.nu2 / 2.0,
            "ratio-of-gammas prefactor", True,
        )


@dataclass(frozen=True)
class LogNormal(RadialLaw):
    """Log-normal law exp(N(0, 1)) (subexponential, not regularly varying)."""

    scale: float = 1.0
    family = "log_normal"

    def __post_init__(self):
        self._validate_positive(scale=self.scale)

    def _base_tail(self, x):
        out = np.ones_like(x)
        pos = x > 0.0
        out[pos] = _sci_special.ndtr(-np.log(x[pos]))
        return out

    def _base_sample(self, rng, size):
        return np.exp(rng.standard_normal(size))

    def class_descriptor(self):
        return TailClass(1.0, math.inf, None, "1/sqrt(2 pi) over log x", False)

    def _r_beta_limit(self, logy):
        return 0.5 * logy**2


# Fixed-order Gauss-Legendre rule for the product-law convolution; the
# integrand is analytic with a single saddle after the log substitution,
# so 256 nodes give full double accuracy over the usable range.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(256)


@dataclass(frozen=True)
class Bessel(RadialLaw):
    """Law of the product of independent chi-square variates.

    The product of chi-square variables with ``nu1`` and ``nu2`` degrees of
    freedom (subexponential, not regularly varying).  The exact tail is the
    one-dimensional convolution of the two chi-square laws, integrated
    numerically on a log grid centred at the saddle ``t = sqrt(x)``.
    """

    nu1: float
    nu2: float
    scale: float = 1.0
    family = "bessel"

    def __post_init__(self):
        self._validate_positive(nu1=self.nu1, nu2=self.nu2, scale=self.scale)

    def _base_tail(self, x):
        out = np.ones_like(x)
        pos = x > 0.0
        if not np.any(pos):
            return out
        xp = x[pos]
        s = np.sqrt(xp)
        # Half-width in u = log(t / sqrt(x)); covers the chi-square mass on
        # both flanks down to relative level exp(-75) at the truncation.
        half_width = np.log(2.0 + 150.0 / s) + 0.5
        u = half_width[:, None] * _GL_NODES[None, :]
        t = s[:, None] * np.exp(u)
        with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
            # chi-square(nu1) density times the Jacobian dt = t du
            log_fdt = (
                (self.nu1 / 2.0) * np.log(t)
                - t / 2.0
                - _sci_special.gammaln(self.nu1 / 2.0)
                - (self.nu1 / 2.0) * math.log(2.0)
            )
            upper = _sci_special.gammaincc(self.nu2 / 2.0, xp[:, None] / (2.0 * t))
            integrand = np.exp(log_fdt) * upper
            integrand = np.where(np.isfinite(integrand), integrand, 0.0)
        out[pos] = (integrand @ _GL_WEIGHTS) * half_width
        return out

    def _base_sample(self, rng, size):
        return rng.gamma(self.nu1 / 2.0, 2.0, size) * rng.gamma(self.nu2 / 2.0, 2.0, size)

    def class_descriptor(self):
        return TailClass(0.5, 0.5, 0.5, "power-times-exponential prefactor", False)

    def _r_beta_limit(self, logy):
        return (self.nu1 + self.nu2 - 3.0) / 4.0 * logy


_FAMILIES = {
    "chi_square": (ChiSquare, ("nu",)),
    "chi": (Chi, ("nu",)),
    "f": (FDist, ("nu1", "nu2")),
    "log_normal": (LogNormal, ()),
    "bessel": (Bessel, ("nu1", "nu2")),
}


def law_from_dict(spec):
    """Build a radial law from a configuration mapping.

    Expected keys: ``family`` (one of ``chi_square``, ``chi``, ``f``,
    ``log_normal``, ``bessel``), the family's degree-of-freedom entries
    (``nu`` or ``nu1``/``nu2``), and an optional ``scale``.
    """
    try:
        family = spec["family"]
    except (KeyError, TypeError):
        raise ValueError("law description must be a mapping with a 'family' key")
    if family not in _FAMILIES:
        raise ValueError(f"unknown law family {family!r}; expected one of {sorted(_FAMILIES)}")
    cls, required = _FAMILIES[family]
    kwargs = {}
    for key in required:
        if key not in spec:
            raise ValueError(f"law family {family!r} requires parameter {key!r}")
        kwargs[key] = float(spec[key])
    kwargs["scale"] = float(spec.get("scale", 1.0))
    return cls(**kwargs)
