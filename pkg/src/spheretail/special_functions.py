"""Self-contained numerical kernel.

Gamma/beta special functions, regularized incomplete beta/gamma, adaptive
quadrature, bisection root finding, and sphere surface areas.  The special
functions and the quadrature are thin, domain-checked wrappers around
``scipy.special`` (Cephes) and ``scipy.integrate.quad`` (QUADPACK, an
adaptive scheme with an embedded Gauss/Kronrod rule pair that copes with
integrable endpoint singularities).

Every routine here is a pure function of its inputs and safe for concurrent
invocation; there is no shared mutable state.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _sci_integrate
from scipy import special as _sci_special

__all__ = [
    "QuadratureError",
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "log_beta",
    "reg_inc_beta",
    "reg_inc_gamma_upper",
    "integrate",
    "find_root",
    "sphere_area",
]


class QuadratureError(ArithmeticError):
    """Raised when adaptive integration cannot reach the requested tolerance.

    Attributes
    ----------
    estimate : float
        Best available estimate of the integral.
    error_bound : float
        Bound on the absolute error of ``estimate``.
    """

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and subdivision budget for adaptive integration."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def _require_positive(name, value):
    if np.any(np.asarray(value) <= 0.0):
        raise ValueError(f"{name} must be strictly positive, got {value}")


def log_beta(p, q):
    """Return log B(p, q) for p, q > 0.  Accepts scalars or arrays."""
    _require_positive("p", p)
    _require_positive("q", q)
    return _sci_special.betaln(p, q)


def reg_inc_beta(x, p, q):
    """Regularized incomplete beta function I_x(p, q).

    Parameters
    ----------
    x : float or array_like in [0, 1]
    p, q : float or array_like, > 0

    Returns
    -------
    float or ndarray in [0, 1], nondecreasing in ``x``.
    """
    _require_positive("p", p)
    _require_positive("q", q)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    out = _sci_special.betainc(p, q, xa)
    return float(out) if np.ndim(x) == 0 else out


def reg_inc_gamma_upper(s, x):
    """Regularized upper incomplete gamma function Q(s, x) = Gamma(s, x)/Gamma(s).

    Parameters
    ----------
    s : float or array_like, > 0
    x : float or array_like, >= 0

    Returns
    -------
    float or ndarray in [0, 1], nonincreasing in ``x``.
    """
    _require_positive("s", s)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0):
        raise ValueError(f"x must be nonnegative, got {x}")
    out = _sci_special.gammaincc(s, xa)
    return float(out) if np.ndim(x) == 0 else out


def integrate(f, a, b, spec=DEFAULT_QUADRATURE):
    """Adaptive quadrature of ``f`` over ``[a, b]``.

    Integrable endpoint singularities of power type are handled by the
    underlying extrapolating QUADPACK scheme.  Deterministic for fixed
    inputs.

    Raises
    ------
    QuadratureError
        If the requested tolerance is not reached within the subdivision
        budget; the exception carries the best estimate and error bound.
    """
    result = _sci_integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
    )
    if len(result) > 3:
        value, err = result[0], result[1]
        raise QuadratureError(str(result[3]), estimate=value, error_bound=err)
    return result[0]


def find_root(f, lo, hi, tol=None):
    """Locate a root of a sign-changing function by pure bisection.

    Parameters
    ----------
    f : callable
        Monotone (or at least sign-changing) real function.
    lo, hi : float
        Bracket with ``f(lo)`` and ``f(hi)`` of opposite signs.
    tol : float, optional
        Bracket width at which to stop.  Defaults to ``1e-10 * (1 + |hi|)``.

    Returns
    -------
    float midpoint of the final bracket.
    """
    if tol is None:
        tol = 1e-10 * (1.0 + abs(hi))
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise ValueError(f"no sign change on bracket [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket at floating point resolution
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if math.copysign(1.0, fmid) == math.copysign(1.0, flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sphere_area(k):
    """Surface area of the unit sphere in R^k: 2 pi^(k/2) / Gamma(k/2)."""
    if k < 1 or int(k) != k:
        raise ValueError(f"dimension k must be an integer >= 1, got {k}")
    k = int(k)
    return 2.0 * math.pi ** (k / 2.0) / math.gamma(k / 2.0)
