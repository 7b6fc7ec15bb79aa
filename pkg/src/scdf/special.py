"""Special-function kernels for integer-shape gamma statistics.

Everything here is a pure function. Scalars go in and scalars come out,
except :func:`truncated_exp_series` and :func:`compensated_sum`, which
broadcast over numpy arrays.
"""

import functools
import math
import operator

import numpy as np
from scipy import integrate, special

from .errors import NumericalError

MAX_FACTORIAL_ARG = 170


def _as_nonneg_int(n, name="n"):
    try:
        value = operator.index(n)
    except TypeError:
        if isinstance(n, float) and n.is_integer():
            value = int(n)
        else:
            raise TypeError(f"{name} must be a non-negative integer, got {n!r}") from None
    if value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {n!r}")
    return value


def factorial(n):
    """``n!`` as a float. Raises OverflowError above 170!."""
    n = _as_nonneg_int(n)
    if n > MAX_FACTORIAL_ARG:
        raise OverflowError(f"{n}! is not representable in double precision (max {MAX_FACTORIAL_ARG})")
    return float(math.factorial(n))


def compensated_sum(terms):
    """Neumaier summation along the first axis.

    ``terms`` is an iterable of scalars or equally-shaped arrays. Used for
    the alternating-sign mixture sums where plain accumulation loses digits.
    """
    total = None
    comp = None
    for t in terms:
        t = np.asarray(t, dtype=float)
        if total is None:
            total = t.copy()
            comp = np.zeros_like(total)
            continue
        s = total + t
        big = np.abs(total) >= np.abs(t)
        comp = comp + np.where(big, (total - s) + t, (t - s) + total)
        total = s
    if total is None:
        return 0.0
    out = total + comp
    return float(out) if out.ndim == 0 else out


def truncated_exp_series(m, x):
    """Partial exponential sum ``sum_{i<m} x**i / i!``.

    Accepts scalar or array ``x``. All terms are non-negative for ``x >= 0``.
    """
    m = _as_nonneg_int(m, "m")
    if m < 1:
        raise ValueError("m must be >= 1")
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x)
    parts = [term]
    for i in range(1, m):
        term = term * x / i
        parts.append(term)
    out = compensated_sum(parts)
    return float(out) if np.ndim(out) == 0 else out


def upper_incomplete_gamma_int(n, x):
    """Gamma(n, x) for integer ``n >= 1`` via the finite exponential series."""
    n = _as_nonneg_int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if x < 0:
        raise ValueError("x must be >= 0")
    return factorial(n - 1) * math.exp(-x) * truncated_exp_series(n, x)


def scaled_expn(p, x):
    """``exp(x) * E_p(x)`` for integer ``p >= 1`` and ``x > 0`` without overflow."""
    if x <= 0:
        raise ValueError("x must be positive")
    if x < 600.0:
        return math.exp(x) * float(special.expn(p, x))
    # asymptotic series; terms shrink while k < x, so 40 terms are ample here
    term = 1.0 / x
    total = [term]
    for k in range(1, 40):
        term *= -(p + k - 1) / x
        total.append(term)
        if abs(term) < 1e-18 * abs(total[0]):
            break
    return math.fsum(total)


def exp_log_integral(n, a):
    """Closed form of ``int_0^inf x**n exp(-a x) log(1 + x) dx``.

    Uses n!/a^(n+1) * sum_{j=0}^{n} exp(a) E_{j+1}(a), which has only
    positive terms.
    """
    n = _as_nonneg_int(n)
    if not a > 0:
        raise ValueError("a must be positive")
    inner = math.fsum(scaled_expn(j + 1, a) for j in range(n + 1))
    # n!/a^(n+1) via logs so large n or small a do not overflow early
    return math.exp(math.lgamma(n + 1) - (n + 1) * math.log(a)) * inner


def exp_log_integral_quad(n, a, rtol=1e-12):
    """Adaptive-quadrature evaluation of the same integral (independent route)."""
    n = _as_nonneg_int(n)
    if not a > 0:
        raise ValueError("a must be positive")

    def f(x):
        return x**n * math.exp(-a * x) * math.log1p(x)

    # split at the integrand's bulk so quad does not miss a far-out peak
    split = max(1.0, (n + 1) / a)
    pieces = []
    for lo, hi in ((0.0, split), (split, math.inf)):
        val, err, info = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=rtol, limit=500, full_output=1)[:3]
        if not np.isfinite(val) or err > max(1e-6 * abs(val), 1e-300):
            raise NumericalError(
                f"quadrature did not converge for n={n}, a={a}: value={val}, abserr={err}, "
                f"evaluations={info.get('neval')}"
            )
        pieces.append(val)
    return math.fsum(pieces)


SELF_CHECK_POINTS = [(n, a) for n in (0, 3, 8) for a in (0.1, 1.0, 10.0)]


@functools.lru_cache(maxsize=1)
def check_exp_log_integral(rtol=1e-8):
    """Cross-check the closed form against quadrature once per process."""
    worst = 0.0
    for n, a in SELF_CHECK_POINTS:
        closed = exp_log_integral(n, a)
        quad = exp_log_integral_quad(n, a)
        rel = abs(closed - quad) / abs(quad)
        worst = max(worst, rel)
        if rel > rtol:
            raise NumericalError(
                f"exp_log_integral self-check failed at n={n}, a={a}: closed={closed!r}, quad={quad!r}, rel={rel:.3e}"
            )
    return worst
