"""Closed-form performance of the selective-combining DF relay network.

Branch statistics work for arbitrary per-link (m, rate) pairs. The
selection-combined density is built as an exact exponential-polynomial
mixture, which needs every link of every relay to share one (m, rate); the
MGF, SEP and capacity closed forms are evaluated from that mixture.
"""

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

from .channel import validate_config
from .errors import NumericalError, ResourceError, UnsupportedError
from .special import check_exp_log_integral, compensated_sum, exp_log_integral, truncated_exp_series

__all__ = [
    "BranchDistribution",
    "ExpPolyTerm",
    "ExpPolyMixture",
    "branch_distribution",
    "branch_cdf",
    "branch_pdf",
    "sc_pdf_mixture",
    "sc_mixture_for_config",
    "outage_probability",
    "mgf",
    "sep_mpsk",
    "avg_capacity",
    "DEFAULT_MAX_TERMS",
]

DEFAULT_MAX_TERMS = 10**6


# -- branch statistics -------------------------------------------------------


@dataclass(frozen=True)
class BranchDistribution:
    """SNR law of one relay branch, min(max(source links), relay link).

    ``links`` holds ``(m, rate)`` for the source->relay antenna links followed
    by the relay->destination link.
    """

    links: tuple
    antennas: int = 2

    def __post_init__(self):
        if len(self.links) != self.antennas + 1:
            raise ValueError(f"{self.antennas} antenna(s) need {self.antennas + 1} links, got {len(self.links)}")

    def cdf(self, gamma):
        return branch_cdf(self, gamma)

    def pdf(self, gamma):
        return branch_pdf(self, gamma)


def branch_distribution(cfg, k):
    return BranchDistribution(cfg.branch_links(k), cfg.antennas)


def _link_stats(m, rate, gamma):
    x = rate * gamma
    sf = np.exp(-x) * truncated_exp_series(m, x)
    cdf = special.gammainc(m, x)
    pdf = rate * np.exp(-x) * x ** (m - 1) / math.factorial(m - 1)
    return cdf, sf, pdf


def _as_gamma(gamma):
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("gamma must be >= 0")
    return g


def _ret(x):
    return float(x) if np.ndim(x) == 0 else x


def branch_cdf(dist, gamma):
    """P[branch SNR <= gamma]; broadcasts over ``gamma``."""
    g = _as_gamma(gamma)
    stats = [_link_stats(m, r, g) for m, r in dist.links]
    F3, S3, _ = stats[-1]
    if dist.antennas == 2:
        (F1, _, _), (F2, _, _) = stats[0], stats[1]
        # 1 - (1 - F1 F2)(1 - F3) rearranged to avoid cancellation near 0
        out = F3 + F1 * F2 * S3
    else:
        F1 = stats[0][0]
        out = F3 + F1 * S3
    return _ret(out)


def branch_pdf(dist, gamma):
    """Exact derivative of :func:`branch_cdf`."""
    g = _as_gamma(gamma)
    stats = [_link_stats(m, r, g) for m, r in dist.links]
    _, S3, f3 = stats[-1]
    if dist.antennas == 2:
        (F1, S1, f1), (F2, S2, f2) = stats[0], stats[1]
        source_sf = S1 + S2 * F1
        out = f3 * source_sf + (f1 * F2 + F1 * f2) * S3
    else:
        _, S1, f1 = stats[0]
        out = f3 * S1 + f1 * S3
    return _ret(out)


def outage_probability(cfg, gamma_th=None):
    """P[gamma_SC < gamma_th] as the product of independent branch CDFs."""
    validate_config(cfg)
    g = cfg.gamma_th if gamma_th is None else gamma_th
    return math.prod(branch_cdf(branch_distribution(cfg, k), g) for k in range(cfg.K))


# -- exponential-polynomial mixtures ------------------------------------------


@dataclass(frozen=True)
class ExpPolyTerm:
    """``coeff * gamma**power * exp(-rate * gamma)``.

    ``multiplier`` is the integer ratio rate/alpha when the term came from a
    single-rate construction; aggregation keys on it instead of the float.
    """

    coeff: float
    power: int
    rate: float
    multiplier: int = None

    @property
    def mass(self):
        """Integral of the term over [0, inf)."""
        return self.coeff * math.exp(math.lgamma(self.power + 1) - (self.power + 1) * math.log(self.rate))


class ExpPolyMixture:
    """Finite sum of :class:`ExpPolyTerm`; immutable once built."""

    def __init__(self, terms, alpha=None):
        self._terms = tuple(terms)
        self.alpha = alpha
        for t in self._terms:
            if not t.rate > 0:
                raise ValueError(f"term rate must be positive, got {t.rate}")

    @property
    def terms(self):
        return self._terms

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __repr__(self):
        return f"ExpPolyMixture({len(self)} terms, alpha={self.alpha})"

    def _key(self, t):
        if t.multiplier is not None and self.alpha is not None:
            return (t.power, "m", t.multiplier)
        return (t.power, "r", t.rate)

    def aggregated(self):
        acc = {}
        for t in self._terms:
            acc.setdefault(self._key(t), []).append(t)
        out = []
        for group in acc.values():
            c = math.fsum(t.coeff for t in group)
            if c != 0.0:
                out.append(ExpPolyTerm(c, group[0].power, group[0].rate, group[0].multiplier))
        return ExpPolyMixture(out, self.alpha)

    def __add__(self, other):
        if not isinstance(other, ExpPolyMixture):
            return NotImplemented
        alpha = self.alpha if self.alpha == other.alpha else None
        terms = self._terms + other._terms
        if alpha is None:
            terms = tuple(ExpPolyTerm(t.coeff, t.power, t.rate) for t in terms)
        return ExpPolyMixture(terms, alpha).aggregated()

    def __mul__(self, scalar):
        scalar = float(scalar)
        return ExpPolyMixture(
            (ExpPolyTerm(scalar * t.coeff, t.power, t.rate, t.multiplier) for t in self._terms), self.alpha
        )

    __rmul__ = __mul__

    def normalization(self):
        return math.fsum(t.mass for t in self._terms)

    def mean(self):
        return math.fsum(t.mass * (t.power + 1) / t.rate for t in self._terms)

    def pdf(self, gamma):
        g = _as_gamma(gamma)
        out = compensated_sum(t.coeff * g**t.power * np.exp(-t.rate * g) for t in self._terms)
        return _ret(out)

    def cdf(self, gamma):
        g = _as_gamma(gamma)
        out = compensated_sum(t.mass * special.gammainc(t.power + 1, t.rate * g) for t in self._terms)
        return _ret(out)

    def mgf(self, s):
        return mgf(self, s)


def _poly_mul(a, b, budget):
    budget[0] += len(a) * len(b)
    if budget[0] > budget[1]:
        raise ResourceError(f"mixture expansion exceeded {budget[1]} terms before aggregation")
    out = {}
    for (n1, r1), c1 in a.items():
        for (n2, r2), c2 in b.items():
            key = (n1 + n2, r1 + r2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


def _poly_add(*polys):
    out = {}
    for scale, p in polys:
        for k, v in p.items():
            out[k] = out.get(k, 0) + scale * v
    return {k: v for k, v in out.items() if v != 0}


def _poly_diff(p):
    out = {}
    for (n, r), c in p.items():
        if n:
            out[(n - 1, r)] = out.get((n - 1, r), 0) + c * n
        if r:
            out[(n, r)] = out.get((n, r), 0) - c * r
    return {k: v for k, v in out.items() if v != 0}


@functools.lru_cache(maxsize=64)
def _unit_rate_mixture(K, m, antennas, max_terms):
    """Exact rational mixture in the scaled variable x = alpha * gamma.

    Keys are ``(power, rate multiplier)``. The branch survival e^{-x} P(x)
    is squared/cubed and the CDF raised to K-1 by repeated convolution.
    """
    budget = [0, max_terms]
    S = {(i, 1): Fraction(1, math.factorial(i)) for i in range(m)}
    one = {(0, 0): Fraction(1)}
    S2 = _poly_mul(S, S, budget)
    if antennas == 2:
        F = _poly_add((1, one), (-2, S2), (1, _poly_mul(S2, S, budget)))
    else:
        F = _poly_add((1, one), (-1, S2))
    f = _poly_diff(F)
    acc = {k: K * v for k, v in f.items()}
    for _ in range(K - 1):
        acc = _poly_mul(acc, F, budget)
    if any(r == 0 for _, r in acc):
        raise NumericalError("mixture has a non-decaying term; construction is inconsistent")
    total = sum(c * math.factorial(n) / Fraction(r) ** (n + 1) for (n, r), c in acc.items())
    if total != 1:
        raise NumericalError(f"rational mixture does not normalize: integral = {float(total)!r}")
    return tuple(sorted((n, r, c) for (n, r), c in acc.items()))


def sc_pdf_mixture(K, m, alpha, antennas=2, max_terms=DEFAULT_MAX_TERMS):
    """Density of the selection-combined SNR for K i.i.d. branches.

    Every link is Nakagami-m with gamma rate ``alpha``. Coefficients are
    aggregated exactly in rational arithmetic before conversion to floats.
    """
    if K < 1 or m < 1:
        raise ValueError("K and m must be >= 1")
    if antennas not in (1, 2):
        raise ValueError("antennas must be 1 or 2")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    unit = _unit_rate_mixture(int(K), int(m), int(antennas), int(max_terms))
    terms = [ExpPolyTerm(float(c) * alpha ** (n + 1), n, r * alpha, r) for n, r, c in unit]
    mix = ExpPolyMixture(terms, alpha)
    _check_density(mix)
    return mix


def _check_density(mix, tol=1e-9):
    norm = mix.normalization()
    if abs(norm - 1.0) > tol:
        raise NumericalError(f"mixture normalizes to {norm!r}, not 1 (tolerance {tol})")
    scale = 1.0 / min(t.rate for t in mix)
    probe = mix.cdf(scale * np.array([0.01, 0.1, 1.0, 10.0]))
    if np.any(probe < -tol) or np.any(probe > 1 + tol) or np.any(np.diff(probe) < -tol):
        raise NumericalError(f"mixture CDF outside [0, 1] or decreasing at probe points: {probe}")


def sc_mixture_for_config(cfg, max_terms=DEFAULT_MAX_TERMS):
    """Mixture for an i.i.d. config; other configs must go through Monte Carlo."""
    check = validate_config(cfg)
    if not check.is_iid:
        raise UnsupportedError(
            "closed-form SC density needs identical links on every relay; use the Monte-Carlo estimators instead"
        )
    link = check.shared_link
    return sc_pdf_mixture(cfg.K, link.m, link.m / link.omega, cfg.antennas, max_terms)


# -- transforms of the mixture -------------------------------------------------


def mgf(mix, s):
    """E[exp(-s gamma)] for ``s >= 0``; broadcasts over ``s``."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("s must be >= 0")
    parts = (t.coeff * np.exp(math.lgamma(t.power + 1) - (t.power + 1) * np.log(t.rate + s)) for t in mix)
    return _ret(compensated_sum(parts))


@functools.lru_cache(maxsize=None)
def _gauss_legendre(order):
    return np.polynomial.legendre.leggauss(order)


def _mpsk_integral(fn, M, tol=1e-10, start=16, max_order=1 << 14):
    upper = (M - 1) * math.pi / M
    prev = None
    order = start
    while order <= max_order:
        x, w = _gauss_legendre(order)
        theta = 0.5 * upper * (x + 1.0)
        val = 0.5 * upper * float(np.dot(w, fn(theta))) / math.pi
        if prev is not None and abs(val - prev) < tol:
            return val
        prev = val
        order *= 2
    raise NumericalError(f"M-PSK angular integral did not settle to {tol} by order {max_order}")


def sep_mpsk(mix, M):
    """Average M-PSK symbol error probability from the MGF."""
    if M < 2:
        raise ValueError("M must be >= 2")
    g = math.sin(math.pi / M) ** 2
    return _mpsk_integral(lambda th: mgf(mix, g / np.sin(th) ** 2), M)


def avg_capacity(mix, bandwidth=1.0):
    """Average capacity (bits/s) of the two-phase link, (BW/2) E[log2(1 + gamma)]."""
    check_exp_log_integral()
    total = math.fsum(t.coeff * exp_log_integral(t.power, t.rate) for t in mix)
    return bandwidth / (2.0 * math.log(2.0)) * total
