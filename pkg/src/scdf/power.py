"""Source/relay power splits that minimize outage under a total-power budget.

Four splits are offered: equal, adaptive (a fixed heuristic from link
statistics), numeric (scalar search on the exact outage) and, for Rayleigh
links, the KKT stationary point of the small-threshold surrogate

    sum_k log(a_k / P_r + b_k / P_s^2 - c_k / (P_s^2 P_r)),   c_k = a_k b_k.

With identical relays the stationarity condition is the cubic
P_s^3 + h1 P_s^2 + h2 P_s + h3 = 0 solved by Cardano's formulas. With
heterogeneous relays the same condition becomes a higher-degree polynomial
whose real roots are taken numerically.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytic import branch_cdf, branch_distribution
from .channel import validate_config
from .errors import ConfigError, InfeasibleError, UnsupportedError

__all__ = [
    "PowerSplit",
    "CubicCoefficients",
    "CubicSolution",
    "ApproximationWarning",
    "equal_split",
    "adaptive_split",
    "numeric_split",
    "log_outage",
    "approx_outage_rayleigh",
    "rayleigh_coefficients",
    "rayleigh_surrogate",
    "cubic_coefficients",
    "solve_cubic",
    "rayleigh_optimal_split",
    "golden_section",
]

BOUNDARY_MARGIN = 1e-9


class ApproximationWarning(UserWarning):
    """The small-threshold outage surrogate left [0, 1] at this operating point."""


@dataclass(frozen=True)
class PowerSplit:
    p_source: float
    p_relay: float
    method: str
    objective_value: float
    p_tot: float
    note: str = ""


def _make_split(cfg, p_tot, p_source, method, note=""):
    p_source = float(p_source)
    p_relay = p_tot - p_source
    if not (p_source > 0 and p_relay > 0):
        raise InfeasibleError(f"{method} split ({p_source}, {p_relay}) is not strictly positive")
    value = math.exp(log_outage(cfg.with_powers(p_source, p_relay)))
    return PowerSplit(p_source, p_relay, method, value, p_tot, note)


def log_outage(cfg):
    """log of the exact outage probability; stays finite where the product underflows."""
    return math.fsum(math.log(branch_cdf(branch_distribution(cfg, k), cfg.gamma_th)) for k in range(cfg.K))


def equal_split(cfg, p_tot):
    validate_config(cfg)
    return _make_split(cfg, p_tot, 0.5 * p_tot, "equal")


def adaptive_split(cfg, p_tot):
    """Heuristic split weighting antennas, link scales and Nakagami shapes.

    Each relay proposes a source fraction; the split uses their mean.
    """
    validate_config(cfg)
    fractions = []
    for k, b in enumerate(cfg.relays):
        src, dst = b.s_to_relay_ant1, b.relay_to_dest
        g1, g2, g3 = b.mean_sq_gains
        omega_s = src.omega * g1 / b.relay_noise_var
        if cfg.antennas == 2:
            other = b.s_to_relay_ant2
            if other.m != src.m or not math.isclose(other.omega * g2, src.omega * g1, rel_tol=1e-12):
                raise ConfigError(
                    f"adaptive split needs identical source links at relay {k}", f"relays[{k}].s_to_relay_ant2"
                )
        omega_d = dst.omega * g3 / b.dest_noise_var
        frac = (1.0 / (cfg.antennas + 1) + omega_d / (omega_s + omega_d) + src.m / (src.m + dst.m)) / 3.0
        fractions.append(frac)
    return _make_split(cfg, p_tot, p_tot * math.fsum(fractions) / len(fractions), "adaptive")


def golden_section(f, lo, hi, xtol):
    """Minimize a unimodal ``f`` on [lo, hi]; returns (x, f(x))."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > xtol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _local_minima(values):
    v = np.asarray(values)
    inner = (v[1:-1] < v[:-2]) & (v[1:-1] <= v[2:])
    count = int(np.sum(inner))
    count += int(v[0] < v[1]) + int(v[-1] < v[-2])
    return count


def numeric_split(cfg, p_tot, tol=1e-9, grid=201, fallback_grid=4001):
    """Minimize the exact outage over P_s in (0, P_tot).

    A coarse grid brackets the minimum, then golden-section search refines
    log-outage to ``tol * p_tot``. If the grid shows several local minima
    the search falls back to a dense grid and the result is flagged.
    """
    validate_config(cfg)
    if not tol > 0:
        raise ValueError("tol must be positive")
    eps = BOUNDARY_MARGIN * p_tot

    def obj(x):
        return log_outage(cfg.with_powers(x, p_tot - x))

    note = "golden-section"
    xs = np.linspace(eps, p_tot - eps, grid)
    vals = np.array([obj(x) for x in xs])
    if _local_minima(vals) > 1:
        note = "grid-fallback: objective not unimodal on the coarse grid"
        xs = np.linspace(eps, p_tot - eps, fallback_grid)
        vals = np.array([obj(x) for x in xs])
    i = int(np.argmin(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    x, fx = golden_section(obj, lo, hi, tol * p_tot)
    if fx > vals[i]:
        x, fx = xs[i], vals[i]
    f_equal = obj(0.5 * p_tot)
    if fx > f_equal:
        x = 0.5 * p_tot
    return _make_split(cfg, p_tot, x, "numeric", note)


# -- Rayleigh surrogate -----------------------------------------------------------


def _require_rayleigh(cfg):
    validate_config(cfg)
    for k, b in enumerate(cfg.relays):
        links = [b.s_to_relay_ant1, b.relay_to_dest] + ([b.s_to_relay_ant2] if cfg.antennas == 2 else [])
        if any(lk.m != 1 for lk in links):
            raise ConfigError(f"Rayleigh surrogate needs m = 1 on every link (relay {k})", f"relays[{k}]")


def approx_outage_rayleigh(cfg, gamma_th=None):
    """First-order surrogate of the Rayleigh outage, prod_k (beta g + alpha eta g^2 - alpha eta beta g^3).

    With one antenna the per-branch factor is alpha g + beta g - alpha beta g^2.
    Warns with :class:`ApproximationWarning` if a factor leaves [0, 1].
    """
    _require_rayleigh(cfg)
    g = cfg.gamma_th if gamma_th is None else gamma_th
    out = 1.0
    for k in range(cfg.K):
        rates = [r for _, r in cfg.branch_links(k)]
        if cfg.antennas == 2:
            alpha, eta, beta = rates
            f = beta * g + alpha * eta * g**2 - alpha * eta * beta * g**3
        else:
            alpha, beta = rates
            f = alpha * g + beta * g - alpha * beta * g**2
        if not 0.0 <= f <= 1.0:
            warnings.warn(f"surrogate branch outage {f:.4g} outside [0, 1] at relay {k}", ApproximationWarning, stacklevel=2)
        out *= f
    return out


def rayleigh_coefficients(cfg, k):
    """(a, b, c) of relay ``k`` so the surrogate reads a/P_r + b/P_s^2 - c/(P_s^2 P_r)."""
    b_ = cfg.relays[k]
    g1, g2, g3 = b_.mean_sq_gains
    th = cfg.gamma_th
    a = b_.dest_noise_var * th / (g3 * b_.relay_to_dest.omega)
    b = b_.relay_noise_var**2 * th**2 / (g1 * b_.s_to_relay_ant1.omega * g2 * b_.s_to_relay_ant2.omega)
    return a, b, a * b


def rayleigh_surrogate(cfg, p_source, p_relay):
    """sum_k log of the surrogate branch outage; nan where a factor is non-positive."""
    total = []
    for k in range(cfg.K):
        a, b, c = rayleigh_coefficients(cfg, k)
        v = a / p_relay + b / p_source**2 - c / (p_source**2 * p_relay)
        if v <= 0:
            return math.nan
        total.append(math.log(v))
    return math.fsum(total)


@dataclass(frozen=True)
class CubicCoefficients:
    h1: float
    h2: float
    h3: float
    a: Optional[float] = None
    b: Optional[float] = None
    c: Optional[float] = None
    p_tot: Optional[float] = None

    def residual(self, x):
        return ((x + self.h1) * x + self.h2) * x + self.h3


@dataclass(frozen=True)
class CubicSolution:
    Q: float
    R: float
    D: float
    S: Optional[float]
    T: Optional[float]
    theta: Optional[float]
    roots: tuple
    reference_root: float
    selected_root: Optional[float] = None


def cubic_coefficients(a, b, c, p_tot):
    """Monic cubic whose positive root is the optimal P_s for one relay class."""
    if not (a > 0 and b > 0 and c > 0):
        raise ValueError("a, b, c must be positive")
    return CubicCoefficients(
        -2.0 * b / a,
        (4.0 * b * p_tot - 3.0 * c) / a,
        (2.0 * c * p_tot - 2.0 * b * p_tot**2) / a,
        a,
        b,
        c,
        p_tot,
    )


def _polish(h, r, steps=3):
    best, best_res = r, abs(h.residual(r))
    for _ in range(steps):
        d = (3.0 * best + 2.0 * h.h1) * best + h.h2
        if d == 0.0:
            break
        cand = best - h.residual(best) / d
        res = abs(h.residual(cand))
        if not res < best_res:
            break
        best, best_res = cand, res
    return best


def solve_cubic(h):
    """Real roots of x^3 + h1 x^2 + h2 x + h3 by Cardano / trigonometric formulas.

    ``h`` is a :class:`CubicCoefficients` or an ``(h1, h2, h3)`` triple. When it
    carries (a, b, c, P_tot) the feasible root in (0, P_tot) with the smallest
    surrogate objective is selected; none feasible raises InfeasibleError.
    Each root gets a few Newton steps, kept only while the residual shrinks.
    ``reference_root`` is S + T - h1/3 when D >= 0 and the (theta + 4 pi)/3
    branch otherwise, reported for comparison with ``selected_root``.
    """
    if not isinstance(h, CubicCoefficients):
        h = CubicCoefficients(*map(float, h))
    h1, h2, h3 = h.h1, h.h2, h.h3
    Q = (3.0 * h2 - h1 * h1) / 9.0
    R = (9.0 * h1 * h2 - 27.0 * h3 - 2.0 * h1**3) / 54.0
    D = Q**3 + R * R
    shift = h1 / 3.0
    S = T = theta = None
    if D >= 0:
        sq = math.sqrt(D)
        S = float(np.cbrt(R + sq))
        T = float(np.cbrt(R - sq))
        roots = [S + T - shift]
        if D == 0 and S != 0:
            roots.append(-0.5 * (S + T) - shift)
        reference_root = roots[0]
    else:
        rad = math.sqrt(-Q)
        theta = math.acos(max(-1.0, min(1.0, R / math.sqrt(-(Q**3)))))
        roots = [2.0 * rad * math.cos((theta + 2.0 * math.pi * j) / 3.0) - shift for j in range(3)]
        reference_root = roots[2]
    roots = tuple(_polish(h, r) for r in roots)
    reference_root = _polish(h, reference_root)

    selected = None
    if h.p_tot is not None:
        p = h.p_tot
        best = None
        for r in roots:
            if not 0.0 < r < p:
                continue
            v = h.a / (p - r) + h.b / r**2 - h.c / (r**2 * (p - r))
            if v > 0 and (best is None or v < best[1]):
                best = (r, v)
        if best is None:
            raise InfeasibleError(f"no cubic root in (0, {p}) with positive surrogate; use numeric_split")
        selected = best[0]
    return CubicSolution(Q, R, D, S, T, theta, roots, reference_root, selected)


def _stationary_points(coeffs, p_tot):
    """Real stationary points in (0, P_tot) of sum_k log N_k(x) - K (2 log x + log(P - x)).

    N_k(x) = a_k x^2 + b_k (P - x) - c_k is the surrogate times x^2 (P - x).
    """
    P = np.polynomial.Polynomial
    x = P([0.0, 1.0])
    rest = p_tot - x
    Ns = [a * x**2 + b * rest - c for a, b, c in coeffs]
    prod = P([1.0])
    for n in Ns:
        prod = prod * n
    lhs = P([0.0])
    for i, n in enumerate(Ns):
        others = P([1.0])
        for j, m in enumerate(Ns):
            if j != i:
                others = others * m
        lhs = lhs + n.deriv() * others
    stationary = x * rest * lhs - len(Ns) * (2.0 * rest - x) * prod
    out = []
    scale = max(1.0, p_tot)
    for r in stationary.roots():
        if abs(r.imag) > 1e-7 * scale:
            continue
        r = r.real
        if not 0.0 < r < p_tot:
            continue
        d = stationary.deriv()
        for _ in range(3):
            dv = d(r)
            if dv == 0.0:
                break
            step = stationary(r) / dv
            if not 0.0 < r - step < p_tot:
                break
            r -= step
        out.append(float(r))
    return out


def rayleigh_optimal_split(cfg, p_tot):
    """Closed-form KKT split for Rayleigh links with two receive antennas.

    Identical relays use the Cardano cubic; heterogeneous relays solve the
    summed stationarity polynomial. The chosen P_s minimizes the surrogate.
    """
    _require_rayleigh(cfg)
    if cfg.antennas != 2:
        raise UnsupportedError("the KKT cubic is derived for two receive antennas; use numeric_split")
    coeffs = [rayleigh_coefficients(cfg, k) for k in range(cfg.K)]
    identical = all(all(math.isclose(u, v, rel_tol=1e-12) for u, v in zip(c, coeffs[0])) for c in coeffs)
    if identical:
        sol = solve_cubic(cubic_coefficients(*coeffs[0], p_tot))
        return _make_split(cfg, p_tot, sol.selected_root, "cubic", "cardano")

    candidates = []
    for r in _stationary_points(coeffs, p_tot):
        v = rayleigh_surrogate(cfg, r, p_tot - r)
        if not math.isnan(v):
            candidates.append((v, r))
    if not candidates:
        raise InfeasibleError("surrogate has no feasible stationary point in (0, P_tot); use numeric_split")
    return _make_split(cfg, p_tot, min(candidates)[1], "cubic", "stationarity-polynomial")
