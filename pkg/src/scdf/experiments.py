"""Result sweeps and analytic-vs-simulation consistency runs.

Tables are lists of dicts with a fixed column order; :func:`write_csv`
renders them with 17 significant digits so reruns are byte-identical.

SNR axis convention: a sweep point at ``x`` dB sets P_s = P_r = 10**(x/10),
so each link's mean SNR is ``omega * 10**(x/10)`` for unit gains and noise.
"""

import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import avg_capacity, outage_probability, sc_mixture_for_config, sep_mpsk
from .channel import db_to_linear, symmetric_preset, validate_config
from .errors import ConfigError, UnsupportedError
from .montecarlo import MIN_SAMPLES, simulate_sweep
from .power import adaptive_split, equal_split, numeric_split, rayleigh_optimal_split

__all__ = [
    "SweepSpec",
    "SWEEP_COLUMNS",
    "run_sweep",
    "PowerComparison",
    "run_power_comparison",
    "AntennaComparison",
    "run_antenna_comparison",
    "consistency_se",
    "run_validation",
    "write_csv",
    "snr_grid",
]

QUANTITIES = ("outage", "sep", "capacity")
SWEEP_COLUMNS = ("snr_db", "method", "value", "std_error", "n_samples", "seed")


def snr_grid(start, stop, step):
    """Inclusive grid start, start+step, ..., stop."""
    n = int(round((stop - start) / step))
    if n < 0 or not math.isclose(start + n * step, stop, abs_tol=1e-9 * max(1.0, abs(stop))):
        raise ConfigError(f"SNR grid {start}:{stop}:{step} does not land on stop", "snr_grid")
    return [start + i * step for i in range(n + 1)]


@dataclass(frozen=True)
class SweepSpec:
    quantity: str
    snr_grid: tuple
    config: object
    methods: tuple = ("analytic", "montecarlo")
    mc_samples: int = 100_000
    seed: int = 0

    def validate(self):
        if self.quantity not in QUANTITIES:
            raise ConfigError(f"quantity must be one of {QUANTITIES}", "quantity")
        grid = np.asarray(self.snr_grid, dtype=float)
        if grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("snr_grid must be non-empty and strictly increasing", "snr_grid")
        bad = set(self.methods) - {"analytic", "montecarlo"}
        if bad or not self.methods:
            raise ConfigError(f"unknown methods {sorted(bad)}", "methods")
        if "montecarlo" in self.methods and self.mc_samples < MIN_SAMPLES:
            raise ConfigError(f"mc_samples must be >= {MIN_SAMPLES}", "mc_samples")
        validate_config(self.config)


def analytic_value(cfg, quantity):
    if quantity == "outage":
        return outage_probability(cfg)
    try:
        mix = sc_mixture_for_config(cfg)
    except UnsupportedError:
        raise UnsupportedError(
            f"analytic {quantity} needs an i.i.d. configuration; request --methods montecarlo instead"
        ) from None
    if quantity == "sep":
        return sep_mpsk(mix, cfg.modulation_order)
    return avg_capacity(mix, cfg.bandwidth)


def run_sweep(spec):
    spec.validate()
    cfgs = [spec.config.at_snr_db(x) for x in spec.snr_grid]
    rows = []
    if "analytic" in spec.methods:
        for x, cfg in zip(spec.snr_grid, cfgs):
            rows.append(dict(snr_db=x, method="analytic", value=analytic_value(cfg, spec.quantity),
                             std_error=None, n_samples=None, seed=None))
    if "montecarlo" in spec.methods:
        ests = simulate_sweep(cfgs, spec.quantity, spec.mc_samples, spec.seed)
        for x, e in zip(spec.snr_grid, ests):
            rows.append(dict(snr_db=x, method="montecarlo", value=e.mean, std_error=e.std_error,
                             n_samples=e.n_samples, seed=e.seed))
    rows.sort(key=lambda r: (r["snr_db"], r["method"]))
    return rows


# -- power allocation comparison ------------------------------------------------

POWER_COLUMNS = ("p_tot_db", "p_tot", "equal", "adaptive", "numeric", "cubic",
                 "ps_adaptive", "ps_numeric", "ps_cubic", "saving_db")


@dataclass
class PowerComparison:
    rows: list
    max_saving_db: float
    notes: list = field(default_factory=list)


def _horizontal_gap(x_db, ref_outage, new_outage):
    """dB by which the ``new`` curve reaches each outage level earlier than ``ref``.

    Log-outage of the reference curve is linearly interpolated against dB;
    points outside its range get nan.
    """
    ly = np.log10(np.asarray(ref_outage))
    if np.any(np.diff(ly) >= 0):
        return [math.nan] * len(ly)
    xs = np.asarray(x_db, dtype=float)
    out = []
    for x, y in zip(xs, np.log10(np.asarray(new_outage))):
        if not ly[-1] <= y <= ly[0]:
            out.append(math.nan)
            continue
        out.append(float(np.interp(y, ly[::-1], xs[::-1])) - x)
    return out


def _is_rayleigh(cfg):
    return all(lk.m == 1 for b in cfg.relays for lk in (b.s_to_relay_ant1, b.s_to_relay_ant2, b.relay_to_dest)
               if lk is not None)


def run_power_comparison(config, p_tot_db_grid):
    """Exact outage under each power split, one row per total power (dB)."""
    validate_config(config)
    rows, notes = [], []
    with_cubic = _is_rayleigh(config) and config.antennas == 2
    for x in p_tot_db_grid:
        p = db_to_linear(x)
        eq = equal_split(config, p)
        num = numeric_split(config, p)
        try:
            ad = adaptive_split(config, p)
        except ConfigError as exc:
            ad = None
            notes.append(f"adaptive omitted: {exc}")
        cub = rayleigh_optimal_split(config, p) if with_cubic else None
        if num.note != "golden-section":
            notes.append(f"{x} dB: {num.note}")
        rows.append(dict(
            p_tot_db=x, p_tot=p, equal=eq.objective_value,
            adaptive=ad.objective_value if ad else None,
            numeric=num.objective_value,
            cubic=cub.objective_value if cub else None,
            ps_adaptive=ad.p_source if ad else None,
            ps_numeric=num.p_source,
            ps_cubic=cub.p_source if cub else None,
        ))
    gaps = _horizontal_gap([r["p_tot_db"] for r in rows], [r["equal"] for r in rows], [r["numeric"] for r in rows])
    for r, g in zip(rows, gaps):
        r["saving_db"] = None if math.isnan(g) else g
    finite = [g for g in gaps if not math.isnan(g)]
    return PowerComparison(rows, max(finite) if finite else math.nan, notes)


# -- antenna count comparison -------------------------------------------------------

ANTENNA_CASES = tuple((k, a) for k in range(1, 6) for a in (1, 2))


@dataclass
class AntennaComparison:
    rows: list
    beats_ranges: list  # contiguous (start_db, stop_db) where (4, 2) outage < (5, 1) outage


def _contiguous(xs, mask):
    out, start = [], None
    for x, flag in zip(xs, mask):
        if flag and start is None:
            start = x
        if not flag and start is not None:
            out.append((start, prev))
            start = None
        prev = x
    if start is not None:
        out.append((start, xs[-1]))
    return out


def run_antenna_comparison(p_tot=2.0, snr_grid_db=tuple(range(0, 21, 2)), template=None):
    """Outage for every (K, antennas) pair with K <= 5.

    ``template`` supplies the per-relay link statistics (default: m = 2,
    Omega = 3 on every link). At each SNR point the power
    ``p_tot * 10**(x/10)`` is split equally between source and relay.
    """
    base = template or symmetric_preset(K=1)
    relay = base.relays[0]
    if relay.s_to_relay_ant2 is None:
        relay = replace(relay, s_to_relay_ant2=relay.s_to_relay_ant1)
    rows = []
    for x in snr_grid_db:
        p = 0.5 * p_tot * db_to_linear(x)
        row = dict(snr_db=x)
        for k, a in ANTENNA_CASES:
            r = relay if a == 2 else replace(relay, s_to_relay_ant2=None)
            cfg = replace(base, relays=(r,) * k, antennas=a, p_source=p, p_relay=p)
            row[f"K{k}_ant{a}"] = outage_probability(cfg)
        rows.append(row)
    mask = [r["K4_ant2"] < r["K5_ant1"] for r in rows]
    return AntennaComparison(rows, _contiguous([r["snr_db"] for r in rows], mask))


# -- consistency suite ---------------------------------------------------------------

VALIDATION_COLUMNS = ("case", "quantity", "snr_db", "analytic", "mc_mean", "mc_std_error", "z", "pass")


def consistency_se(quantity, analytic, est):
    """Standard error used for the 3-sigma analytic-vs-simulation check.

    For outage the binomial error at the analytic probability is a floor:
    with rare events the sample error can be exactly zero.
    """
    se = est.std_error
    if quantity == "outage":
        se = max(se, math.sqrt(analytic * (1.0 - analytic) / est.n_samples))
    return se


def run_validation(cases, snr_grid_db, mc_samples, seed, quantities=QUANTITIES, n_se=3.0):
    """Compare closed forms with simulation for each ``(name, config)`` case.

    SEP and capacity rows are produced only for i.i.d. configs.
    """
    rows = []
    for name, cfg in cases:
        iid = validate_config(cfg.at_snr_db(snr_grid_db[0])).is_iid
        for q in quantities:
            if q != "outage" and not iid:
                continue
            cfgs = [cfg.at_snr_db(x) for x in snr_grid_db]
            ests = simulate_sweep(cfgs, q, mc_samples, seed)
            for x, c, e in zip(snr_grid_db, cfgs, ests):
                a = analytic_value(c, q)
                se = consistency_se(q, a, e)
                z = 0.0 if a == e.mean else (e.mean - a) / se if se > 0 else math.inf
                rows.append(dict(case=name, quantity=q, snr_db=x, analytic=a, mc_mean=e.mean,
                                 mc_std_error=e.std_error, z=z, **{"pass": abs(z) <= n_se}))
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(rows, columns, out=None):
    """Render ``rows`` as CSV; writes to the file object ``out`` or returns a string."""
    buf = out if out is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    if out is None:
        return buf.getvalue()
    return None
