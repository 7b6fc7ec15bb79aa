"""Monte-Carlo estimators used as the independent oracle for the closed forms.

Samples are generated in fixed-size blocks. Block ``i`` draws from its own
PCG64 stream seeded by ``SeedSequence(seed, spawn_key=(i,))``, so the set of
draws depends only on ``(seed, n_samples)``. Blocks may run on any number of
threads and are merged in block order, which keeps results bitwise stable.

Link SNRs are drawn as standard gamma variates and then scaled by each
config's mean SNR. A sweep therefore reuses the same draws at every point
(common random numbers), and each point equals the single-config estimate
exactly.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .channel import validate_config

__all__ = [
    "McEstimate",
    "BLOCK_SIZE",
    "block_rng",
    "draw_branch_snr",
    "conditional_sep_mpsk",
    "simulate_outage",
    "simulate_sep",
    "simulate_capacity",
    "simulate_sweep",
]

BLOCK_SIZE = 1 << 16
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    def within(self, value, n_se=3.0):
        return abs(value - self.mean) <= n_se * self.std_error


def block_rng(seed, index):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _draw_standard(rng, m, size, sampler):
    if sampler == "gamma":
        return rng.standard_gamma(float(m), size)
    if sampler == "expsum":
        return rng.standard_exponential((m, size)).sum(axis=0)
    raise ValueError(f"unknown sampler {sampler!r}")


def _links(cfg, k):
    b = cfg.relays[k]
    return [b.s_to_relay_ant1] + ([b.s_to_relay_ant2] if cfg.antennas == 2 else []) + [b.relay_to_dest]


def _topology(cfg):
    """Per relay, the Nakagami shapes of the links in draw order."""
    return tuple(tuple(lk.m for lk in _links(cfg, k)) for k in range(cfg.K))


def _branch_from_links(links, antennas):
    source = np.maximum(links[0], links[1]) if antennas == 2 else links[0]
    return np.minimum(source, links[-1])


def draw_branch_snr(cfg, k, rng, size=None, sampler="gamma"):
    """Draw min(max(source links), relay link) for relay ``k`` of ``cfg``."""
    n = 1 if size is None else size
    links = _links(cfg, k)
    draws = [_draw_standard(rng, lk.m, n, sampler) * mean / lk.m for lk, mean in zip(links, cfg.link_mean_snrs(k))]
    out = _branch_from_links(draws, cfg.antennas)
    return float(out[0]) if size is None else out


def _sc_snr(cfg, std_draws):
    best = None
    for k, per_link in enumerate(std_draws):
        means = cfg.link_mean_snrs(k)
        m = [lk.m for lk in _links(cfg, k)]
        links = [d * (mu / mk) for d, mu, mk in zip(per_link, means, m)]
        br = _branch_from_links(links, cfg.antennas)
        best = br if best is None else np.maximum(best, br)
    return best


def conditional_sep_mpsk(gamma, M):
    """Exact M-PSK symbol error probability at fixed SNR ``gamma`` (AWGN).

    Substituting t = cot(theta) in the angular integral leaves
    erfc(sqrt(a))/2 + 2 T(sqrt(2a), cot(pi/M)) with a = gamma sin^2(pi/M)
    and T Owen's T function. M = 2 reduces to Q(sqrt(2 gamma)).
    """
    gamma = np.asarray(gamma, dtype=float)
    a = gamma * math.sin(math.pi / M) ** 2
    out = 0.5 * special.erfc(np.sqrt(a))
    if M > 2:
        out = out + 2.0 * special.owens_t(np.sqrt(2.0 * a), 1.0 / math.tan(math.pi / M))
    return float(out) if out.ndim == 0 else out


def _symbol_errors(gamma, M, rng):
    noise = rng.standard_normal((2, gamma.size)) * math.sqrt(0.5)
    phase = np.arctan2(noise[1], np.sqrt(gamma) + noise[0])
    return (np.abs(phase) > math.pi / M).astype(float)


def _stat_fn(quantity, mode="rb", gamma_th=None):
    if quantity == "outage":
        if gamma_th is not None:
            return lambda cfg, g, rng: (g < gamma_th).astype(float)
        return lambda cfg, g, rng: (g < cfg.gamma_th).astype(float)
    if quantity == "sep":
        if mode == "symbol":
            return lambda cfg, g, rng: _symbol_errors(g, cfg.modulation_order, rng)
        if mode != "rb":
            raise ValueError(f"unknown SEP mode {mode!r}")
        return lambda cfg, g, rng: conditional_sep_mpsk(g, cfg.modulation_order)
    if quantity == "capacity":
        return lambda cfg, g, rng: 0.5 * cfg.bandwidth * np.log2(1.0 + g)
    raise ValueError(f"unknown quantity {quantity!r}")


def _block_summaries(cfgs, stat, seed, index, size, sampler):
    rng = block_rng(seed, index)
    shapes = _topology(cfgs[0])
    std_draws = [[_draw_standard(rng, m, size, sampler) for m in relay] for relay in shapes]
    out = []
    for cfg in cfgs:
        vals = stat(cfg, _sc_snr(cfg, std_draws), rng)
        mu = float(np.mean(vals))
        out.append((size, mu, float(np.sum((vals - mu) ** 2))))
    return out


def _merge(a, b):
    na, ma, qa = a
    nb, mb, qb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, qa + qb + delta * delta * na * nb / n


def simulate_sweep(cfgs, quantity, n_samples, seed, workers=1, sampler="gamma", sep_mode="rb", gamma_th=None):
    """Estimate ``quantity`` for several configs sharing one draw set.

    All configs must have the same relay count, antenna count and Nakagami
    shapes; they may differ in powers, mean SNRs, threshold, M or bandwidth.
    ``gamma_th`` overrides the outage threshold of every config and may be 0.
    """
    cfgs = list(cfgs)
    for c in cfgs:
        validate_config(c)
    if any(_topology(c) != _topology(cfgs[0]) or c.antennas != cfgs[0].antennas for c in cfgs):
        raise ValueError("all configs in a sweep must share relay count, antennas and Nakagami shapes")
    n_samples = int(n_samples)
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"n_samples must be >= {MIN_SAMPLES}")
    if gamma_th is not None and not gamma_th >= 0:
        raise ValueError(f"gamma_th must be >= 0, got {gamma_th!r}")
    stat = _stat_fn(quantity, sep_mode, gamma_th)
    n_blocks = -(-n_samples // BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * (n_blocks - 1) + [n_samples - BLOCK_SIZE * (n_blocks - 1)]

    def run(i):
        return _block_summaries(cfgs, stat, seed, i, sizes[i], sampler)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(run, range(n_blocks)))
    else:
        blocks = [run(i) for i in range(n_blocks)]

    results = []
    for j in range(len(cfgs)):
        acc = blocks[0][j]
        for blk in blocks[1:]:
            acc = _merge(acc, blk[j])
        n, mean, q = acc
        se = math.sqrt(q / (n - 1)) / math.sqrt(n)
        results.append(McEstimate(mean, se, n, seed))
    return results


def simulate_outage(cfg, n_samples, seed, gamma_th=None, **kw):
    """Estimate P[gamma_SC < gamma_th]; ``gamma_th`` defaults to ``cfg.gamma_th``."""
    return simulate_sweep([cfg], "outage", n_samples, seed, gamma_th=gamma_th, **kw)[0]


def simulate_sep(cfg, n_samples, seed, mode="rb", **kw):
    """Estimate the M-PSK SEP.

    ``mode="rb"`` averages the exact conditional SEP over SNR draws;
    ``mode="symbol"`` simulates hard symbol decisions instead.
    """
    return simulate_sweep([cfg], "sep", n_samples, seed, sep_mode=mode, **kw)[0]


def simulate_capacity(cfg, n_samples, seed, **kw):
    """Estimate (BW/2) E[log2(1 + gamma_SC)]."""
    return simulate_sweep([cfg], "capacity", n_samples, seed, **kw)[0]
