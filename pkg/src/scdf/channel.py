"""Relay topology description and reduction to per-link gamma rates.

A link's instantaneous SNR is Gamma(m, mean/m). Its mean is
``omega * power * mean_sq_gain / noise_var``: ``omega`` carries the
statistical (m, Omega) parameterization and the remaining factors the
physical one. With unit gains and noise, ``omega`` is the mean SNR at unit
transmit power.
"""

import math
import numbers
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import ConfigError

__all__ = [
    "LinkParams",
    "BranchParams",
    "SystemConfig",
    "IidCheck",
    "link_rate",
    "validate_config",
    "symmetric_preset",
    "asymmetric_preset",
    "config_from_dict",
    "config_to_dict",
    "db_to_linear",
]


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class LinkParams:
    m: int
    omega: float = 1.0


@dataclass(frozen=True)
class BranchParams:
    s_to_relay_ant1: LinkParams
    s_to_relay_ant2: Optional[LinkParams]
    relay_to_dest: LinkParams
    relay_noise_var: float = 1.0
    dest_noise_var: float = 1.0
    mean_sq_gains: tuple = (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class SystemConfig:
    relays: tuple
    antennas: int = 2
    p_source: float = 1.0
    p_relay: float = 1.0
    gamma_th: float = 3.0
    modulation_order: int = 16
    bandwidth: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "relays", tuple(self.relays))

    @property
    def K(self):
        return len(self.relays)

    def with_powers(self, p_source, p_relay):
        return replace(self, p_source=p_source, p_relay=p_relay)

    def at_snr_db(self, snr_db):
        """Equal source/relay power of 10**(snr_db/10)."""
        p = db_to_linear(snr_db)
        return replace(self, p_source=p, p_relay=p)

    def link_mean_snrs(self, k):
        """Mean SNRs of the links used by relay ``k`` (2 or 3 values)."""
        b = self.relays[k]
        g1, g2, g3 = b.mean_sq_gains
        out = [b.s_to_relay_ant1.omega * self.p_source * g1 / b.relay_noise_var]
        if self.antennas == 2:
            out.append(b.s_to_relay_ant2.omega * self.p_source * g2 / b.relay_noise_var)
        out.append(b.relay_to_dest.omega * self.p_relay * g3 / b.dest_noise_var)
        return tuple(out)

    def branch_links(self, k):
        """``((m, rate), ...)`` for relay ``k``; the last entry is the relay->destination link."""
        b = self.relays[k]
        links = [b.s_to_relay_ant1]
        if self.antennas == 2:
            links.append(b.s_to_relay_ant2)
        links.append(b.relay_to_dest)
        return tuple((lk.m, lk.m / mean) for lk, mean in zip(links, self.link_mean_snrs(k)))


@dataclass(frozen=True)
class IidCheck:
    is_iid: bool
    shared_link: Optional[LinkParams] = field(default=None)


def link_rate(link, power=1.0, noise_var=1.0, mean_sq_gain=1.0):
    """Gamma rate ``m / mean_snr`` of a link's instantaneous SNR."""
    return link.m / (link.omega * power * mean_sq_gain / noise_var)


def _positive(value, name, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{name} must be a real number, got {value!r}", name)
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        raise ConfigError(f"{name} must be {'non-negative' if allow_zero else 'positive'}, got {value!r}", name)


def _check_link(link, name):
    if not isinstance(link, LinkParams):
        raise ConfigError(f"{name} must be a LinkParams, got {type(link).__name__}", name)
    m = link.m
    if isinstance(m, bool) or not isinstance(m, numbers.Integral):
        raise ConfigError(f"{name}.m must be a positive integer, got {m!r}", f"{name}.m")
    if m < 1:
        raise ConfigError(f"{name}.m must be >= 1, got {m!r}", f"{name}.m")
    _positive(link.omega, f"{name}.omega")


def validate_config(cfg):
    """Check every numeric invariant and report whether the i.i.d. closed forms apply.

    The i.i.d. path requires every used link of every relay to share the same
    Nakagami shape and the same rate at the configured powers.
    """
    if cfg.antennas not in (1, 2) or isinstance(cfg.antennas, bool):
        raise ConfigError(f"antennas must be 1 or 2, got {cfg.antennas!r}", "antennas")
    if cfg.K < 1:
        raise ConfigError("at least one relay is required", "relays")
    _positive(cfg.p_source, "p_source")
    _positive(cfg.p_relay, "p_relay")
    _positive(cfg.gamma_th, "gamma_th")
    _positive(cfg.bandwidth, "bandwidth", allow_zero=True)
    M = cfg.modulation_order
    if isinstance(M, bool) or not isinstance(M, numbers.Integral) or M < 2 or M & (M - 1):
        raise ConfigError(f"modulation_order must be a power of 2 >= 2, got {M!r}", "modulation_order")

    for k, b in enumerate(cfg.relays):
        pre = f"relays[{k}]"
        if not isinstance(b, BranchParams):
            raise ConfigError(f"{pre} must be a BranchParams", pre)
        _check_link(b.s_to_relay_ant1, f"{pre}.s_to_relay_ant1")
        if cfg.antennas == 2:
            if b.s_to_relay_ant2 is None:
                raise ConfigError(f"{pre}.s_to_relay_ant2 is required with 2 antennas", f"{pre}.s_to_relay_ant2")
            _check_link(b.s_to_relay_ant2, f"{pre}.s_to_relay_ant2")
        _check_link(b.relay_to_dest, f"{pre}.relay_to_dest")
        _positive(b.relay_noise_var, f"{pre}.relay_noise_var")
        _positive(b.dest_noise_var, f"{pre}.dest_noise_var")
        if len(b.mean_sq_gains) != 3:
            raise ConfigError(f"{pre}.mean_sq_gains needs three entries", f"{pre}.mean_sq_gains")
        for i, g in enumerate(b.mean_sq_gains):
            _positive(g, f"{pre}.mean_sq_gains[{i}]")

    links = [lk for k in range(cfg.K) for lk in cfg.branch_links(k)]
    m0, r0 = links[0]
    iid = all(m == m0 and math.isclose(r, r0, rel_tol=1e-12) for m, r in links)
    return IidCheck(True, LinkParams(m0, m0 / r0)) if iid else IidCheck(False)


def symmetric_preset(K=3, m=2, omega=3.0, antennas=2, **kwargs):
    """Identical relays, every link Nakagami-m with scale ``omega``."""
    link = LinkParams(m, omega)
    relay = BranchParams(link, link if antennas == 2 else None, link)
    kwargs.setdefault("gamma_th", 3.0)
    kwargs.setdefault("modulation_order", 16)
    return SystemConfig((relay,) * K, antennas=antennas, **kwargs)


def asymmetric_preset(antennas=2, rayleigh=False, **kwargs):
    """Three relays: relay k has source links m = Omega = k and relay link m = Omega = 4 - k.

    ``rayleigh=True`` keeps the Omega values and sets every m to 1.
    """
    relays = []
    for k in (1, 2, 3):
        src = LinkParams(1 if rayleigh else k, float(k))
        dst = LinkParams(1 if rayleigh else 4 - k, float(4 - k))
        relays.append(BranchParams(src, src if antennas == 2 else None, dst))
    kwargs.setdefault("gamma_th", 3.0)
    kwargs.setdefault("modulation_order", 16)
    return SystemConfig(tuple(relays), antennas=antennas, **kwargs)


_LINK_KEYS = ("s_to_relay_ant1", "s_to_relay_ant2", "relay_to_dest")
_SCALAR_KEYS = ("antennas", "p_source", "p_relay", "gamma_th", "modulation_order", "bandwidth")


def _link_from(d, name):
    if not isinstance(d, dict) or "m" not in d:
        raise ConfigError(f"{name} must be a mapping with keys m and omega", name)
    m = d["m"]
    if isinstance(m, float) and m.is_integer():
        m = int(m)
    if isinstance(m, bool) or not isinstance(m, numbers.Integral):
        raise ConfigError(f"{name}.m must be a positive integer, got {m!r}", f"{name}.m")
    unknown = set(d) - {"m", "omega"}
    if unknown:
        raise ConfigError(f"unknown keys in {name}: {sorted(unknown)}", name)
    return LinkParams(int(m), d.get("omega", 1.0))


def config_from_dict(d):
    """Build and validate a SystemConfig from a plain mapping (parsed config file)."""
    if not isinstance(d, dict):
        raise ConfigError("config must be a mapping", "<root>")
    unknown = set(d) - set(_SCALAR_KEYS) - {"relays"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}", sorted(unknown)[0])
    relays_in = d.get("relays")
    if not isinstance(relays_in, list) or not relays_in:
        raise ConfigError("relays must be a non-empty list", "relays")
    antennas = d.get("antennas", 2)
    relays = []
    for k, r in enumerate(relays_in):
        pre = f"relays[{k}]"
        if not isinstance(r, dict):
            raise ConfigError(f"{pre} must be a mapping", pre)
        links = {}
        for key in _LINK_KEYS:
            if r.get(key) is None:
                if key == "s_to_relay_ant2" and antennas == 1:
                    links[key] = None
                    continue
                raise ConfigError(f"{pre}.{key} is required", f"{pre}.{key}")
            links[key] = _link_from(r[key], f"{pre}.{key}")
        relays.append(
            BranchParams(
                links["s_to_relay_ant1"],
                links["s_to_relay_ant2"],
                links["relay_to_dest"],
                relay_noise_var=r.get("relay_noise_var", 1.0),
                dest_noise_var=r.get("dest_noise_var", 1.0),
                mean_sq_gains=tuple(r.get("mean_sq_gains", (1.0, 1.0, 1.0))),
            )
        )
    scalars = {k: d[k] for k in _SCALAR_KEYS if k in d}
    cfg = SystemConfig(tuple(relays), **scalars)
    validate_config(cfg)
    return cfg


def config_to_dict(cfg):
    out = {k: getattr(cfg, k) for k in _SCALAR_KEYS}
    relays = []
    for b in cfg.relays:
        r = {}
        for key in _LINK_KEYS:
            lk = getattr(b, key)
            if lk is not None:
                r[key] = {"m": int(lk.m), "omega": float(lk.omega)}
        r["relay_noise_var"] = float(b.relay_noise_var)
        r["dest_noise_var"] = float(b.dest_noise_var)
        r["mean_sq_gains"] = [float(g) for g in b.mean_sq_gains]
        relays.append(r)
    out["relays"] = relays
    return out
