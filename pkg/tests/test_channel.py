import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scdf.channel import (
    BranchParams,
    LinkParams,
    SystemConfig,
    asymmetric_preset,
    config_from_dict,
    config_to_dict,
    link_rate,
    symmetric_preset,
    validate_config,
)
from scdf.errors import ConfigError


def test_link_rate_examples():
    assert link_rate(LinkParams(1, 1.0)) == 1.0
    assert link_rate(LinkParams(2, 3.0)) == pytest.approx(2 / 3)
    assert link_rate(LinkParams(2, 3.0), power=2.0) == pytest.approx(1 / 3)


@given(st.integers(1, 8), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_link_rate_homogeneous_in_power(m, omega, power, noise, gain):
    link = LinkParams(m, omega)
    r1 = link_rate(link, power, noise, gain)
    r2 = link_rate(link, 2 * power, noise, gain)
    assert r2 == pytest.approx(r1 / 2, rel=1e-15)


def test_symmetric_preset_is_iid():
    check = validate_config(symmetric_preset(K=3, m=2, omega=3.0))
    assert check.is_iid
    assert check.shared_link == LinkParams(2, 3.0)


def test_asymmetric_preset_is_not_iid():
    cfg = asymmetric_preset()
    assert not validate_config(cfg).is_iid
    first = cfg.relays[0]
    assert (first.s_to_relay_ant1.m, first.s_to_relay_ant1.omega) == (1, 1.0)
    assert (first.relay_to_dest.m, first.relay_to_dest.omega) == (3, 3.0)


def test_unequal_powers_break_iid():
    cfg = symmetric_preset().with_powers(1.0, 2.0)
    assert not validate_config(cfg).is_iid


def test_empty_relay_set_rejected():
    with pytest.raises(ConfigError) as exc:
        validate_config(SystemConfig(()))
    assert exc.value.field == "relays"


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda c: replace(c, antennas=3), "antennas"),
        (lambda c: replace(c, gamma_th=0.0), "gamma_th"),
        (lambda c: replace(c, p_source=-1.0), "p_source"),
        (lambda c: replace(c, modulation_order=12), "modulation_order"),
        (lambda c: replace(c, relays=(replace(c.relays[0], relay_to_dest=LinkParams(2.5, 1.0)),)), "relays[0].relay_to_dest.m"),
        (lambda c: replace(c, relays=(replace(c.relays[0], s_to_relay_ant2=None),)), "relays[0].s_to_relay_ant2"),
        (lambda c: replace(c, relays=(replace(c.relays[0], dest_noise_var=0.0),)), "relays[0].dest_noise_var"),
    ],
)
def test_validation_names_offending_field(mutate, field):
    with pytest.raises(ConfigError) as exc:
        validate_config(mutate(symmetric_preset(K=1)))
    assert exc.value.field == field


links = st.builds(LinkParams, st.integers(-1, 4), st.floats(-1.0, 10.0, allow_nan=False))


@given(
    st.lists(st.tuples(links, links, links, st.floats(-0.5, 3.0), st.floats(-0.5, 3.0)), min_size=0, max_size=3),
    st.sampled_from([0, 1, 2]),
    st.floats(-1.0, 5.0),
    st.sampled_from([1, 2, 4, 6, 16]),
)
def test_validate_config_iff_invariants(relays, antennas, gamma_th, M):
    cfg = SystemConfig(
        tuple(BranchParams(a, b, c, rn, dn) for a, b, c, rn, dn in relays),
        antennas=antennas,
        gamma_th=gamma_th,
        modulation_order=M,
    )
    used = [(a, c) + ((b,) if antennas == 2 else ()) for a, b, c, _, _ in relays]
    ok = (
        len(relays) >= 1
        and antennas in (1, 2)
        and gamma_th > 0
        and M in (2, 4, 16)
        and all(lk.m >= 1 and lk.omega > 0 for group in used for lk in group)
        and all(rn > 0 and dn > 0 for *_, rn, dn in relays)
    )
    if ok:
        validate_config(cfg)
    else:
        with pytest.raises(ConfigError):
            validate_config(cfg)


def test_config_dict_roundtrip():
    for cfg in (symmetric_preset(), asymmetric_preset(antennas=1), asymmetric_preset(rayleigh=True)):
        assert config_from_dict(config_to_dict(cfg)) == cfg


def test_non_integer_m_rejected_at_parse():
    d = config_to_dict(symmetric_preset(K=1))
    d["relays"][0]["relay_to_dest"]["m"] = 1.5
    with pytest.raises(ConfigError) as exc:
        config_from_dict(d)
    assert exc.value.field == "relays[0].relay_to_dest.m"
    d["relays"][0]["relay_to_dest"]["m"] = 2.0
    assert config_from_dict(d).relays[0].relay_to_dest.m == 2


def test_unknown_keys_rejected():
    d = config_to_dict(symmetric_preset(K=1))
    d["snr"] = 3
    with pytest.raises(ConfigError):
        config_from_dict(d)


def test_at_snr_db_scales_mean_snr():
    cfg = symmetric_preset(K=1).at_snr_db(10.0)
    assert cfg.link_mean_snrs(0) == pytest.approx((30.0, 30.0, 30.0))
    m, rate = cfg.branch_links(0)[0]
    assert rate == pytest.approx(2 / 30)


def test_relay_link_uses_relay_power():
    cfg = symmetric_preset(K=1).with_powers(1.0, 4.0)
    g1, g2, g3 = cfg.link_mean_snrs(0)
    assert (g1, g2) == (3.0, 3.0)
    assert g3 == 12.0
    assert math.isclose(cfg.branch_links(0)[2][1], 2 / 12)
