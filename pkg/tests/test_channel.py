import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ris_secrecy.channel import (ChannelSet, FadingParams, LinkBudget, cascade, dbm_to_watts,
                                 draw_channels, effective_miso_channel, f_factors, link_distances,
                                 objective_F, objective_F_quadratic, path_gain, sample_rician,
                                 secrecy_rate, secrecy_rate_factored, snr_pair)


def test_dbm_conversion():
    assert dbm_to_watts(30.0) == 1.0
    assert math.isclose(dbm_to_watts(10.0), 0.01)
    assert math.isclose(dbm_to_watts(-40.0), 1e-7)


def test_path_gain_reference_distance():
    assert path_gain(1.0, 2.2, 1e-3) == 1e-3
    assert math.isclose(path_gain(10.0, 2.0, 1e-3), 1e-5)


def test_cascade_is_diag_product(rng):
    a = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    b = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    np.testing.assert_allclose(cascade(a, b), np.diag(a) @ b)
    with pytest.raises(ValueError):
        cascade(a, b[:3])


def test_rician_moments():
    g = np.random.default_rng(1)
    for k, var in ((0.0, 1.0), (1.0, 1.0), (4.0, 2.0)):
        h = sample_rician(200_000, k, var, g)
        assert abs(np.mean(np.abs(h) ** 2) - var) < 0.02 * var
        assert abs(np.mean(h) - math.sqrt(var * k / (k + 1))) < 0.01
        assert abs(np.mean(h.imag)) < 0.01


def test_draw_channels_reproducible():
    a = draw_channels(8, FadingParams(), np.random.default_rng(3))
    b = draw_channels(8, FadingParams(), np.random.default_rng(3))
    np.testing.assert_array_equal(a.h_sid, b.h_sid)
    assert a.n == 8


def test_snr_from_link_budget(scene, lb, p_opt, rng):
    # independent route: received power = Ps * gain_SI * gain_ID * |q h|^2
    ch = draw_channels(6, FadingParams(), rng)
    q = np.exp(1j * rng.uniform(0, 2 * np.pi, 6))
    d_si = np.linalg.norm(p_opt - scene.p_s)
    d_id = np.linalg.norm(p_opt - scene.p_d)
    d_ie = np.linalg.norm(p_opt - scene.p_e)
    h_d = sum(q[n] * ch.h_si[n] * ch.h_id[n] for n in range(6))
    h_e = sum(q[n] * ch.h_si[n] * ch.h_ie[n] for n in range(6))
    p_d = lb.ps * (lb.xi0 * d_si**-2.2) * (lb.xi0 * d_id**-2.2) * abs(h_d) ** 2
    p_e = lb.ps * (lb.xi0 * d_si**-2.2) * (lb.xi0 * d_ie**-2.2) * abs(h_e) ** 2
    g_d, g_e = snr_pair(q, p_opt, ch, lb, scene)
    assert math.isclose(g_d, p_d / lb.noise_var, rel_tol=1e-12)
    assert math.isclose(g_e, p_e / lb.noise_var, rel_tol=1e-12)
    want = max(0.0, math.log2(1 + p_d / lb.noise_var) - math.log2(1 + p_e / lb.noise_var))
    assert math.isclose(secrecy_rate(q, p_opt, ch, lb, scene), want, rel_tol=1e-12, abs_tol=1e-15)


def test_f_factors_closed_form(scene, lb, p_opt):
    d_si, d_id, d_ie = link_distances(p_opt, scene)
    f1, f2, f3 = f_factors(p_opt, lb, scene)
    a = 2.2
    assert math.isclose(f1, (d_si * d_id * d_ie) ** a, rel_tol=1e-12)
    assert math.isclose(f2, lb.ps * 1e-6 * d_ie**a, rel_tol=1e-12)
    assert math.isclose(f3, lb.ps * 1e-6 * d_id**a, rel_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 16), st.integers(0, 2**31 - 1), st.floats(-10.0, 40.0))
def test_three_rate_routes_agree(n, seed, ps_dbm):
    from ris_secrecy.geometry import Scene
    sc = Scene.default()
    g = np.random.default_rng(seed)
    lb = LinkBudget.from_dbm(ps_dbm)
    p = np.array([4.88, 4.92, 2.1])
    ch = draw_channels(n, FadingParams(), g)
    q = g.uniform(0, 1, n) * np.exp(1j * g.uniform(0, 2 * np.pi, n))
    r = secrecy_rate(q, p, ch, lb, sc)
    assert r >= 0.0
    assert math.isclose(r, secrecy_rate_factored(q, p, ch, lb, sc), rel_tol=1e-9, abs_tol=1e-12)
    F1, F2 = objective_F(q, p, ch, lb, sc), objective_F_quadratic(q, p, ch, lb, sc)
    assert math.isclose(F1, F2, rel_tol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10_000), st.floats(0.0, 2 * np.pi))
def test_rate_is_phase_invariant(n, seed, phi):
    from ris_secrecy.geometry import Scene
    sc, lb = Scene.default(), LinkBudget()
    g = np.random.default_rng(seed)
    ch = draw_channels(n, FadingParams(), g)
    q = np.exp(1j * g.uniform(0, 2 * np.pi, n))
    p = np.array([4.88, 4.92, 2.1])
    assert math.isclose(objective_F(q, p, ch, lb, sc),
                        objective_F(q * np.exp(1j * phi), p, ch, lb, sc), rel_tol=1e-12)


def test_zero_reflection_gives_zero_rate(scene, lb, p_opt, rng):
    ch = draw_channels(4, FadingParams(), rng)
    assert secrecy_rate(np.zeros(4), p_opt, ch, lb, scene) == 0.0
    assert objective_F(np.zeros(4), p_opt, ch, lb, scene) == 1.0


def test_link_distances_reject_coincident_node(scene):
    with pytest.raises(ValueError):
        link_distances(scene.p_s, scene)


def test_channel_set_roundtrip(tmp_path, rng):
    ch = draw_channels(5, FadingParams(), rng)
    f = tmp_path / "ch.txt"
    ch.save(f)
    back = ChannelSet.load(f)
    np.testing.assert_array_equal(back.h_si, ch.h_si)
    np.testing.assert_array_equal(back.h_sie, ch.h_sie)
    assert f.read_text().startswith("# h_si.re h_si.im")


def test_channel_set_load_rejects_bad_files(tmp_path, rng):
    ch = draw_channels(3, FadingParams(), rng)
    f = tmp_path / "ch.txt"
    ch.save(f)
    rows = np.loadtxt(f, ndmin=2)
    rows[0, 6] += 1.0  # corrupt h_sid.re
    np.savetxt(f, rows)
    with pytest.raises(ValueError, match="inconsistent"):
        ChannelSet.load(f)
    np.savetxt(f, rows[:, :8])
    with pytest.raises(ValueError, match="10 columns"):
        ChannelSet.load(f)


def test_channel_set_validation():
    with pytest.raises(ValueError):
        ChannelSet(np.ones(3), np.ones(2), np.ones(3))
    ch = ChannelSet.cascaded([1 + 1j, 2], [3, 4j])
    np.testing.assert_array_equal(ch.h_sid, [1 + 1j, 2])


def test_miso_reduces_to_single_antenna(rng):
    H = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    b = np.array([1.0, 0.0, 0.0])
    h_id = rng.standard_normal(4) + 0j
    np.testing.assert_allclose(effective_miso_channel(H, b, h_id), H[:, 0] * h_id)
    ch = ChannelSet.from_miso(H, b, h_id, h_id)
    np.testing.assert_allclose(ch.h_sid, H[:, 0] * h_id)
    with pytest.raises(ValueError):
        effective_miso_channel(H, np.ones(2), h_id)


def test_rate_and_factored_form_agree_on_seeded_instances(scene, p_opt):
    # direct log-difference against the single log of the SNR ratio, 10^3 draws
    rng = np.random.default_rng([31, 7])
    worst = 0.0
    for i in range(1000):
        lb = LinkBudget.from_dbm(float(rng.uniform(0.0, 40.0)))
        ch = draw_channels(int(rng.integers(1, 33)), FadingParams(), rng)
        q = np.exp(2j * np.pi * rng.random(ch.n)) * rng.random(ch.n)
        r1 = secrecy_rate(q, p_opt, ch, lb, scene)
        r2 = secrecy_rate_factored(q, p_opt, ch, lb, scene)
        worst = max(worst, abs(r1 - r2) / max(1.0, abs(r1)))
    assert worst <= 1e-12
