import math

import numpy as np
import pytest

import w2lab


def test_circle_dirac_against_uniform():
    circle = w2lab.SpaceModel.circle()
    value = w2lab.w2_circle_exact(np.array([0.3]), w2lab.MeasureSpec.uniform(circle))
    assert value == pytest.approx(1.0 / 12.0, abs=1e-13)


def test_cosine_mixture_closed_form():
    circle = w2lab.SpaceModel.circle()
    mix = w2lab.cosine_mixture(circle, 0.5)
    pts = np.array([(i + 0.5) / 4000 for i in range(4000)])
    # Equally spaced points carry the uniform law up to 1/(12 m^2).
    got = w2lab.w2_circle_exact(pts, mix)
    assert got == pytest.approx(0.25 / (8 * math.pi**2), rel=1e-3)


def test_sampling_shapes_and_reproducibility():
    t2 = w2lab.SpaceModel.torus(2)
    proc = w2lab.ProcessSpec.iid(w2lab.MeasureSpec.uniform(t2), 50, 7)
    a = w2lab.sample(proc)
    assert a.shape == (50, 2)
    np.testing.assert_array_equal(a, w2lab.sample(proc))
    su2 = w2lab.sample(w2lab.ProcessSpec.iid(w2lab.MeasureSpec.uniform(w2lab.SpaceModel.su2()), 20, 1))
    np.testing.assert_allclose((su2**2).sum(axis=1), 1.0, atol=1e-12)


def test_bounds():
    assert w2lab.circle_bound(1.0, 0.0, 300) == pytest.approx(math.sqrt(2 / 900))
    rep = w2lab.q_w2_bound(0.25, w2lab.SpaceModel.circle())
    assert rep.value == pytest.approx(0.25 / math.sqrt(3))
    assert rep.formula_id == "spectral-radius-circle"
    t2 = w2lab.SpaceModel.torus(2)
    ms = w2lab.mean_square_optimized(w2lab.ProcessSpec.iid(w2lab.MeasureSpec.uniform(t2), 1024, 1), 1024)
    assert ms.t_star is not None and ms.value > 0
    assert "cross_term" in ms.components
    assert w2lab.quantization_floor(100, t2).value > 0


def test_lps_radius_is_ramanujan():
    q = w2lab.lps_spectral_radius(5, 12)
    assert q <= 2 * math.sqrt(5) / 6 + 1e-9


def test_semidiscrete_and_mc():
    t2 = w2lab.SpaceModel.torus(2)
    mu = w2lab.MeasureSpec.uniform(t2)
    pts = w2lab.sample(w2lab.ProcessSpec.iid(mu, 64, 3))
    res = w2lab.w2_semidiscrete(pts, mu, grid=24, verify=True)
    assert res.certified and res.certificate_ok
    est = w2lab.mc_expected_w2sq(w2lab.ProcessSpec.iid(mu, 32, 1), mu, 4, 9, grid=16, verify=True)
    assert est.replicates == 4 and est.plans_failed == 0


def test_errors_raise():
    with pytest.raises(ValueError):
        w2lab.q_w2_bound(1.5, w2lab.SpaceModel.circle())
    with pytest.raises(ValueError):
        w2lab.execute_config("N = 10\nN = 20\n")


def test_lab_config_and_catalog():
    out = w2lab.execute_config("kind = bound-check\nspace = circle\nN = 16, 32\nreplicates = 6\n")
    assert out["exit_code"] == 0
    assert out["csv"].startswith("# w2lab-schema v1")
    cat = w2lab.list_experiments()
    assert [e["criterion"] for e in cat] == list(range(1, 11))


def test_quick_criterion():
    r = w2lab.run_criterion(6)
    assert r.passed, str(r)
