"""Smoke tests for the python bindings (built module on PYTHONPATH)."""

import math

import pytest

import beamstring as bs


def test_version_string():
    assert bs.__version__.count(".") == 2


def test_params_and_validation():
    p = bs.PhysicalParams()
    p.a1, p.b1, p.a2, p.b2, p.l = 3.0, 0.3, 5.0, 0.5, 1.0
    rep = bs.validate(p)
    assert rep["pass"] is True

    p.q1 = 0.04  # sign-convention breach: soft by default, hard in strict mode
    assert bs.validate(p)["pass"] is True
    assert bs.validate(p, strict_signs=True)["pass"] is False

    p.a1 = -1.0
    assert bs.validate(p)["hard_ok"] is False

    assert "a1=" in repr(bs.PhysicalParams())


def test_km_oracle():
    p = bs.scenario_params("section4")
    assert bs.km(p) == pytest.approx(0.5773502691896258, abs=1e-15)
    with pytest.raises(ValueError):
        bs.scenario_params("narnia")


def test_epsilon0_and_structural():
    p = bs.PhysicalParams()
    p.a2 = 20.0
    p.c1 = p.c2 = 0.1
    e0 = bs.epsilon0(p)
    assert e0["feasible"] is True
    assert e0["value"] == pytest.approx(0.005141388174807198, abs=1e-15)

    rep = bs.structural_conditions(bs.scenario_params("section4"), M1=3.0, M2=1.0)
    assert rep["pass"] is False
    assert len(rep["conditions"]) == 4


def test_certify_demo_feasible():
    cert = bs.certify_scenario("certdemo")
    assert cert["feasible"] is True
    assert cert["bounded"]["mu_m"] > 0.1
    assert cert["free_parameters"]["eps2"] == pytest.approx(0.5)

    bad = bs.certify_scenario("section4")
    assert bad["feasible"] is False


def test_simulate_arrays():
    out = bs.simulate("certdemo", n_w=4, n_phi=4, dt=1e-3, t_end=0.2)
    assert len(out["t"]) == 201
    assert len(out["E"]) == len(out["t"])
    assert out["E"][0] > 0.0
    assert all(math.isfinite(e) for e in out["E"])
    assert out["meta"]["n_w"] == 4


def test_energy0():
    e = bs.energy0("certdemo", 8, 8)
    assert 0.0 < e < 1.0


def test_lifting():
    p = bs.scenario_params("section4")
    assert bs.lifting_operator_norm(p) == pytest.approx(
        0.4472135954999579, abs=1e-15
    )
    res = bs.lifting_residuals(p, 1.5, -0.5)
    assert res["max_residual"] < 1e-12
    assert bs.lifting_norm_sq(p, 2.0, 0.0) == pytest.approx(4.0 / 9.0, rel=1e-12)


def test_verify_pipeline_short():
    out = bs.verify("certdemo", n_w=5, n_phi=5, dt=2e-3, t_end=1.0)
    assert out["feasible"] is True
    assert out["all_pass"] is True
    assert out["checks"]["sandwich"]["pass"] is True
    assert "sup_state" in out["checks"]
