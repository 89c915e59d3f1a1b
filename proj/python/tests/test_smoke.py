import math

import numpy as np
import pytest

import gspt


def test_zoo_listing():
    names = [m["name"] for m in gspt.list_models()]
    assert names == ["minimal", "ebers_moll", "stickslip_exp", "stickslip_poly", "vdp", "transition"]
    assert gspt.default_params("stickslip_poly")["v_m"] == 1.0


def test_minimal_rhs_by_hand():
    # N = (1-y, x-1+y), f = y, G = (0,1)
    m = gspt.Model("minimal")
    assert m.rhs((2.0, 3.0), 0.1) == pytest.approx((-6.0, 12.1))


def test_minimal_contact_point_and_singularity():
    m = gspt.Model("minimal")
    (cp,) = gspt.contact_points(m)
    assert cp["location"] == pytest.approx((1.0, 0.0), abs=1e-9)
    assert (cp["order"], cp["regular"], cp["jump"]) == (1, True, "off")
    (s,) = gspt.n_singularities(m)
    assert s["location"] == pytest.approx((0.0, 1.0), abs=1e-8)
    assert s["kind"] == "unstable_focus"


def test_projection_identities():
    m = gspt.Model("stickslip_exp")
    P = np.array(m.projection((0.3, 0.0)))
    assert np.allclose(P @ P, P, atol=1e-12)
    assert np.allclose(P @ np.array(m.N((0.3, 0.0))), 0.0, atol=1e-12)


def test_singular_and_limit_cycle():
    m = gspt.Model("minimal")
    c = gspt.singular_cycle(m)
    assert c["L_F"][0] == pytest.approx(-11.2, abs=0.1)
    lc = gspt.limit_cycle(m, 1e-2)
    assert lc["strokes"] == 2
    assert lc["floquet_exponent"] < 0
    assert lc["samples"].shape[1] == 2


def test_offsets_and_riccati():
    m = gspt.Model("minimal")
    a, b = gspt.section_offsets(m, 1e-3), gspt.section_offsets(m, 1e-4)
    assert math.log10(a["offset"] / b["offset"]) == pytest.approx(2 / 3, abs=0.07)
    assert gspt.omega0() == pytest.approx(gspt.airy_first_zero(), abs=1e-8)
    t = gspt.riccati_tails()
    assert t["left_exponent"] >= 3.5
    assert t["right_constant"] == pytest.approx(t["right_predicted"], abs=1e-4)


def test_regimes_and_strokes():
    assert gspt.classify_regime(1.1)[0] == "steady_sliding"
    assert gspt.classify_regime(0.86)[0] == "stick_slip"
    grid = gspt.stroke_phase_diagram([1e-2, 5.0], [1e-2, 5.0])
    assert grid[0, 1] == 2 and grid[1, 0] == 4


def test_errors_are_typed():
    with pytest.raises(gspt.PreconditionError):
        gspt.Model("no_such_model")
    with pytest.raises(gspt.AssumptionFailure):
        gspt.singular_cycle(gspt.Model("vdp"))
    assert issubclass(gspt.PreconditionError, gspt.Error)
