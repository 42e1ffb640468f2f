import math

import numpy as np
import pytest

from osclab.errors import CoefficientSingularError
from osclab.family import (
    FiveParamSpec,
    alpha1_eval,
    alpha2_at,
    augmented_field,
    fiveparam_from_json,
    fiveparam_to_json,
    integrate_family,
    make_augmented_field,
    to_trig_alpha,
)


def test_spec_validation():
    FiveParamSpec(1.0, 0.0, 0.0, 2.2, 0.0, -3.6)
    with pytest.raises(ValueError):
        FiveParamSpec(0.0, 0.0, 0.0, 2.2, 0.0, -3.6)
    with pytest.raises(ValueError):
        FiveParamSpec(1.0, 0.0, 0.0, 0.0, 0.0, -3.6)  # alpha2(0) must be positive


def test_json_round_trip():
    fp = FiveParamSpec(1.0, 0.05, 0.0, 2.2, 0.0, -3.6)
    obj = fiveparam_to_json(fp)
    assert obj == {"omega": 1.0, "C1": 0.05, "C2": 0.0, "alpha2": [2.2, 0.0, -3.6]}
    assert fiveparam_from_json(obj) == fp


def test_alpha1_eval():
    fp = FiveParamSpec(2.0, 0.3, -0.4, 1.5, 0.0, 0.0)
    al1, al1p = alpha1_eval(fp, 0.0)
    assert al1 == 0.15
    assert al1p == -0.4  # omega * C2 / 2
    t = 0.9
    al1, al1p = alpha1_eval(fp, t)
    want = 0.5 * (0.3 * math.cos(2.0 * t) - 0.4 * math.sin(2.0 * t))
    assert math.isclose(al1, want, rel_tol=1e-15)
    h = 1e-7
    a, _ = alpha1_eval(fp, t - h)
    b, _ = alpha1_eval(fp, t + h)
    assert abs((b - a) / (2 * h) - al1p) < 1e-6


def test_to_trig_alpha_mapping():
    fp = FiveParamSpec(1.0, 0.0, 0.0, 2.2, 0.0, -3.6)
    al = to_trig_alpha(fp)
    assert math.isclose(al.A, 1.3, rel_tol=1e-14)
    assert math.isclose(al.B, 0.9, rel_tol=1e-14)
    assert al.C == 0.0
    with pytest.raises(ValueError):
        to_trig_alpha(FiveParamSpec(1.0, 0.1, 0.0, 2.2, 0.0, -3.6))


def test_augmented_field_matches_closure():
    fp = FiveParamSpec(1.1, 0.03, -0.07, 1.8, 0.4, -2.0)
    fast = make_augmented_field(fp)
    for t, y in ((0.0, (0.1, 0.0, 1.8, 0.4, -2.0)),
                 (2.3, (-0.4, 0.2, 1.6, -0.3, 1.0))):
        a = augmented_field(fp, t, y)
        b = fast(t, y)
        assert len(a) == len(b) == 5
        for u, v in zip(a, b):
            assert math.isclose(u, v, rel_tol=1e-14, abs_tol=1e-300)


def test_augmented_field_guards_small_alpha2():
    fp = FiveParamSpec(1.0, 0.0, 0.0, 2.2, 0.0, -3.6)
    with pytest.raises(CoefficientSingularError):
        augmented_field(fp, 0.0, (0.1, 0.0, 1e-12, 0.0, 0.0))


def test_alpha2_at_initial_values():
    fp = FiveParamSpec(1.0, 0.05, 0.0, 2.2, 0.4, -3.6)
    a2, d1, d2 = alpha2_at(fp, 0.0)
    assert (a2, d1, d2) == (2.2, 0.4, -3.6)
    with pytest.raises(ValueError):
        alpha2_at(fp, -1.0)


def test_alpha2_matches_closed_form_when_decoupled():
    # C1 = C2 = 0 reduces the coefficient equation to the trig solution
    fp = FiveParamSpec(1.0, 0.0, 0.0, 2.2, 0.0, -3.6)
    for t in (0.5, 3.0, 12.0, 20.0):
        a2, d1, d2 = alpha2_at(fp, t)
        assert abs(a2 - (1.3 + 0.9 * math.cos(2 * t))) < 1e-9
        assert abs(d1 - (-1.8 * math.sin(2 * t))) < 1e-9
        assert abs(d2 - (-3.6 * math.cos(2 * t))) < 1e-8


def test_integrate_family_conserves():
    fp = FiveParamSpec(1.0, 0.05, 0.0, 2.2, 0.0, -3.6)
    traj, report = integrate_family(fp, 0.1, 0.0, 40.0, rtol=1e-12)
    assert traj.status == "completed"
    assert traj.ys.shape[1] == 5
    assert report.mode == "relative"
    assert report.max_rel < 1e-9


def test_integrate_family_zero_solution_uses_absolute_mode():
    fp = FiveParamSpec(1.0, 0.05, 0.0, 2.2, 0.0, -3.6)
    traj, report = integrate_family(fp, 0.0, 0.0, 5.0)
    assert report.mode == "absolute"
    # z stays identically zero, coefficients still evolve
    assert np.max(np.abs(traj.ys[:, 0])) < 1e-14
    assert np.max(np.abs(traj.ys[:, 2] - traj.ys[0, 2])) > 0.1
