import json
import math
import os

import numpy as np
import pytest

import jhess

SPECS = os.environ.get("JHESS_SPECS_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "specs"))


def test_spin_multiplication():
    a = jhess.JordanAlgebra.spin(3)
    u = np.array([1.0, 2.0, 0.0])
    v = np.array([3.0, 0.0, 1.0])
    np.testing.assert_allclose(a.multiply(u, v), [3.0, 6.0, 1.0])
    np.testing.assert_allclose(jhess.find_unit(a), [1.0, 0.0, 0.0], atol=1e-12)


def test_series_matches_closed_form():
    m = jhess.algebra_from_spec({"family": {"kind": "componentwise", "n": 1}})
    assert jhess.series_potential(m, np.array([0.5])) == pytest.approx(0.5 - math.log(1.5), abs=1e-12)
    np.testing.assert_allclose(jhess.series_gradient(m, np.array([0.5])), [1.0 / 3.0], atol=1e-14)


def test_barrier_reconstruction_is_sym2():
    with open(os.path.join(SPECS, "sym2_barrier.json")) as f:
        field, anchor = jhess.potential_from_spec(f.read())
    raw, normalized = jhess.residual_third_parallel(field, anchor)
    assert normalized < 1e-6
    assert jhess.recover_nu(field, anchor) == pytest.approx(-3.0, abs=1e-8)
    m = jhess.reconstruct_algebra(field, anchor)
    assert jhess.jordan_residual(m.algebra) < 1e-8
    np.testing.assert_allclose(jhess.find_unit(m.algebra), anchor, atol=1e-7)


def test_nonjordan_witness():
    c = np.zeros((2, 2, 2))
    c[1, 0, 0] = 1.0
    c[0, 1, 1] = 1.0
    a = jhess.JordanAlgebra(c)
    assert jhess.jordan_residual(a) > 1e-3
    assert jhess.integrability_residual(a) > 1e-3


def test_degenerate_form_is_input_error():
    with pytest.raises(jhess.InputError, match="degenerate form"):
        jhess.algebra_from_spec({"structure": [[[0, 0], [0, 1]], [[1, 0], [0, 0]]], "form": [[0, 0], [0, 0]]})


def test_domain_error():
    field, _ = jhess.potential_from_spec({"factors": [{"algebra": {"family": {"kind": "componentwise", "n": 1}}, "weight": 1}]})
    with pytest.raises(jhess.DomainError):
        field.value(np.array([-1.0]))


def test_cli_in_process():
    code, out, err = jhess.run_cli(["algebra-check", os.path.join(SPECS, "spin4_series.json")])
    assert code == 0, err
    report = json.loads(out)
    assert report["pass"] and report["seed"] == 0
    code, _, err = jhess.run_cli(["algebra-check", os.path.join(SPECS, "zero_form.json")])
    assert code == 2 and "degenerate form" in err
