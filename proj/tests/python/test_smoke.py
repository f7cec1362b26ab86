import numpy as np
import pytest

import kintegra as ki


def test_space_basics():
    e3 = ki.Space.euclidean(3)
    assert e3.dim == 3
    assert e3.signature == (3, 0)
    g = e3.metric([0.1, -0.2, 0.3])
    assert g.shape == (3, 3)
    assert np.allclose(g, np.eye(3))

    mk = ki.Space.minkowski(2, 1)
    assert mk.signature == (2, 1)
    assert np.allclose(mk.metric([0.0, 0.0, 0.0]), np.diag([1.0, 1.0, -1.0]))


def test_sphere_metric_and_domain():
    s2 = ki.Space.sphere(2, 1.0)
    x = s2.random_point(seed=11)
    g = s2.metric(x)
    assert g.shape == (2, 2)
    assert g[0, 0] == pytest.approx(g[1, 1])
    assert g[0, 1] == pytest.approx(0.0)

    h2 = ki.Space.hyperbolic(2, 1.0)
    assert not h2.admissible([5.0, 5.0])
    with pytest.raises(ValueError):
        h2.metric([5.0, 5.0])


def test_killing_basis_residuals():
    e2 = ki.Space.euclidean(2)
    names = ki.generator_names(e2)
    assert "T1" in names and "R12" in names
    for field in ki.killing_basis(e2):
        assert field.killing_residual([0.4, -1.1]) <= 1e-12


def test_metric_field_is_integrable():
    s3 = ki.Space.sphere(3, 1.0)
    k = ki.metric_field(s3)
    x = s3.random_point(seed=3)
    out = k.conditions(x)
    assert out["verdicts"] == (True, True, True)
    assert max(out["residuals"]) == 0.0


def test_torsion_shape_and_antisymmetry():
    e3 = ki.Space.euclidean(3)
    k = ki.field_from_text(e3, "term 1.0 R12 R12\nterm 0.5 T3 T3\n")
    x = [0.3, -0.7, 0.2]
    n = k.torsion(x)
    assert n.shape == (3, 3, 3)
    assert np.allclose(n, -np.transpose(n, (0, 2, 1)))
    assert k.haantjes(x).shape == (3, 3, 3)


def test_non_killing_field_fails_first_condition():
    e3 = ki.Space.euclidean(3)
    k = ki.expression_field(
        e3, [["x1^2", "x1*x2", "x3"], ["sin(x2)", "1"], ["x1 + x2^2"]]
    )
    x = [0.37, -0.82, 0.51]
    out = k.conditions(x)
    assert out["verdicts"][0] is False
    assert k.killing_residual(x) > 1e-3


def test_verify_redundancy():
    r = ki.verify_redundancy(3, trials=50, seed=7)
    assert r["verified"] is True
    assert r["constraint_dims"] == (8, 7, 6, 6)
    assert r["max_k3_residual"] <= 1e-9

    r21 = ki.verify_redundancy(3, pattern="2,1", trials=50, seed=7)
    assert r21["constraint_dims"] == (8, 7, 7, 7)


def test_independence_witness():
    w = ki.independence_witness(3, np.array([1.0, 2.0, 3.0]), seed=7)
    assert w is not None
    assert w["k2_residual"] >= 0.1
    assert w["nullspace_dim_k0k1"] == 7
    assert w["nullspace_dim_k0k1k2"] == 6
    assert w["s"].shape == (3, 3, 3)
    assert np.linalg.norm(w["s"].ravel()) > 0

    none = ki.independence_witness(3, np.array([2.0, 2.0, 5.0]), seed=7)
    assert none is None


def test_nullspace_dims():
    assert ki.nullspace_dims(np.array([1.0, 2.0, 3.0])) == (8, 7, 6, 6)
    assert ki.nullspace_dims(np.array([3.0, 3.0, 3.0])) == (8, 8, 8, 8)
