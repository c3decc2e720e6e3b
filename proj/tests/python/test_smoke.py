import math

import numpy as np
import pytest

import pellip


def test_delta_p_of_rotation():
    theta = math.pi / 6
    a = np.exp(1j * theta) * np.eye(2)
    # Δ_2 = λ = cos θ
    assert pellip.delta_p(a, 2.0) == pytest.approx(math.cos(theta), abs=1e-12)
    r = pellip.p_ellipticity_range(a)
    assert r.mu_star == pytest.approx(math.cos(theta), abs=1e-9)
    assert r.contains(2.0)


def test_laplacian_spectrum():
    n = 16
    g = pellip.Grid.interval(1.0, n)
    op = pellip.assemble(pellip.MatrixField.constant(g, np.eye(1)))
    ev = np.sort(np.linalg.eigvalsh(op.matrix.real))
    k = np.arange(1, n)
    expected = 4 * n**2 * np.sin(k * np.pi / (2 * n)) ** 2
    assert np.allclose(ev, expected, rtol=1e-12)


def test_semigroup_against_scipy_free_expm():
    g = pellip.Grid.interval(1.0, 24)
    op = pellip.assemble(pellip.MatrixField.random_elliptic(g, 3))
    f = pellip.factorize(op)
    u = np.linspace(0, 1, op.size) + 0.5j
    t = 1e-3
    w, v = np.linalg.eig(op.matrix)
    direct = v @ (np.exp(-t * w) * np.linalg.solve(v, u))
    got = pellip.apply_function(f, pellip.MultiplierSpec.semigroup(t), u)
    assert np.linalg.norm(got - direct) <= 1e-10 * np.linalg.norm(direct)


def test_gamma_and_mellin():
    assert abs(pellip.complex_gamma(0.5) - math.sqrt(math.pi)) < 1e-13
    assert pellip.mellin_psi(1.0, 2.0) == pytest.approx(pellip.complex_gamma(1 - 2j), rel=1e-14)


def test_beta_mass():
    for alpha in (0.1, 0.25, 0.45):
        assert pellip.beta_mass(alpha, 1.0) == pytest.approx(math.pi / math.sin(alpha * math.pi), rel=1e-10)


def test_errors_carry_kind():
    with pytest.raises(pellip.PellipError) as info:
        pellip.mu_of(0.5)
    assert info.value.kind == "domain"


def test_run_experiment():
    s = pellip.run({"experiment": "ellipticity", "domain": {"resolution": 8}})
    assert s["experiment"] == "ellipticity"
    assert all(c["passed"] for c in s["checks"].values())
