import math

import pytest

import wguide


def test_airy_first_zero():
    z = wguide.airy_zero(1)
    assert abs(z - 2.338107410459767) < 1e-12
    value, _ = wguide.airy_rev(z)
    assert abs(value) < 1e-13


def test_toy_near_first_term():
    kappa = 1e-3
    lam = wguide.toy_eigenvalue_exact(1, kappa)
    assert abs(lam - kappa ** (2 / 3) * wguide.airy_zero(1)) < 2e-3


def test_toy_no_bound_state():
    with pytest.raises(wguide.NoBoundState):
        wguide.toy_eigenvalue_exact(40, 0.5)


def test_bo_triangle_two_terms():
    h = 0.01
    lam = wguide.bo_eigenvalues("tri", h, 1)[0]
    two = 0.125 + h ** (2 / 3) * (4 * math.pi * math.sqrt(2)) ** (-2 / 3) * wguide.airy_zero(1)
    assert abs(lam - two) < 5 * h ** (4 / 3)


def test_fit_recovers_polynomial():
    hs = [0.2 * 0.7**i for i in range(8)]
    vals = [0.125 + 0.3 * h ** (2 / 3) + 0.05 * h for h in hs]
    fit = wguide.fit_expansion(hs, vals, [1e-14] * len(hs), [0, 2 / 3, 1])
    assert fit["coefficients"] == pytest.approx([0.125, 0.3, 0.05], abs=1e-10)


def test_fit_precondition():
    with pytest.raises(ValueError):
        wguide.fit_expansion([0.2, 0.1], [1.0, 1.0], [1e-9, 1e-9], [0, 1 / 3, 2 / 3])


def test_triangle_eigenvalue_above_floor():
    h = 0.1
    res = wguide.triangle_eigenvalues(h, 1)
    two = 0.125 + 0.3433322111 * h ** (2 / 3)
    assert abs(res["values"][0] - two) < h ** (4 / 3)
    assert res["errors"][0] < 1e-6


def test_quasimode_toy_leading():
    a = wguide.quasimode_coefficients("toy", 1, 2)
    assert a[0] == pytest.approx(wguide.airy_zero(1), abs=1e-10)
    assert abs(a[2]) < 1e-10


def test_cli_usage_error():
    code, _, err = wguide.run_cli(["toy", "--kappa", "-1"])
    assert code == 2
    assert "usage" in err


def test_cli_airy_csv():
    code, out, _ = wguide.run_cli(["airy", "--n", "2"])
    assert code == 0
    rows = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert rows[0].startswith("n,zero")
    assert float(rows[1].split(",")[1]) == pytest.approx(2.338107410459767, abs=1e-14)
