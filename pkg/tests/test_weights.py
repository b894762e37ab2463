import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semivalues import (SHAPLEY, BetaShapley, Custom, SpecError,
                        WeightedBanzhaf, make_weights, moment,
                        normalize_custom, parse_semivalue, semivalue_label)

from .oracles import beta_p_exact, shapley_p_exact, wb_p_exact

SPEC_GRID = [
    BetaShapley(1, 1), BetaShapley(4, 1), BetaShapley(1, 4), BetaShapley(2, 2),
    BetaShapley(16, 3),
    WeightedBanzhaf(0.2), WeightedBanzhaf(0.5), WeightedBanzhaf(0.8),
]


def test_shapley_kernel_n3():
    w = make_weights(SHAPLEY, 3)
    assert np.allclose(w.p, [1 / 3, 1 / 6, 1 / 3], rtol=0, atol=1e-15)
    assert np.allclose(w.m, [1 / 3, 1 / 3, 1 / 3], rtol=0, atol=1e-15)


def test_banzhaf_half_is_flat():
    w = make_weights(WeightedBanzhaf(0.5), 4)
    assert np.allclose(w.p, 1 / 8, rtol=0, atol=1e-16)


@pytest.mark.parametrize("n", [2, 3, 7, 17, 64, 256])
def test_beta11_matches_exact_shapley_kernel(n):
    w = make_weights(SHAPLEY, n)
    exact = np.array([float(v) for v in shapley_p_exact(n)])
    assert np.all(np.abs(w.p - exact) <= 1e-12 * exact)


@pytest.mark.parametrize("alpha,beta", [(4, 1), (1, 4), (2, 2), (7, 3)])
@pytest.mark.parametrize("n", [2, 9, 33])
def test_beta_kernel_matches_rational_oracle(alpha, beta, n):
    w = make_weights(BetaShapley(alpha, beta), n)
    exact = np.array([float(v) for v in beta_p_exact(alpha, beta, n)])
    assert np.allclose(w.p, exact, rtol=1e-12, atol=0)


@pytest.mark.parametrize("num,den", [(1, 5), (1, 2), (3, 4)])
def test_wb_kernel_matches_rational_oracle(num, den):
    n = 12
    w = make_weights(WeightedBanzhaf(num / den), n)
    exact = np.array([float(v) for v in wb_p_exact(num, den, n)])
    assert np.allclose(w.p, exact, rtol=1e-12, atol=0)


@pytest.mark.parametrize("spec", SPEC_GRID)
@pytest.mark.parametrize("n", list(range(2, 65)))
def test_normalization_and_no_amplification(spec, n):
    w = make_weights(spec, n)
    assert abs(w.m.sum() - 1.0) <= 1e-9
    assert np.all(w.m >= 0.0)
    assert np.all(w.m <= 1.0 + 1e-12)
    assert np.all(w.p >= 0.0)


@given(alpha=st.floats(1.0, 32.0), beta=st.floats(1.0, 32.0),
       n=st.integers(2, 64))
@settings(max_examples=60, deadline=None)
def test_normalization_hypothesis_beta(alpha, beta, n):
    w = make_weights(BetaShapley(alpha, beta), n)
    assert abs(w.m.sum() - 1.0) <= 1e-9
    assert np.all((w.m >= 0.0) & (w.m <= 1.0 + 1e-12))


@pytest.mark.parametrize("alpha,beta", [(1, 1), (2, 2), (4, 1), (1, 4), (5, 3)])
@pytest.mark.parametrize("n", [6, 24, 63])
def test_bounded_density_caps_m(alpha, beta, n):
    # density of the (normalized) measure, maximized on [0, 1]
    from scipy.special import betaln
    grid = np.linspace(0.0, 1.0, 20001)[1:-1]
    dens = np.exp((beta - 1) * np.log(grid) + (alpha - 1) * np.log1p(-grid)
                  - betaln(beta, alpha))
    bound = dens.max() if (alpha > 1 or beta > 1) else 1.0
    w = make_weights(BetaShapley(alpha, beta), n)
    assert np.all(w.m <= bound / n + 1e-9)


@pytest.mark.parametrize("spec", SPEC_GRID)
def test_log_space_survives_n1024(spec):
    w = make_weights(spec, 1024)
    for arr in (w.p, w.m):
        assert not np.any(np.isnan(arr))
        assert not np.any(np.isinf(arr))
    assert np.all(np.isfinite(w.log_m) | (w.log_m == -np.inf))
    # mass must survive where the analytic values are representable
    assert w.m.max() > 0
    assert abs(w.m.sum() - 1.0) <= 1e-9


def test_moments():
    for k in range(6):
        assert moment(SHAPLEY, k) == pytest.approx(1.0 / (k + 1), rel=1e-14)
    assert moment(WeightedBanzhaf(0.7), 0) == 1.0
    assert moment(WeightedBanzhaf(0.3), 2) == pytest.approx(0.09, rel=1e-14)
    # Beta moment vs quadrature
    from scipy.integrate import quad
    from scipy.special import betaln
    alpha, beta, k = 3.0, 2.0, 4
    dens = lambda t: np.exp((beta - 1) * np.log(t) + (alpha - 1) * np.log1p(-t)
                            - betaln(beta, alpha)) * t ** k
    ref, _ = quad(dens, 0, 1)
    assert moment(BetaShapley(alpha, beta), k) == pytest.approx(ref, rel=1e-10)
    with pytest.raises(SpecError):
        moment(Custom((1.0,)), 1)
    with pytest.raises(SpecError):
        moment(SHAPLEY, -1)


def test_custom_validation():
    n = 5
    good = make_weights(SHAPLEY, n).p
    w = make_weights(Custom(tuple(good)), n)
    assert abs(w.m.sum() - 1.0) <= 1e-9
    with pytest.raises(SpecError):
        make_weights(Custom(tuple(2.0 * good)), n)  # not normalized, not rescaled
    with pytest.raises(SpecError):
        Custom((0.1, -0.2, 0.3))
    with pytest.raises(SpecError):
        make_weights(Custom((0.5, 0.5)), 3)  # wrong length
    fixed = normalize_custom(2.0 * good)
    assert np.allclose(fixed.p, good, rtol=1e-12)
    with pytest.raises(SpecError):
        normalize_custom(np.zeros(4))


def test_spec_parameter_ranges():
    with pytest.raises(SpecError):
        BetaShapley(0.5, 1.0)
    with pytest.raises(SpecError):
        BetaShapley(1.0, 0.0)
    with pytest.raises(SpecError):
        WeightedBanzhaf(0.0)
    with pytest.raises(SpecError):
        WeightedBanzhaf(1.0)
    with pytest.raises(SpecError):
        make_weights(SHAPLEY, 0)


def test_parse_and_label(tmp_path):
    assert parse_semivalue("beta:4:1") == BetaShapley(4.0, 1.0)
    assert parse_semivalue("wb:0.2") == WeightedBanzhaf(0.2)
    path = tmp_path / "p.txt"
    path.write_text("0.33333333333333333\n0.16666666666666666\n0.33333333333333333\n")
    spec = parse_semivalue(f"custom:@{path}")
    assert isinstance(spec, Custom) and len(spec.p) == 3
    for bad in ["beta:1", "wb:2", "wb:0.5:1", "nope", "custom:file", "beta:x:y"]:
        with pytest.raises(SpecError):
            parse_semivalue(bad)
    assert semivalue_label(BetaShapley(1, 1)) == "beta:1:1"
    assert semivalue_label(WeightedBanzhaf(0.25)) == "wb:0.25"
