import math

import numpy as np
import pytest

from noisesens import noise as nz
from noisesens.errors import ContractError
from noisesens.families import dictator, majority, parity, tribes
from noisesens.montecarlo import stream
from noisesens.spectral import BooleanFunction, transform

from oracles import brute_c, brute_var_fixed, brute_var_noise, noisy_expectation, random_indicator


# -- sampling -----------------------------------------------------------------

def test_sample_noise_extremes():
    rng = np.random.default_rng(0)
    for x in (0, 5, 1023):
        assert nz.sample_noise(x, 10, nz.Bernoulli(0.0), rng) == x
        assert nz.sample_noise(x, 10, nz.Bernoulli(1.0), rng) == x ^ 1023
        assert nz.sample_noise(x, 10, nz.FixedSize(10), rng) == x ^ 1023


def test_fixed_size_popcount_and_uniformity():
    rng = stream(3, 0)
    counts = {}
    for _ in range(6000):
        y = nz.sample_noise(0, 4, nz.FixedSize(2), rng)
        assert bin(y).count("1") == 2
        counts[y] = counts.get(y, 0) + 1
    assert len(counts) == 6
    # each of the 6 masks has probability 1/6: 4 sigma band
    sd = math.sqrt(6000 * (1 / 6) * (5 / 6))
    assert all(abs(c - 1000) < 4 * sd for c in counts.values())


def test_fixed_size_too_many_flips():
    with pytest.raises(ContractError):
        nz.sample_noise(0, 3, nz.FixedSize(4), np.random.default_rng(0))


def test_sampling_deterministic_given_seed():
    a = [nz.sample_noise(7, 12, nz.Bernoulli(0.3), stream(11, i)) for i in range(20)]
    b = [nz.sample_noise(7, 12, nz.Bernoulli(0.3), stream(11, i)) for i in range(20)]
    assert a == b


def test_parse_noise():
    assert nz.parse_noise({"bernoulli": 0.1}) == nz.Bernoulli(0.1)
    assert nz.parse_noise({"fixed": 12}) == nz.FixedSize(12)
    assert nz.parse_noise("{bernoulli: 0.25}") == nz.Bernoulli(0.25)
    with pytest.raises(ContractError):
        nz.parse_noise({"gauss": 1})
    with pytest.raises(ContractError):
        nz.Bernoulli(1.5)


def test_sampled_conditional_expectation_matches_exact():
    rng = np.random.default_rng(77)
    for trial in range(3):
        n = 6
        f = BooleanFunction(n, random_indicator(rng, n))
        x = int(rng.integers(1 << n))
        eps = float(rng.uniform(0.05, 0.45))
        exact = nz.smoothed(f, eps)[x]
        g = stream(99, trial)
        draws = 100_000
        flips = g.random((draws, n)) < eps
        masks = flips @ (1 << np.arange(n))
        vals = f.table[x ^ masks]
        se = vals.std() / math.sqrt(draws)
        assert abs(vals.mean() - exact) <= 4 * se + 1e-12


# -- noise operator and variance ------------------------------------------------

def test_noise_operator_examples():
    s = transform(majority(3))
    np.testing.assert_array_equal(nz.noise_operator(s, 0.0).coeffs, s.coeffs)
    half = nz.noise_operator(s, 0.5).coeffs
    assert half[0] == s.coeffs[0] and not half[1:].any()
    d = transform(dictator(2))
    assert nz.noise_operator(d, 0.1).coeffs[1] == pytest.approx(-0.5 * 0.8, abs=1e-16)
    with pytest.raises(ContractError):
        nz.noise_operator(s, 1.1)


def test_T_is_Q_reparametrised():
    s = transform(tribes(2, 3))
    np.testing.assert_allclose(nz.T(s, 0.6).coeffs, nz.noise_operator(s, 0.2).coeffs)


def test_smoothed_matches_enumeration_oracle(rng):
    f = BooleanFunction(5, random_indicator(rng, 5))
    np.testing.assert_allclose(nz.smoothed(f, 0.17), noisy_expectation(f.table, 0.17), atol=1e-12)


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.3, 0.5])
def test_var_noise_dictator(eps):
    assert nz.var_noise(transform(dictator(3)), eps) == pytest.approx(0.25 * (1 - 2 * eps) ** 2, abs=1e-15)
    assert brute_var_noise(dictator(3).table, eps) == pytest.approx(0.25 * (1 - 2 * eps) ** 2, abs=1e-12)


@pytest.mark.parametrize("n", range(1, 7))
def test_var_noise_parity(n):
    eps = 0.15
    expected = 0.25 * (1 - 2 * eps) ** (2 * n)
    assert nz.var_noise(transform(parity(n)), eps) == pytest.approx(expected, abs=1e-14)
    assert brute_var_noise(parity(n).table, eps) == pytest.approx(expected, abs=1e-12)


def test_var_noise_majority_no_noise():
    assert nz.var_noise(transform(majority(3)), 0.0) == 0.25


def test_var_noise_matches_brute_force(rng):
    for n in (3, 5, 7):
        f = BooleanFunction(n, random_indicator(rng, n))
        for eps in (0.05, 0.2, 0.4):
            assert nz.var_noise(transform(f), eps) == pytest.approx(brute_var_noise(f.table, eps), abs=1e-12)


def test_var_noise_decreasing_in_eps(rng):
    f = BooleanFunction(8, random_indicator(rng, 8))
    s = transform(f)
    vals = [nz.var_noise(s, e) for e in np.linspace(0, 0.5, 26)]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))


# -- gamma and the gauge ---------------------------------------------------------

@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3, 0.45])
def test_gamma_dictator_step(eps):
    f = dictator(3)
    d = 0.5 - eps
    assert nz.gamma(f, eps, d * 0.999) == 1.0
    assert nz.gamma(f, eps, d) == 0.0
    assert nz.gamma(f, eps, d * 1.001) == 0.0


def test_gamma_trivial_cases(rng):
    f = BooleanFunction(6, random_indicator(rng, 6))
    assert nz.gamma(f, 0.2, 1.0) == 0.0
    for d in (1e-6, 0.1, 0.5):
        assert nz.gamma(f, 0.5, d) == 0.0
    with pytest.raises(ContractError):
        nz.gamma(BooleanFunction(1, [0.5, 1.0]), 0.1, 0.1)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.3, 0.49])
def test_phi_dictator_closed_form_and_grid_scan(eps):
    f = dictator(4)
    phi = nz.gauge_phi(f, eps).phi
    assert phi == pytest.approx(0.5 - eps, abs=1e-12)
    # independent scan: smallest grid delta with gamma(delta) < delta
    dev = np.abs(noisy_expectation(f.table, eps) - f.mean())
    grid = np.arange(0.5 - eps - 1e-6, 0.5 - eps + 1e-6, 1e-9)
    first = next(d for d in grid if np.mean(dev > d + 1e-12) < d)
    assert abs(first - phi) <= 2e-9


def test_phi_trivial():
    assert nz.gauge_phi(BooleanFunction(3, np.ones(8), "indicator"), 0.2).phi == 0.0
    assert nz.gauge_phi(majority(5), 0.5).phi == 0.0


def test_phi_from_distribution_cases():
    # gamma = 1 on (0, 0.3), then 0.25 on [0.3, 0.6), then 0: inf{gamma < delta} = 0.3
    assert nz.phi_from_distribution([(0.3, 0.75), (0.6, 0.25)]) == 0.3
    # gamma = 0.8 on [0.1, 0.9): inf is 0.8, not attained
    assert nz.phi_from_distribution([(0.1, 0.2), (0.9, 0.8)]) == pytest.approx(0.8)
    assert nz.phi_from_distribution([(0.0, 1.0)]) == 0.0


def test_phi_sandwich_random(rng):
    for _ in range(40):
        n = int(rng.integers(2, 11))
        f = BooleanFunction(n, random_indicator(rng, n))
        for eps in (0.05, 0.1, 0.2, 0.3):
            g = nz.gauge_phi(f, eps)
            assert 0 <= g.phi <= 1
            assert 0.5 * g.var_noise <= g.phi + 1e-12
            assert g.phi <= g.var_noise ** (1 / 3) + 1e-12


def test_deviation_distribution_masses_sum_to_one(rng):
    f = BooleanFunction(7, random_indicator(rng, 7))
    dist = nz.deviation_distribution(f, 0.1)
    assert sum(m for _, m in dist) == pytest.approx(1.0)
    assert [v for v, _ in dist] == sorted(v for v, _ in dist)


# -- generalised noise ---------------------------------------------------------

def test_z_general_extremes(rng):
    f = BooleanFunction(6, random_indicator(rng, 6))
    s = transform(f)
    assert nz.z_general(s, np.full(6, 0.25)) == pytest.approx(np.mean(f.table**2), abs=1e-14)
    assert nz.z_general(s, np.zeros(6)) == pytest.approx(s.coeffs[0] ** 2, abs=1e-15)


def test_z_general_bernoulli_preset_equals_var_noise(rng):
    for n in (3, 8):
        s = transform(BooleanFunction(n, random_indicator(rng, n)))
        for eps in (0.0, 0.1, 0.27, 0.5):
            z = nz.z_general(s, nz.bernoulli_zetas(n, eps))
            assert z - s.coeffs[0] ** 2 == pytest.approx(nz.var_noise(s, eps), abs=1e-12)


def test_presets_values():
    eps = 0.2
    assert nz.bernoulli_zetas(1, eps)[0] == pytest.approx((0.5 - eps) ** 2)
    assert nz.three_point_zetas(1, eps)[0] == pytest.approx((1 - eps) / 4)
    # asymmetric: q = 1 w.p. 1/2 - eps, eps / (1/2 + eps) otherwise; mean is 1/2
    q2 = (0.5 - eps) + (0.5 + eps) * (eps / (0.5 + eps)) ** 2
    assert nz.asymmetric_zetas(1, eps)[0] == pytest.approx(q2 - 0.25)


def test_z_general_with_two_stage_simulation():
    # G(f, q) averaged over the three-point first stage, by enumeration of q
    f = majority(3)
    s = transform(f)
    eps = 0.3
    vals, probs = [1.0, 0.0, 0.5], [(1 - eps) / 2, (1 - eps) / 2, eps]
    Z = 0.0
    import itertools

    for combo in itertools.product(range(3), repeat=3):
        q = [vals[i] for i in combo]
        pq = np.prod([probs[i] for i in combo])
        G = sum(f.table[x] * np.prod([q[j] if (x >> j) & 1 else 1 - q[j] for j in range(3)]) for x in range(8))
        Z += pq * G**2
    assert nz.z_general(s, nz.three_point_zetas(3, eps)) == pytest.approx(Z, abs=1e-14)


def test_z_general_range_check():
    s = transform(dictator(2))
    with pytest.raises(ContractError):
        nz.z_general(s, [0.3, 0.1])
    with pytest.raises(ContractError):
        nz.z_general(s, [0.1])


# -- Bonami-Beckner --------------------------------------------------------------

def test_bonami_extremes(rng):
    f = BooleanFunction(6, rng.choice([-1.0, 1.0], 64))
    lhs, rhs = nz.bonami_margin(f, 1.0)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    lhs, rhs = nz.bonami_margin(f, 0.0)
    assert lhs == pytest.approx(abs(f.mean()), abs=1e-15)
    assert rhs == pytest.approx(np.mean(np.abs(f.table)))


def test_bonami_random_pm1(rng):
    for _ in range(200):
        f = BooleanFunction(8, rng.choice([-1.0, 1.0], 256))
        lhs, rhs = nz.bonami_margin(f, 0.6)
        assert lhs <= rhs + 1e-12


# -- fixed-size noise -----------------------------------------------------------

def test_c_examples():
    for n in range(1, 12):
        for q in range(n + 1):
            assert nz.fixed_noise_coeff(n, q, 0) == 1.0
            assert nz.fixed_noise_coeff(n, q, n) == (-1) ** q
        for k in range(n + 1):
            assert nz.fixed_noise_coeff(n, 1, k) == pytest.approx((n - 2 * k) / n, abs=1e-15)


def test_c_against_brute_force():
    for n in range(1, 8):
        for q in range(n + 1):
            for k in range(n + 1):
                assert nz.fixed_noise_coeff(n, q, k) == pytest.approx(brute_c(n, q, k), abs=1e-14)


def test_c_bounded_and_large_n():
    for n in (100, 500):
        for q in (1, n // 3, n // 2):
            for k in (1, n // 4, n // 2, n):
                assert abs(nz.fixed_noise_coeff(n, q, k)) <= 1.0
    # symmetry c(n,q,k) = +-c(n,q,n-k)
    assert abs(nz.fixed_noise_coeff(200, 70, 30)) == pytest.approx(abs(nz.fixed_noise_coeff(200, 70, 170)))


def test_c_range_errors():
    with pytest.raises(ContractError):
        nz.fixed_noise_coeff(3, 4, 0)
    with pytest.raises(ContractError):
        nz.fixed_noise_coeff(3, 1, 5)


def test_var_fixed_examples():
    # majority of 3, one flip: 3 (1/16)(1/3)^2 + (1/16)(-1)^2 = 1/12, from enumerating the 3 masks
    assert brute_var_fixed(majority(3).table, 1) == pytest.approx(1 / 12, abs=1e-15)
    assert nz.var_fixed(transform(majority(3)), 1) == pytest.approx(1 / 12, abs=1e-15)
    for n in range(1, 9):
        for q in range(n + 1):
            assert nz.var_fixed(transform(parity(n)), q) == pytest.approx(0.25, abs=1e-15)
    f = tribes(2, 2)
    assert nz.var_fixed(transform(f), 0) == pytest.approx(f.mean() - f.mean() ** 2)


def test_fixed_operator_matches_average(rng):
    f = BooleanFunction(5, random_indicator(rng, 5))
    import itertools

    masks = [sum(1 << j for j in c) for c in itertools.combinations(range(5), 2)]
    direct = np.array([np.mean([f.table[y ^ s] for s in masks]) for y in range(32)])
    from noisesens.spectral import inverse_table

    np.testing.assert_allclose(inverse_table(nz.fixed_noise_operator(transform(f), 2)), direct, atol=1e-12)
