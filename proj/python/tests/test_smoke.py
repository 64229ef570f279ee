import math

import numpy as np
import pytest

import sepbell


def test_pairing_counts():
    assert [sepbell.count_pairings(d) for d in range(2, 9)] == [1, 3, 3, 15, 15, 105, 105]
    assert len(sepbell.enumerate_pairings(6)) == 15
    s = sepbell.canonical_pairing(3)
    assert s.pairs == [(0, 1)] and s.unpaired == 2


def test_qubit_operators_are_paulis():
    s = sepbell.canonical_pairing(2)
    np.testing.assert_array_equal(sepbell.local_sigma_plus(s), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(sepbell.local_sigma_minus(s), [[0, -1j], [1j, 0]])


def test_global_sigma_split():
    sets = sepbell.canonical_pairings(2, 3, 1j)
    full = sepbell.global_sigma(sets)
    plus = sepbell.global_sigma(sets, part="plus")
    minus = sepbell.global_sigma(sets, part="minus")
    np.testing.assert_allclose(full, plus + 1j * minus, atol=1e-14)
    assert sepbell.global_nonzeros(sets) == 4


def test_psi_mu_report():
    sets = sepbell.canonical_pairings(3, 2)
    psi = sepbell.psi_mu(sets, [np.ones(1)] * 3, 1.0)
    report = sepbell.correlation(psi, sets)
    assert report["re_part"] == pytest.approx(4.0)
    assert report["verdicts"]["entangled_certified"]
    assert report["violation_ratio_lhv"] == pytest.approx(2.0)


def test_werner_and_ppt():
    rho = sepbell.werner_state(2, 2, 0.6)
    report = sepbell.correlation(rho, sepbell.canonical_pairings(2, 2))
    assert report["re_part"] == pytest.approx(1.2)
    sweep = sepbell.werner_sweep(2, 3, [0.0, 0.5, 1.0])
    assert sweep["numeric_threshold"] == pytest.approx(8 / 14, abs=1e-6)
    assert sepbell.ppt_threshold(2, 2, [0]) == pytest.approx(1 / 3, abs=1e-6)
    assert sepbell.ppt_min_eigenvalue(sepbell.werner_state(2, 2, 0.3), 2, 2, [0]) >= 0


def test_optimizer_and_spectrum():
    r = sepbell.maximize_over_products(sepbell.canonical_pairings(2, 5), restarts=4, seed=3)
    assert 1 - 1e-6 <= r["best_value"] <= 1 + 1e-9
    lo, hi = sepbell.spectral_extremes(sepbell.canonical_pairings(3, 2))
    assert (lo, hi) == (pytest.approx(-4.0), pytest.approx(4.0))


def test_scan_and_sampling():
    rho = sepbell.werner_state(2, 4, 0.8)
    scan = sepbell.scan_index_sets(rho, 2, 4)
    assert scan["examined"] == 9
    assert abs(complex(*scan["best"]["value"])) == pytest.approx(1.6)
    sets = sepbell.canonical_pairings(2, 2)
    psi = sepbell.psi_mu(sets, [np.ones(1)] * 2, 1.0)
    est = sepbell.sample_correlation(psi, sets, 20000, seed=5)
    assert est["re"]["num_settings"] == 2
    assert abs(est["re"]["mean"] - 2.0) <= 5 * est["re"]["std_error"] + 1e-9


def test_maximally_entangled_value():
    for n, d in [(2, 2), (2, 3), (3, 3)]:
        psi = sepbell.maximally_entangled(n, d)
        value = sepbell.correlation(psi, sepbell.canonical_pairings(n, d))["re_part"]
        expected = 2 ** (n - 1) if d % 2 == 0 else 2 ** (n - 1) * (d - 1) / d + 1 / d
        assert value == pytest.approx(expected, abs=1e-12)


def test_verify_passes():
    ledger = sepbell.verify(2, 2, seed=1, shots=2000)
    assert ledger["passed"]


def test_errors():
    with pytest.raises(sepbell.SepbellError, match="phase"):
        sepbell.psi_mu(sepbell.canonical_pairings(2, 2), [np.ones(1)] * 2, 0.5)
    with pytest.raises(ValueError):
        sepbell.werner_state(2, 2, 1.5)
    with pytest.raises(sepbell.SepbellError):
        sepbell.global_sigma(sepbell.canonical_pairings(9, 4))
    with pytest.raises(sepbell.SepbellError):
        sepbell.PairingIndexSet(4, [(0, 1), (1, 2)])
    assert math.isclose(sepbell.werner_threshold_closed_form(3, 2), 0.25)
