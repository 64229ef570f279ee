#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sepbell/errors.hpp"
#include "sepbell/operators.hpp"
#include "sepbell/oracles.hpp"
#include "sepbell/states.hpp"
#include "sepbell/witnesses.hpp"

using namespace sepbell;

namespace {

// Max of |<psi|A|psi>| over a grid on the unit sphere of C^3, global phase fixed.
double grid_max_qutrit(const Matrix& a, int steps)
{
    double best = 0.0;
    const double pi = std::numbers::pi;
    for (int i = 0; i <= steps; ++i) {
        const double t = 0.5 * pi * i / steps;
        for (int j = 0; j <= steps; ++j) {
            const double u = 0.5 * pi * j / steps;
            for (int k = 0; k < 2 * steps; ++k) {
                for (int l = 0; l < 2 * steps; ++l) {
                    Vector psi(3);
                    psi << std::cos(t), std::sin(t) * std::cos(u) * std::polar(1.0, pi * k / steps),
                        std::sin(t) * std::sin(u) * std::polar(1.0, pi * l / steps);
                    best = std::max(best, std::abs(psi.dot(a * psi)));
                }
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("product maximization")
{
    SUBCASE("qubit attains 1 at (|0> + |1>)/sqrt(2)")
    {
        const auto r = maximize_over_products(canonical_pairings(1, 2), 4, 1);
        CHECK(r.best_value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.converged);
        const Vector& psi = r.argument[0];
        CHECK(std::abs(psi(0)) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-6));
        CHECK(std::abs(psi(1)) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-6));
    }
    SUBCASE("qutrit agrees with a sphere grid")
    {
        for (const cplx eta : {cplx{1.0, 0.0}, kI}) {
            const auto s = canonical_pairing(3, eta);
            const double grid = grid_max_qutrit(local_sigma(s).entries, 12);
            Rng rng(3);
            const auto r = maximize_site(s, 6, rng);
            CHECK(r.best_value >= grid - 1e-12);
            CHECK(r.best_value <= 1.0 + 1e-9);
            CHECK(grid == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("bound never exceeded, always attained, argument re-evaluates")
    {
        Rng pick(19);
        for (int t = 0; t < 40; ++t) {
            const int d = 2 + t % 6;
            const auto all = enumerate_pairings(d, std::polar(1.0, 0.37 * t));
            std::vector<PairingIndexSet> sets{all[pick() % all.size()], all[pick() % all.size()]};
            const auto r = maximize_over_products(sets, 4, 100 + t);
            CHECK(r.best_value <= 1.0 + 1e-9);
            CHECK(r.best_value >= 1.0 - 1e-6);
            const auto check = correlation(product_state(r.argument), sets);
            CHECK(std::abs(check.value) == doctest::Approx(r.best_value).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(maximize_over_products(canonical_pairings(1, 2), 0, 1), Error);
}

TEST_CASE("spectral extremes")
{
    const auto sets = canonical_pairings(2, 2);
    const auto plus = spectral_extremes(global_sigma_plus(sets));
    CHECK(plus.min == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(plus.max == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(plus.iterative);

    const auto sum = GlobalOperator::combine(1.0, global_sigma_plus(sets), 1.0, global_sigma_minus(sets));
    CHECK(spectral_extremes(sum).max == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));

    for (int d : {2, 4, 6}) {
        const auto local = spectral_extremes(global_sigma_plus(canonical_pairings(1, d)));
        CHECK(local.min == doctest::Approx(-1.0));
        CHECK(local.max == doctest::Approx(1.0));
    }

    CHECK_THROWS_AS(spectral_extremes(global_sigma(sets)), Error);

    Limits small;
    small.max_dense_dim = 16;
    const auto big = global_sigma_plus(canonical_pairings(3, 3));
    const auto iterative = spectral_extremes(big, small);
    const auto dense = spectral_extremes(big);
    CHECK(iterative.iterative);
    CHECK(iterative.max == doctest::Approx(dense.max).epsilon(1e-8));
    CHECK(iterative.min == doctest::Approx(dense.min).epsilon(1e-8));
    CHECK(dense.max == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("partial transpose and PPT thresholds")
{
    const std::vector<int> first{0};
    const auto rho = werner_state(2, 3, 0.4);
    const Matrix oracle_pt = oracle::transpose_first_of_two(rho.entries, 3, 3);
    CHECK((partial_transpose(rho, first) - oracle_pt).cwiseAbs().maxCoeff() <= 1e-15);

    const auto rho3 = werner_state(3, 2, 0.4);
    CHECK((partial_transpose(rho3, first) - oracle::transpose_first_of_two(rho3.entries, 2, 4)).cwiseAbs().maxCoeff() <=
          1e-15);

    CHECK(ppt_min_eigenvalue(werner_state(2, 2, 0.5), first) < 0.0);
    CHECK(ppt_min_eigenvalue(werner_state(2, 2, 0.3), first) >= 0.0);

    struct Case {
        int n;
        int d;
        double expected;
    };
    for (const auto [n, d, expected] : {Case{2, 2, 1.0 / 3.0}, Case{2, 3, 0.25}, Case{3, 2, 0.2}}) {
        const int rest = static_cast<int>(hilbert_dim(n - 1, d));
        const double bisected = oracle::bisect_sign_change(
            [&](double p) {
                return oracle::min_eigenvalue(oracle::transpose_first_of_two(oracle::dense_werner(n, d, p), d, rest)) <
                       0.0;
            },
            0.0, 1.0, 1e-10);
        CHECK(bisected == doctest::Approx(expected).epsilon(1e-8));
        CHECK(ppt_threshold(n, d, first) == doctest::Approx(expected).epsilon(1e-6));
        CHECK(ppt_threshold_closed_form(n, d) == doctest::Approx(expected).epsilon(1e-15));
    }

    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const auto sep = ensemble_to_density(random_separable_ensemble(2, 3, 4, rng));
        CHECK(ppt_min_eigenvalue(sep, first) >= -1e-10);
    }

    const std::vector<int> none;
    const std::vector<int> all{0, 1};
    CHECK_THROWS_AS(ppt_min_eigenvalue(rho, none), Error);
    CHECK_THROWS_AS(ppt_min_eigenvalue(rho, all), Error);
}

TEST_CASE("PPT detects entanglement where the witness does not")
{
    const std::vector<int> first{0};
    for (const auto [n, d] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}}) {
        const double lo = ppt_threshold_closed_form(n, d);
        const double hi = werner_threshold_closed_form(n, d);
        REQUIRE(lo < hi);
        const double p = 0.5 * (lo + hi);
        CHECK(ppt_min_eigenvalue(werner_state(n, d, p), first) < 0.0);
        CHECK_FALSE(correlation(werner_state(n, d, p), canonical_pairings(n, d)).entangled_certified);
    }
}

TEST_CASE("local eigenbasis convention")
{
    for (int d = 2; d <= 5; ++d) {
        const auto op = local_sigma_plus(canonical_pairing(d, kI));
        const auto basis = local_eigenbasis(op);
        for (int i = 1; i < d; ++i) {
            CHECK(basis.eigenvalues(i - 1) <= basis.eigenvalues(i));
        }
        const Matrix& v = basis.eigenvectors;
        CHECK((v.adjoint() * v - Matrix::Identity(d, d)).norm() <= 1e-12);
        CHECK((op.entries * v - v * basis.eigenvalues.cast<cplx>().asDiagonal()).norm() <= 1e-12);
        for (int c = 0; c < d; ++c) {
            Eigen::Index row = 0;
            v.col(c).cwiseAbs().maxCoeff(&row);
            CHECK(std::abs(v(row, c).imag()) <= 1e-15);
            CHECK(v(row, c).real() > 0.0);
        }
    }
}

TEST_CASE("sampling")
{
    const auto sets = canonical_pairings(2, 2);
    const std::vector<Vector> coeffs(2, Vector::Ones(1));
    const auto psi = psi_mu(sets, coeffs, 1.0);
    const auto s = sample_correlation(psi, sets, 100000, 7);
    CHECK(s.re.num_settings == 2);
    CHECK(s.im.num_settings == 2);
    CHECK(s.re.shots_per_setting == 100000);
    CHECK(std::abs(s.re.mean - 2.0) <= 5.0 * s.re.std_error + 1e-9);
    CHECK(std::abs(s.im.mean) <= 5.0 * s.im.std_error + 1e-9);

    const auto mixed = sample_correlation(maximally_mixed(2, 4), canonical_pairings(2, 4), 100000, 8);
    CHECK(std::abs(mixed.re.mean) <= 5.0 * mixed.re.std_error);
    CHECK(std::abs(mixed.im.mean) <= 5.0 * mixed.im.std_error);
    CHECK(mixed.re.std_error > 0.0);

    const auto werner = sample_correlation(werner_state(2, 2, 0.6), sets, 100000, 9);
    CHECK(std::abs(werner.re.mean - 1.2) <= 5.0 * werner.re.std_error);

    const auto three = canonical_pairings(3, 3, kI);
    Rng rng(10);
    const auto psi3 = psi_mu(three, random_coefficients(three, rng), std::polar(1.0, 0.8));
    const auto exact = correlation(psi3, three);
    const auto s3 = sample_correlation(psi3, three, 100000, 11);
    CHECK(s3.re.num_settings == 4);
    CHECK(std::abs(s3.re.mean - exact.re_part) <= 5.0 * s3.re.std_error + 1e-9);
    CHECK(std::abs(s3.im.mean - exact.im_part) <= 5.0 * s3.im.std_error + 1e-9);

    const auto again = sample_correlation(psi3, three, 100000, 11);
    CHECK(again.re.mean == s3.re.mean);
    CHECK(again.im.std_error == s3.im.std_error);

    CHECK_THROWS_AS(sample_correlation(psi, sets, 0, 1), Error);
}
