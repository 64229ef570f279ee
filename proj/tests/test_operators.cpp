#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sepbell/errors.hpp"
#include "sepbell/operators.hpp"
#include "sepbell/states.hpp"

using namespace sepbell;

namespace {

Matrix pauli_x()
{
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix pauli_y()
{
    Matrix m(2, 2);
    m << 0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0;
    return m;
}

double max_abs(const Matrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Matrix projector(int dim, std::optional<int> k)
{
    Matrix p = Matrix::Zero(dim, dim);
    if (k) {
        p(*k, *k) = 1.0;
    }
    return p;
}

std::vector<PairingIndexSet> random_sites(int num_sites, int dim, cplx eta, Rng& rng)
{
    const auto all = enumerate_pairings(dim, eta);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    std::vector<PairingIndexSet> out;
    for (int n = 0; n < num_sites; ++n) {
        out.push_back(all[pick(rng)]);
    }
    return out;
}

}  // namespace

TEST_CASE("local_sigma entries")
{
    const auto two = local_sigma(canonical_pairing(2));
    Matrix expected(2, 2);
    expected << 0.0, 2.0, 0.0, 0.0;
    CHECK(two.entries == expected);
    // 2|0><1| is sigma_x + i sigma_y; its transpose is sigma_x - i sigma_y
    CHECK(max_abs(two.entries - (pauli_x() + kI * pauli_y())) == 0.0);

    PairingIndexSet three{3, {{0, 1}}, 2, cplx{1.0, 0.0}};
    const auto s3 = local_sigma(three);
    CHECK(s3.entries(0, 1) == cplx{2.0, 0.0});
    CHECK(s3.entries(2, 2) == cplx{1.0, 0.0});
    CHECK((s3.entries.array() != cplx{0.0, 0.0}).count() == 2);

    const auto s4 = local_sigma(canonical_pairing(4));
    CHECK(s4.entries(0, 1) == cplx{2.0, 0.0});
    CHECK(s4.entries(2, 3) == cplx{2.0, 0.0});
    CHECK((s4.entries.array() != cplx{0.0, 0.0}).count() == 2);
}

TEST_CASE("local sigma^+ and sigma^- for qubits are Pauli matrices")
{
    const auto p = canonical_pairing(2);
    CHECK(max_abs(local_sigma_plus(p).entries - pauli_x()) == 0.0);
    CHECK(max_abs(local_sigma_minus(p).entries - pauli_y()) == 0.0);
}

TEST_CASE("square identities at D = 3 by explicit multiplication")
{
    SUBCASE("eta = 1: (sigma^+)^2 = 1")
    {
        const auto plus = local_sigma_plus(canonical_pairing(3, cplx{1.0, 0.0}));
        CHECK(max_abs(plus.entries * plus.entries - Matrix::Identity(3, 3)) == 0.0);
    }
    SUBCASE("eta = i: (sigma^+)^2 = 1 - |2><2| and (sigma^-)^2 = 1")
    {
        const auto p = canonical_pairing(3, kI);
        const auto plus = local_sigma_plus(p);
        const auto minus = local_sigma_minus(p);
        Matrix expected = Matrix::Identity(3, 3);
        expected(2, 2) = 0.0;
        CHECK(max_abs(plus.entries * plus.entries - expected) == 0.0);
        CHECK(max_abs(minus.entries * minus.entries - Matrix::Identity(3, 3)) == 0.0);
    }
}

TEST_CASE("square identities hold for every index set, D <= 7")
{
    const std::vector<cplx> phases{cplx{1.0, 0.0}, kI, std::polar(1.0, std::numbers::pi / 3.0),
                                   std::polar(1.0, -2.1)};
    for (int dim = 2; dim <= 7; ++dim) {
        for (const cplx eta : phases) {
            for (const auto& s : enumerate_pairings(dim, eta)) {
                CAPTURE(s.key());
                const auto plus = local_sigma_plus(s);
                const auto minus = local_sigma_minus(s);
                const Matrix id = Matrix::Identity(dim, dim);
                const Matrix k = projector(dim, s.unpaired);
                CHECK(max_abs(plus.entries * plus.entries - (id - std::pow(s.eta.imag(), 2) * k)) <= 1e-14);
                CHECK(max_abs(minus.entries * minus.entries - (id - std::pow(s.eta.real(), 2) * k)) <= 1e-14);
                CHECK(plus.is_hermitian(1e-14));
                CHECK(minus.is_hermitian(1e-14));
                CHECK(plus.spectral_radius() <= 1.0 + 1e-12);
                CHECK(minus.spectral_radius() <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("basic inequality |<psi|sigma_I|psi>| <= 1 on random states")
{
    Rng rng(2024);
    for (int dim = 2; dim <= 7; ++dim) {
        for (const auto& s : enumerate_pairings(dim, std::polar(1.0, 0.4))) {
            const Matrix sigma = local_sigma(s).entries;
            double worst = 0.0;
            for (int t = 0; t < 2000; ++t) {
                const Vector psi = random_unit_vector(dim, rng);
                worst = std::max(worst, std::abs(psi.dot(sigma * psi)));
            }
            CHECK(worst <= 1.0 + 1e-12);
        }
        // the bound is attained by (|i_1> + |j_1>)/sqrt(2)
        const auto s = canonical_pairing(dim);
        Vector psi = Vector::Zero(dim);
        psi(s.pairs[0].first) = psi(s.pairs[0].second) = 1.0 / std::numbers::sqrt2;
        CHECK(std::abs(psi.dot(local_sigma(s).entries * psi)) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("global_sigma small cases")
{
    const auto one = canonical_pairings(1, 4);
    const auto g1 = global_sigma(one);
    CHECK(g1.to_dense() == local_sigma(one[0]).entries);

    // N = 2, D = 2: sigma (x) sigma = 4 |00><11|
    const auto g2 = global_sigma(canonical_pairings(2, 2));
    REQUIRE(g2.nonzeros() == 1);
    CHECK(g2.triplets()[0] == Triplet{0, 3, cplx{4.0, 0.0}});

    const auto g3 = global_sigma(canonical_pairings(3, 2));
    CHECK(g3.nonzeros() == 1);
    CHECK(g3.triplets()[0] == Triplet{0, 7, cplx{8.0, 0.0}});
}

TEST_CASE("global operators equal the dense Kronecker oracle")
{
    Rng rng(99);
    for (int num_sites = 1; num_sites <= 4; ++num_sites) {
        for (int dim = 2; dim <= 5; ++dim) {
            if (hilbert_dim(num_sites, dim) > 256) {
                continue;
            }
            for (int trial = 0; trial < 5; ++trial) {
                const auto sets = random_sites(num_sites, dim, std::polar(1.0, 0.3 * trial), rng);
                std::vector<oracle::Matrix> factors;
                for (const auto& s : sets) {
                    factors.push_back(oracle::dense_sigma(dim, s.pairs, s.unpaired.value_or(-1), s.eta));
                }
                const Matrix dense = oracle::dense_kron(factors);
                const auto sigma = global_sigma(sets);
                CHECK(max_abs(sigma.to_dense() - dense) == 0.0);
                const auto local_nz = sets[0].local_nonzeros();
                CHECK(sigma.nonzeros() == static_cast<std::size_t>(std::pow(local_nz, num_sites)));

                const Matrix plus = (dense + dense.adjoint()) / 2.0;
                const Matrix minus = (dense - dense.adjoint()) / cplx{0.0, 2.0};
                CHECK(max_abs(global_sigma_plus(sets).to_dense() - plus) <= 1e-14);
                CHECK(max_abs(global_sigma_minus(sets).to_dense() - minus) <= 1e-14);
                CHECK(global_sigma_plus(sets).is_hermitian(1e-14));
                CHECK(global_sigma_minus(sets).is_hermitian(1e-14));
                // Sigma = Sigma^+ + i Sigma^- as sparse data, exactly
                CHECK(GlobalOperator::combine(1.0, global_sigma_plus(sets), kI, global_sigma_minus(sets)) == sigma);
            }
        }
    }
}

TEST_CASE("spectra of Sigma^+ from the dense oracle")
{
    auto dense_plus = [](int num_sites, int dim) {
        const auto s = canonical_pairing(dim);
        std::vector<oracle::Matrix> factors(static_cast<std::size_t>(num_sites),
                                            oracle::dense_sigma(dim, s.pairs, s.unpaired.value_or(-1), s.eta));
        const Matrix dense = oracle::dense_kron(factors);
        return Matrix((dense + dense.adjoint()) / 2.0);
    };
    CHECK(oracle::max_eigenvalue(dense_plus(2, 2)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(oracle::min_eigenvalue(dense_plus(2, 2)) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(oracle::max_eigenvalue(dense_plus(3, 2)) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(oracle::min_eigenvalue(dense_plus(3, 2)) == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("setting decomposition")
{
    SUBCASE("N = 1")
    {
        const auto sets = canonical_pairings(1, 3);
        const auto dec = setting_decomposition(sets);
        REQUIRE(dec.plus_terms.size() == 1);
        REQUIRE(dec.minus_terms.size() == 1);
        CHECK(dec.plus_terms[0].coefficient == 1.0);
        CHECK(dec.plus_terms[0].pattern == std::vector<Part>{Part::Plus});
        CHECK(dec.minus_terms[0].coefficient == 1.0);
        CHECK(dec.minus_terms[0].pattern == std::vector<Part>{Part::Minus});
    }
    SUBCASE("N = 2 matches the symbolic expansion")
    {
        const auto dec = setting_decomposition(canonical_pairings(2, 2));
        REQUIRE(dec.plus_terms.size() == 2);
        REQUIRE(dec.minus_terms.size() == 2);
        // Sigma^+ = s+ s+ - s- s-
        CHECK(dec.plus_terms[0].pattern == std::vector<Part>{Part::Plus, Part::Plus});
        CHECK(dec.plus_terms[0].coefficient == 1.0);
        CHECK(dec.plus_terms[1].pattern == std::vector<Part>{Part::Minus, Part::Minus});
        CHECK(dec.plus_terms[1].coefficient == -1.0);
        // Sigma^- = s+ s- + s- s+
        CHECK(dec.minus_terms[0].pattern == std::vector<Part>{Part::Plus, Part::Minus});
        CHECK(dec.minus_terms[1].pattern == std::vector<Part>{Part::Minus, Part::Plus});
        CHECK(dec.minus_terms[0].coefficient == 1.0);
        CHECK(dec.minus_terms[1].coefficient == 1.0);
    }
    SUBCASE("2^{N-1} terms and exact reconstruction")
    {
        Rng rng(5);
        for (int num_sites = 1; num_sites <= 5; ++num_sites) {
            for (int dim : {2, 3, 4}) {
                if (hilbert_dim(num_sites, dim) > 1024) {
                    continue;
                }
                const auto sets = random_sites(num_sites, dim, std::polar(1.0, 1.1), rng);
                const auto dec = setting_decomposition(sets);
                CHECK(dec.plus_terms.size() == (std::size_t{1} << (num_sites - 1)));
                CHECK(dec.minus_terms.size() == (std::size_t{1} << (num_sites - 1)));
                const Matrix plus = global_sigma_plus(sets).to_dense();
                const Matrix minus = global_sigma_minus(sets).to_dense();
                CHECK(max_abs(reconstruct(dec.plus_terms).to_dense() - plus) <= 1e-12);
                CHECK(max_abs(reconstruct(dec.minus_terms).to_dense() - minus) <= 1e-12);
            }
        }
    }
}

TEST_CASE("sparse arithmetic")
{
    const auto sigma = global_sigma(canonical_pairings(2, 3));
    Rng rng(3);
    const Vector x = random_unit_vector(9, rng);
    const Matrix dense = sigma.to_dense();
    CHECK((sigma.apply(x) - dense * x).norm() <= 1e-14);
    CHECK(std::abs(sigma.expectation(x) - x.dot(dense * x)) <= 1e-14);
    const Matrix rho = x * x.adjoint();
    CHECK(std::abs(sigma.trace_with(rho) - (rho * dense).trace()) <= 1e-14);
    CHECK(max_abs(sigma.adjoint().to_dense() - dense.adjoint()) == 0.0);
    CHECK_FALSE(sigma.is_hermitian());
}

TEST_CASE("conjugation by a local unitary")
{
    const auto s = local_sigma_plus(canonical_pairing(2));
    Matrix hadamard(2, 2);
    hadamard << 1.0, 1.0, 1.0, -1.0;
    hadamard /= std::numbers::sqrt2;
    const auto z = conjugate(s, hadamard);
    Matrix pauli_z(2, 2);
    pauli_z << 1.0, 0.0, 0.0, -1.0;
    CHECK(max_abs(z.entries - pauli_z) <= 1e-15);
    CHECK_THROWS_AS(conjugate(s, Matrix::Ones(2, 2)), Error);
}

TEST_CASE("operator errors")
{
    std::vector<PairingIndexSet> mixed{canonical_pairing(2), canonical_pairing(4)};
    try {
        global_sigma(mixed);
        FAIL("expected mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    try {
        global_sigma(canonical_pairings(9, 4));
        FAIL("expected size limit");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SizeLimit);
        CHECK(std::string(e.what()).find("65536") != std::string::npos);
    }
    CHECK_NOTHROW(global_sigma(canonical_pairings(9, 4), 1 << 20));
    CHECK_THROWS_AS(global_sigma(canonical_pairings(3, 4), 63), Error);
}
