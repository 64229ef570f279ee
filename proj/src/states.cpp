#include "sepbell/states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "sepbell/errors.hpp"

namespace sepbell {
namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kPsdTolerance = -1e-10;

void require_sites_dim(int num_sites, int dim)
{
    if (num_sites < 1) {
        throw Error(ErrorCode::InvalidParameter, "number of sites must be >= 1");
    }
    if (dim < 2) {
        throw Error(ErrorCode::InvalidDimension, "qudit dimension must be >= 2");
    }
}

Vector kron_vectors(std::span<const Vector> factors)
{
    Vector out = Vector::Ones(1);
    for (const auto& f : factors) {
        Vector next(out.size() * f.size());
        for (Eigen::Index a = 0; a < out.size(); ++a) {
            next.segment(a * f.size(), f.size()) = out(a) * f;
        }
        out = std::move(next);
    }
    return out;
}

Eigen::Index as_index(Index i)
{
    return static_cast<Eigen::Index>(i);
}

// sum_{i=0}^{D-1} D^{N-1} + D^{N-2} + ... + 1 times i: index of |i,...,i>
Index repeated_label_index(int num_sites, int dim, int label)
{
    Index idx = 0;
    for (int n = 0; n < num_sites; ++n) {
        idx = idx * static_cast<Index>(dim) + static_cast<Index>(label);
    }
    return idx;
}

}  // namespace

void PureState::validate() const
{
    require_sites_dim(num_sites, dim);
    if (size() != hilbert_dim(num_sites, dim)) {
        throw Error(ErrorCode::DimensionMismatch, "amplitude vector length is not D^N");
    }
    const double norm2 = amplitudes.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTolerance) {
        throw Error(ErrorCode::InvalidState, "pure state squared norm " + std::to_string(norm2) + " != 1");
    }
}

double DensityMatrix::min_eigenvalue() const
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const
{
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return entries.cwiseAbs2().sum();
}

void DensityMatrix::validate() const
{
    require_sites_dim(num_sites, dim);
    if (entries.rows() != entries.cols() || size() != hilbert_dim(num_sites, dim)) {
        throw Error(ErrorCode::DimensionMismatch, "density matrix is not D^N x D^N");
    }
    if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > kNormTolerance) {
        throw Error(ErrorCode::InvalidState, "density matrix is not Hermitian");
    }
    const cplx trace = entries.trace();
    if (std::abs(trace - cplx{1.0, 0.0}) > kNormTolerance) {
        throw Error(ErrorCode::InvalidState, "density matrix trace " + std::to_string(trace.real()) + " != 1");
    }
    const double lowest = min_eigenvalue();
    if (lowest < kPsdTolerance) {
        throw Error(ErrorCode::InvalidState, "density matrix has eigenvalue " + std::to_string(lowest));
    }
}

int SeparableEnsemble::num_sites() const
{
    return factors.empty() ? 0 : static_cast<int>(factors.front().size());
}

int SeparableEnsemble::dim() const
{
    return factors.empty() || factors.front().empty() ? 0 : static_cast<int>(factors.front().front().size());
}

void SeparableEnsemble::validate() const
{
    if (weights.empty() || weights.size() != factors.size()) {
        throw Error(ErrorCode::InvalidEnsemble, "ensemble needs one weight per product term");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) {
            throw Error(ErrorCode::InvalidEnsemble, "ensemble weights must be positive");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
        throw Error(ErrorCode::InvalidEnsemble, "ensemble weights sum to " + std::to_string(total));
    }
    const int sites = num_sites();
    const int d = dim();
    require_sites_dim(sites, d);
    for (const auto& term : factors) {
        if (static_cast<int>(term.size()) != sites) {
            throw Error(ErrorCode::InvalidEnsemble, "ragged ensemble: terms with different site counts");
        }
        for (const auto& f : term) {
            if (f.size() != d) {
                throw Error(ErrorCode::InvalidEnsemble, "ensemble factor of wrong dimension");
            }
            if (std::abs(f.squaredNorm() - 1.0) > kNormTolerance) {
                throw Error(ErrorCode::InvalidEnsemble, "ensemble factor is not unit norm");
            }
        }
    }
}

int num_sites_of(const State& state)
{
    return std::visit([](const auto& s) { return s.num_sites; }, state);
}

int dim_of(const State& state)
{
    return std::visit([](const auto& s) { return s.dim; }, state);
}

Vector random_unit_vector(int dim, Rng& rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(i) = cplx{re, im};
    }
    return v / v.norm();
}

std::vector<Vector> random_coefficients(std::span<const PairingIndexSet> pairings, Rng& rng)
{
    std::vector<Vector> out;
    for (const auto& p : pairings) {
        out.push_back(random_unit_vector(p.pair_count(), rng));
    }
    return out;
}

PureState product_state(std::span<const Vector> factors, Index cap)
{
    if (factors.empty()) {
        throw Error(ErrorCode::InvalidParameter, "product state needs at least one factor");
    }
    const auto dim = static_cast<int>(factors.front().size());
    for (const auto& f : factors) {
        if (f.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "product factors must share one dimension");
        }
    }
    const int num_sites = static_cast<int>(factors.size());
    require_sites_dim(num_sites, dim);
    checked_hilbert_dim(num_sites, dim, cap, "product_state");
    return {num_sites, dim, kron_vectors(factors)};
}

PureState random_product_state(int num_sites, int dim, std::uint64_t seed, Index cap)
{
    require_sites_dim(num_sites, dim);
    checked_hilbert_dim(num_sites, dim, cap, "random_product_state");
    Rng rng(seed);
    std::vector<Vector> factors;
    for (int n = 0; n < num_sites; ++n) {
        factors.push_back(random_unit_vector(dim, rng));
    }
    return product_state(factors, cap);
}

SeparableEnsemble random_separable_ensemble(int num_sites, int dim, int terms, Rng& rng)
{
    require_sites_dim(num_sites, dim);
    if (terms < 1) {
        throw Error(ErrorCode::InvalidEnsemble, "ensemble needs at least one term");
    }
    std::exponential_distribution<double> expo(1.0);
    SeparableEnsemble ensemble;
    double total = 0.0;
    for (int s = 0; s < terms; ++s) {
        double w = expo(rng);
        while (!(w > 0.0)) {
            w = expo(rng);
        }
        ensemble.weights.push_back(w);
        total += w;
        std::vector<Vector> term;
        for (int n = 0; n < num_sites; ++n) {
            term.push_back(random_unit_vector(dim, rng));
        }
        ensemble.factors.push_back(std::move(term));
    }
    for (auto& w : ensemble.weights) {
        w /= total;
    }
    return ensemble;
}

DensityMatrix ensemble_to_density(const SeparableEnsemble& ensemble, Index cap)
{
    ensemble.validate();
    const int num_sites = ensemble.num_sites();
    const int dim = ensemble.dim();
    const auto size = as_index(checked_hilbert_dim(num_sites, dim, cap, "ensemble_to_density"));
    DensityMatrix rho{num_sites, dim, Matrix::Zero(size, size), true};
    for (std::size_t s = 0; s < ensemble.weights.size(); ++s) {
        const Vector psi = kron_vectors(ensemble.factors[s]);
        rho.entries.noalias() += ensemble.weights[s] * (psi * psi.adjoint());
    }
    return rho;
}

DensityMatrix to_density(const PureState& psi, Index cap)
{
    checked_hilbert_dim(psi.num_sites, psi.dim, cap, "to_density");
    return {psi.num_sites, psi.dim, psi.amplitudes * psi.amplitudes.adjoint(), false};
}

PlusMinusStates plus_minus_states(std::span<const PairingIndexSet> pairings, std::span<const Vector> coeffs)
{
    if (pairings.size() != coeffs.size()) {
        throw Error(ErrorCode::InvalidCoefficients, "need one coefficient vector per site");
    }
    PlusMinusStates out;
    for (std::size_t n = 0; n < pairings.size(); ++n) {
        const auto& p = pairings[n];
        p.validate();
        const auto& c = coeffs[n];
        if (c.size() != p.pair_count()) {
            throw Error(ErrorCode::InvalidCoefficients, "site " + std::to_string(n) + " needs " +
                                                            std::to_string(p.pair_count()) + " coefficients, got " +
                                                            std::to_string(c.size()));
        }
        if (std::abs(c.squaredNorm() - 1.0) > kNormTolerance) {
            throw Error(ErrorCode::InvalidCoefficients, "site " + std::to_string(n) + " coefficients not unit norm");
        }
        Vector plus = Vector::Zero(p.dim);
        Vector minus = Vector::Zero(p.dim);
        for (int r = 0; r < p.pair_count(); ++r) {
            plus(p.pairs[static_cast<std::size_t>(r)].first) = c(r);
            minus(p.pairs[static_cast<std::size_t>(r)].second) = c(r);
        }
        out.plus.push_back(std::move(plus));
        out.minus.push_back(std::move(minus));
    }
    return out;
}

PureState psi_mu(std::span<const PairingIndexSet> pairings, std::span<const Vector> coeffs, cplx mu, Index cap)
{
    if (std::abs(std::abs(mu) - 1.0) > kNormTolerance) {
        throw Error(ErrorCode::InvalidPhase, "mu must be unimodular, got |mu| = " + std::to_string(std::abs(mu)));
    }
    if (pairings.empty()) {
        throw Error(ErrorCode::InvalidParameter, "need at least one site");
    }
    const int dim = pairings.front().dim;
    for (const auto& p : pairings) {
        if (p.dim != dim) {
            throw Error(ErrorCode::DimensionMismatch, "all sites must share one qudit dimension");
        }
    }
    const int num_sites = static_cast<int>(pairings.size());
    checked_hilbert_dim(num_sites, dim, cap, "psi_mu");
    const auto pm = plus_minus_states(pairings, coeffs);
    const Vector amps = (kron_vectors(pm.plus) + mu * kron_vectors(pm.minus)) / std::numbers::sqrt2;
    return {num_sites, dim, amps};
}

PureState maximally_entangled(int num_sites, int dim, Index cap)
{
    require_sites_dim(num_sites, dim);
    const auto size = as_index(checked_hilbert_dim(num_sites, dim, cap, "maximally_entangled"));
    Vector amps = Vector::Zero(size);
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int i = 0; i < dim; ++i) {
        amps(as_index(repeated_label_index(num_sites, dim, i))) = amp;
    }
    return {num_sites, dim, amps};
}

DensityMatrix werner_state(int num_sites, int dim, double p, Index cap)
{
    require_sites_dim(num_sites, dim);
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "Werner weight p must lie in [0, 1], got " + std::to_string(p));
    }
    const auto size = as_index(checked_hilbert_dim(num_sites, dim, cap, "werner_state"));
    DensityMatrix rho{num_sites, dim, Matrix::Zero(size, size), false};
    const double mixed = (1.0 - p) / static_cast<double>(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        rho.entries(i, i) = mixed;
    }
    const double coherent = p / static_cast<double>(dim);
    for (int i = 0; i < dim; ++i) {
        for (int l = 0; l < dim; ++l) {
            rho.entries(as_index(repeated_label_index(num_sites, dim, i)),
                        as_index(repeated_label_index(num_sites, dim, l))) += coherent;
        }
    }
    return rho;
}

DensityMatrix maximally_mixed(int num_sites, int dim, Index cap)
{
    auto rho = werner_state(num_sites, dim, 0.0, cap);
    rho.separable_certificate = true;  // 1/D^N = (x)_n 1/D
    return rho;
}

double fidelity(const PureState& a, const PureState& b)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "fidelity of states on different spaces");
    }
    return std::norm(a.amplitudes.dot(b.amplitudes));
}

}  // namespace sepbell
