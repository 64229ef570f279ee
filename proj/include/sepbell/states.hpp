#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "sepbell/pairings.hpp"
#include "sepbell/types.hpp"

namespace sepbell {

using Rng = std::mt19937_64;

struct PureState {
    int num_sites = 0;
    int dim = 0;
    Vector amplitudes;

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(amplitudes.size()); }
    /// Throws InvalidState unless the squared norm is 1 within 1e-12.
    void validate() const;
};

struct DensityMatrix {
    int num_sites = 0;
    int dim = 0;
    Matrix entries;
    /// Set when built as a convex sum of product states.
    bool separable_certificate = false;

    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(entries.rows()); }
    [[nodiscard]] double min_eigenvalue() const;
    [[nodiscard]] double purity() const;
    /// Hermitian to 1e-12, unit trace to 1e-12, min eigenvalue >= -1e-10.
    void validate() const;
};

/// sum_s weights[s] (x)_n |factors[s][n]><factors[s][n]|
struct SeparableEnsemble {
    std::vector<double> weights;
    std::vector<std::vector<Vector>> factors;

    [[nodiscard]] int num_sites() const;
    [[nodiscard]] int dim() const;
    void validate() const;
};

using State = std::variant<PureState, DensityMatrix>;

[[nodiscard]] int num_sites_of(const State& state);
[[nodiscard]] int dim_of(const State& state);

/// Haar-random unit vector: normalized i.i.d. standard complex Gaussians.
Vector random_unit_vector(int dim, Rng& rng);

/// Normalized i.i.d. complex Gaussian M-vector, for psi_mu coefficients.
std::vector<Vector> random_coefficients(std::span<const PairingIndexSet> pairings, Rng& rng);

/// Big-endian tensor product of single-site vectors.
PureState product_state(std::span<const Vector> factors, Index cap = Limits{}.max_operator_dim);

PureState random_product_state(int num_sites, int dim, std::uint64_t seed, Index cap = Limits{}.max_operator_dim);

/// `terms` product terms with Dirichlet(1) weights.
SeparableEnsemble random_separable_ensemble(int num_sites, int dim, int terms, Rng& rng);

DensityMatrix ensemble_to_density(const SeparableEnsemble& ensemble, Index cap = Limits{}.max_dense_dim);

DensityMatrix to_density(const PureState& psi, Index cap = Limits{}.max_dense_dim);

struct PlusMinusStates {
    std::vector<Vector> plus;   // sum_r c_r |i_r>
    std::vector<Vector> minus;  // sum_r c_r |j_r>
};

/// Per-site |+> and |-> from shared coefficient vectors of length M.
PlusMinusStates plus_minus_states(std::span<const PairingIndexSet> pairings, std::span<const Vector> coeffs);

/// (|+,...,+> + mu |-,...,->) / sqrt(2), |mu| = 1.
PureState psi_mu(std::span<const PairingIndexSet> pairings, std::span<const Vector> coeffs, cplx mu,
                 Index cap = Limits{}.max_operator_dim);

/// (1/sqrt(D)) sum_i |i,...,i>
PureState maximally_entangled(int num_sites, int dim, Index cap = Limits{}.max_operator_dim);

/// p |psi_max><psi_max| + (1-p) 1/D^N, p in [0, 1].
DensityMatrix werner_state(int num_sites, int dim, double p, Index cap = Limits{}.max_dense_dim);

DensityMatrix maximally_mixed(int num_sites, int dim, Index cap = Limits{}.max_dense_dim);

/// |<a|b>|^2
double fidelity(const PureState& a, const PureState& b);

}  // namespace sepbell
