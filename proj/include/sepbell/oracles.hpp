#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sepbell/operators.hpp"
#include "sepbell/pairings.hpp"
#include "sepbell/states.hpp"

namespace sepbell {

struct OptimizationResult {
    double best_value = 0.0;
    std::vector<Vector> argument;        // one unit vector per site
    std::vector<double> site_values;     // |<psi_n|sigma_n|psi_n>|
    int iterations = 0;
    bool converged = false;
};

struct AscentOptions {
    int max_iterations = 20000;
    double tolerance = 1e-15;  // stop once an accepted step gains less than this
};

/// Maximizes |<psi|sigma_I|psi>| on the unit sphere of one qudit by
/// multi-restart projected gradient ascent.
OptimizationResult maximize_site(const PairingIndexSet& pairing, int restarts, Rng& rng,
                                 const AscentOptions& options = {});

/// Maximizes |prod_n <psi_n|sigma_{I_n}|psi_n>| over product states. The
/// objective factorizes, so each site is optimized on its own.
OptimizationResult maximize_over_products(std::span<const PairingIndexSet> pairings, int restarts,
                                          std::uint64_t seed, const AscentOptions& options = {});

struct SpectralExtremes {
    double min = 0.0;
    double max = 0.0;
    bool iterative = false;
};

/// Extreme eigenvalues of a Hermitian operator: dense eigensolve up to
/// limits.max_dense_dim, Lanczos above it.
SpectralExtremes spectral_extremes(const GlobalOperator& op, const Limits& limits = {});

/// Lanczos with full reorthogonalization, relative tolerance on both ends.
SpectralExtremes lanczos_extremes(const GlobalOperator& op, double rel_tolerance = 1e-8, std::uint64_t seed = 7,
                                  int max_iterations = 500);

/// Partial transpose over the listed sites (big-endian site numbering).
Matrix partial_transpose(const DensityMatrix& rho, std::span<const int> sites);

/// Minimum eigenvalue of the partial transpose; negative certifies entanglement.
double ppt_min_eigenvalue(const DensityMatrix& rho, std::span<const int> sites, const Limits& limits = {});

/// Bisects the Werner weight p at which the partial transpose over `sites`
/// first acquires a negative eigenvalue.
double ppt_threshold(int num_sites, int dim, std::span<const int> sites, const Limits& limits = {},
                     double tolerance = 1e-10);

/// 1 / (1 + D^{N-1})
double ppt_threshold_closed_form(int num_sites, int dim);

struct PptSweepRow {
    double p = 0.0;
    double min_eigenvalue = 0.0;
};

std::vector<PptSweepRow> ppt_sweep(int num_sites, int dim, std::span<const int> sites, std::span<const double> p_grid,
                                   const Limits& limits = {});

struct SampleEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t shots_per_setting = 0;
    int num_settings = 0;
};

struct SampledCorrelation {
    SampleEstimate re;  // estimate of Tr rho Sigma_I^+
    SampleEstimate im;  // estimate of Tr rho Sigma_I^-
};

/// Single-qudit eigenbasis in the reproducible convention: eigenvalues
/// ascending, each eigenvector's largest-magnitude component real positive
/// (first such component on ties).
struct LocalEigenbasis {
    Eigen::VectorXd eigenvalues;
    Matrix eigenvectors;  // columns
};

LocalEigenbasis local_eigenbasis(const LocalOperator& op);

/// Finite-shot estimate of Tr rho Sigma_I^{+/-}. Every setting of the
/// expansion is measured site by site in the local eigenbases, sampling each
/// outcome from its conditional marginal; per-term means combine with the
/// expansion coefficients.
SampledCorrelation sample_correlation(const State& state, std::span<const PairingIndexSet> pairings,
                                      std::uint64_t shots_per_setting, std::uint64_t seed,
                                      const Limits& limits = {});

}  // namespace sepbell
