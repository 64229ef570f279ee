#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sepbell/operators.hpp"
#include "sepbell/pairings.hpp"
#include "sepbell/states.hpp"

namespace sepbell {

/// |value| must exceed 1 by this much before entanglement is certified.
inline constexpr double kCertificationTolerance = 1e-9;

struct SeparabilityVerdict {
    bool modulus_violated = false;    // |Tr rho Sigma| > 1
    bool quadratic_violated = false;  // re^2 + im^2 > 1
    bool re_linear_violated = false;  // |re| > 1
    bool im_linear_violated = false;  // |im| > 1
    bool sum_linear_violated = false; // |re| + |im| > sqrt(2)

    [[nodiscard]] bool certified() const noexcept
    {
        return modulus_violated || quadratic_violated || re_linear_violated || im_linear_violated ||
               sum_linear_violated;
    }
};

struct LhvVerdict {
    bool odd_sites = false;
    bool re_violated = false;   // odd N: |re| > sqrt(2)^{N-1}
    bool im_violated = false;   // odd N: |im| > sqrt(2)^{N-1}
    bool sum_violated = false;  // even N: |re| + |im| > sqrt(2)^N

    [[nodiscard]] bool violated() const noexcept { return re_violated || im_violated || sum_violated; }
};

struct CorrelationReport {
    std::vector<PairingIndexSet> index_sets;
    cplx value;              // Tr rho Sigma_I
    double re_part = 0.0;    // Tr rho Sigma_I^+
    double im_part = 0.0;    // Tr rho Sigma_I^-
    double separability_bound = 1.0;
    double quadratic_lhs = 0.0;
    double lhv_bound_odd = 0.0;       // sqrt(2)^{N-1}
    double lhv_bound_even_sum = 0.0;  // sqrt(2)^N
    double violation_ratio_sep = 0.0;
    double violation_ratio_lhv = 0.0;
    bool entangled_certified = false;
    bool lhv_violated = false;

    [[nodiscard]] int num_sites() const noexcept { return static_cast<int>(index_sets.size()); }
};

/// Exact Tr rho Sigma_I (or <psi|Sigma_I|psi>) with every report field filled.
CorrelationReport correlation(const State& state, std::span<const PairingIndexSet> pairings,
                              const Limits& limits = {});

/// Fills the derived fields of a report from value, re_part and im_part.
void finalize_report(CorrelationReport& report);

SeparabilityVerdict check_separability(const CorrelationReport& report);
LhvVerdict check_lhv(const CorrelationReport& report);

/// Closed forms for the Werner family with one index set on every site (eta = 1 for odd D).
double werner_correlation_closed_form(int num_sites, int dim, double p);
/// Smallest p with Tr rho_W Sigma_I > 1; 1 when no p < 1 violates.
double werner_threshold_closed_form(int num_sites, int dim);

struct WernerSweepRow {
    double p = 0.0;
    cplx value;
    bool sep_violated = false;
    bool lhv_violated = false;
};

struct WernerSweep {
    int num_sites = 0;
    int dim = 0;
    std::vector<WernerSweepRow> rows;
    double numeric_threshold = 1.0;
    double closed_form_threshold = 1.0;
};

inline constexpr double kThresholdTolerance = 1e-8;

/// Evaluates Werner correlations on the grid from explicit density matrices
/// and bisects |Tr rho_W Sigma_I| = 1 on [0, 1].
WernerSweep werner_sweep(int num_sites, int dim, std::span<const double> p_grid, const Limits& limits = {});

/// Parses "start:stop:step" into an inclusive grid.
std::vector<double> parse_grid(const std::string& text);

enum class ScanStrategy { Exhaustive, Greedy, Canonical };

std::optional<ScanStrategy> parse_strategy(const std::string& name);
std::string to_string(ScanStrategy strategy);

struct ScanOptions {
    ScanStrategy strategy = ScanStrategy::Exhaustive;
    cplx eta{1.0, 0.0};  // phase on every odd-D set
    Limits limits{};
    unsigned threads = 0;     // 0: hardware concurrency
    int max_greedy_sweeps = 64;
};

struct ScanResult {
    CorrelationReport best;
    std::uint64_t examined = 0;
};

/// Index-set search maximizing |Tr rho Sigma_I|. Ties keep the first
/// combination in lexicographic order (site 0 most significant).
ScanResult scan_index_sets(const State& state, const ScanOptions& options = {});

/// Number of index-set combinations an exhaustive scan visits: count_pairings(D)^N.
std::uint64_t exhaustive_combinations(int num_sites, int dim);

}  // namespace sepbell
