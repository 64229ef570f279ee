#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sepbell/types.hpp"

namespace sepbell {

struct VerificationCheck {
    std::string name;
    std::string comparison;  // "abs_diff", "rel_diff", "le", "ge", "eq"
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyOptions {
    int num_sites = 2;
    int dim = 2;
    std::uint64_t seed = 1;
    Limits limits{};
    int random_states = 1000;        // Haar samples per index set for the basic bound
    int ensembles = 200;             // random separable ensembles
    int ensemble_terms = 4;
    int coefficient_draws = 10;      // random coefficient vectors for psi(mu)
    int optimizer_restarts = 6;
    std::uint64_t shots = 20000;     // per measurement setting
};

struct VerificationLedger {
    VerifyOptions options;
    std::vector<VerificationCheck> checks;

    [[nodiscard]] bool all_passed() const;
    [[nodiscard]] std::size_t failures() const;
};

/// Runs every invariant check at one (N, D): operator identities, bounds,
/// eigenvalue equations, closed forms, thresholds and oracle agreement.
/// Deterministic for a fixed seed.
VerificationLedger run_verification(const VerifyOptions& options);

nlohmann::json to_json(const VerificationLedger& ledger);

}  // namespace sepbell
