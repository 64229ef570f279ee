#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "sepbell/operators.hpp"
#include "sepbell/oracles.hpp"
#include "sepbell/pairings.hpp"
#include "sepbell/states.hpp"
#include "sepbell/witnesses.hpp"

namespace sepbell {

using json = nlohmann::json;

// Complex numbers travel as [re, im].
json complex_to_json(cplx z);
cplx complex_from_json(const json& j);

void to_json(json& j, const PairingIndexSet& p);
void from_json(const json& j, PairingIndexSet& p);

// {"n", "d", "triplets": [[row, col, re, im], ...]}, big-endian indices.
void to_json(json& j, const GlobalOperator& op);
void from_json(const json& j, GlobalOperator& op);

void to_json(json& j, const PureState& s);
void from_json(const json& j, PureState& s);
void to_json(json& j, const DensityMatrix& s);
void from_json(const json& j, DensityMatrix& s);
void to_json(json& j, const SeparableEnsemble& e);
void from_json(const json& j, SeparableEnsemble& e);

void to_json(json& j, const SeparabilityVerdict& v);
void to_json(json& j, const LhvVerdict& v);
void to_json(json& j, const CorrelationReport& r);
void to_json(json& j, const SampleEstimate& s);
void to_json(json& j, const OptimizationResult& r);
void to_json(json& j, const SpectralExtremes& s);

/// Pure state, density matrix, or ensemble (converted to a certified density matrix).
State state_from_json(const json& j, const Limits& limits = {});
json state_to_json(const State& state);

/// Reads a JSON document from disk; throws Format on I/O or parse failure.
json read_json_file(const std::string& path);

/// Reals with 17 significant digits, '.' decimal.
std::string format_real(double x);

/// Columns p, re, im, abs, sep_violated, lhv_violated.
void write_werner_csv(std::ostream& out, const WernerSweep& sweep);
/// Columns p, min_eigenvalue.
void write_ppt_csv(std::ostream& out, std::span<const PptSweepRow> rows);

}  // namespace sepbell
