#include "sepbell/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "sepbell/errors.hpp"

namespace sepbell {
namespace {

void require_matching(const State& state, std::span<const PairingIndexSet> pairings)
{
    if (static_cast<int>(pairings.size()) != num_sites_of(state)) {
        throw Error(ErrorCode::DimensionMismatch, "state has " + std::to_string(num_sites_of(state)) +
                                                      " sites but " + std::to_string(pairings.size()) +
                                                      " index sets were given");
    }
    for (const auto& p : pairings) {
        if (p.dim != dim_of(state)) {
            throw Error(ErrorCode::DimensionMismatch, "index set dimension " + std::to_string(p.dim) +
                                                          " does not match state dimension " +
                                                          std::to_string(dim_of(state)));
        }
    }
}

cplx evaluate(const State& state, const GlobalOperator& op)
{
    if (const auto* psi = std::get_if<PureState>(&state)) {
        return op.expectation(psi->amplitudes);
    }
    return op.trace_with(std::get<DensityMatrix>(state).entries);
}

double sqrt2_pow(int exponent)
{
    return std::pow(std::numbers::sqrt2, exponent);
}

}  // namespace

void finalize_report(CorrelationReport& report)
{
    const int n = report.num_sites();
    report.separability_bound = 1.0;
    report.quadratic_lhs = report.re_part * report.re_part + report.im_part * report.im_part;
    report.lhv_bound_odd = sqrt2_pow(n - 1);
    report.lhv_bound_even_sum = sqrt2_pow(n);
    report.violation_ratio_sep = std::abs(report.value) / report.separability_bound;
    if (n % 2 == 1) {
        report.violation_ratio_lhv = std::max(std::abs(report.re_part), std::abs(report.im_part)) / report.lhv_bound_odd;
    } else {
        report.violation_ratio_lhv = (std::abs(report.re_part) + std::abs(report.im_part)) / report.lhv_bound_even_sum;
    }
    report.entangled_certified = std::abs(report.value) > report.separability_bound + kCertificationTolerance;
    report.lhv_violated = check_lhv(report).violated();
}

CorrelationReport correlation(const State& state, std::span<const PairingIndexSet> pairings, const Limits& limits)
{
    require_matching(state, pairings);
    const auto sigma = global_sigma(pairings, limits.max_operator_dim);
    CorrelationReport report;
    report.index_sets.assign(pairings.begin(), pairings.end());
    report.value = evaluate(state, sigma);
    report.re_part = evaluate(state, hermitian_part(sigma)).real();
    report.im_part = evaluate(state, antihermitian_part(sigma)).real();
    finalize_report(report);
    return report;
}

SeparabilityVerdict check_separability(const CorrelationReport& report)
{
    const double tol = kCertificationTolerance;
    SeparabilityVerdict v;
    v.modulus_violated = std::abs(report.value) > 1.0 + tol;
    v.quadratic_violated = report.re_part * report.re_part + report.im_part * report.im_part > 1.0 + tol;
    v.re_linear_violated = std::abs(report.re_part) > 1.0 + tol;
    v.im_linear_violated = std::abs(report.im_part) > 1.0 + tol;
    v.sum_linear_violated = std::abs(report.re_part) + std::abs(report.im_part) > std::numbers::sqrt2 + tol;
    return v;
}

LhvVerdict check_lhv(const CorrelationReport& report)
{
    const int n = report.num_sites();
    const double tol = kCertificationTolerance;
    LhvVerdict v;
    v.odd_sites = n % 2 == 1;
    if (v.odd_sites) {
        const double bound = sqrt2_pow(n - 1);
        v.re_violated = std::abs(report.re_part) > bound + tol;
        v.im_violated = std::abs(report.im_part) > bound + tol;
    } else {
        v.sum_violated = std::abs(report.re_part) + std::abs(report.im_part) > sqrt2_pow(n) + tol;
    }
    return v;
}

double werner_correlation_closed_form(int num_sites, int dim, double p)
{
    const double half_max = std::ldexp(1.0, num_sites - 1);
    if (dim % 2 == 0) {
        return p * half_max;
    }
    const double d = dim;
    return p * (half_max * (d - 1.0) / d + 1.0 / d) + (1.0 - p) / std::pow(d, num_sites);
}

double werner_threshold_closed_form(int num_sites, int dim)
{
    if (dim % 2 == 0) {
        return std::ldexp(1.0, -(num_sites - 1));
    }
    const double d = dim;
    const double numerator = std::pow(d, num_sites) - 1.0;
    const double denominator = std::pow(2.0 * d, num_sites - 1) * (d - 1.0) + std::pow(d, num_sites - 1) - 1.0;
    return numerator / denominator;
}

WernerSweep werner_sweep(int num_sites, int dim, std::span<const double> p_grid, const Limits& limits)
{
    for (double p : p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorCode::InvalidParameter, "sweep grid value " + std::to_string(p) + " outside [0, 1]");
        }
    }
    const auto pairings = canonical_pairings(num_sites, dim);
    const auto sigma = global_sigma(pairings, limits.max_operator_dim);
    const auto plus = hermitian_part(sigma);
    const auto minus = antihermitian_part(sigma);
    auto value_at = [&](double p) {
        return sigma.trace_with(werner_state(num_sites, dim, p, limits.max_dense_dim).entries);
    };

    WernerSweep sweep;
    sweep.num_sites = num_sites;
    sweep.dim = dim;
    for (double p : p_grid) {
        const auto rho = werner_state(num_sites, dim, p, limits.max_dense_dim);
        CorrelationReport report;
        report.index_sets = pairings;
        report.value = sigma.trace_with(rho.entries);
        report.re_part = plus.trace_with(rho.entries).real();
        report.im_part = minus.trace_with(rho.entries).real();
        finalize_report(report);
        sweep.rows.push_back({p, report.value, check_separability(report).certified(), report.lhv_violated});
    }

    auto excess = [&](double p) { return std::abs(value_at(p)) - 1.0; };
    if (excess(1.0) <= kCertificationTolerance) {
        sweep.numeric_threshold = 1.0;
    } else {
        double lo = 0.0;
        double hi = 1.0;
        while (hi - lo > kThresholdTolerance) {
            const double mid = 0.5 * (lo + hi);
            (excess(mid) > 0.0 ? hi : lo) = mid;
        }
        sweep.numeric_threshold = 0.5 * (lo + hi);
    }
    sweep.closed_form_threshold = werner_threshold_closed_form(num_sites, dim);
    return sweep;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> parts;
    std::stringstream in(text);
    std::string field;
    while (std::getline(in, field, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(field, &used));
            if (used != field.size()) {
                throw std::invalid_argument(field);
            }
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParameter, "bad grid '" + text + "', expected start:stop:step");
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
        throw Error(ErrorCode::InvalidParameter, "bad grid '" + text + "', expected start:stop:step with step > 0");
    }
    const double start = parts[0];
    const double stop = parts[1];
    const double step = parts[2];
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid.push_back(start + static_cast<double>(i) * step);
    }
    if (std::abs(grid.back() - stop) <= step * 1e-9) {
        grid.back() = stop;
    }
    return grid;
}

std::optional<ScanStrategy> parse_strategy(const std::string& name)
{
    if (name == "exhaustive") {
        return ScanStrategy::Exhaustive;
    }
    if (name == "greedy") {
        return ScanStrategy::Greedy;
    }
    if (name == "canonical") {
        return ScanStrategy::Canonical;
    }
    return std::nullopt;
}

std::string to_string(ScanStrategy strategy)
{
    switch (strategy) {
    case ScanStrategy::Exhaustive: return "exhaustive";
    case ScanStrategy::Greedy: return "greedy";
    case ScanStrategy::Canonical: return "canonical";
    }
    return "unknown";
}

std::uint64_t exhaustive_combinations(int num_sites, int dim)
{
    const std::uint64_t per_site = count_pairings(dim);
    std::uint64_t total = 1;
    for (int n = 0; n < num_sites; ++n) {
        if (total > std::numeric_limits<std::uint64_t>::max() / per_site) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        total *= per_site;
    }
    return total;
}

ScanResult scan_index_sets(const State& state, const ScanOptions& options)
{
    const int num_sites = num_sites_of(state);
    const int dim = dim_of(state);
    checked_hilbert_dim(num_sites, dim, options.limits.max_operator_dim, "scan_index_sets");
    const auto candidates = enumerate_pairings(dim, options.eta);
    const auto site_count = static_cast<std::uint64_t>(candidates.size());

    auto magnitude = [&](const std::vector<PairingIndexSet>& sets) {
        return std::abs(evaluate(state, global_sigma(sets, options.limits.max_operator_dim)));
    };

    ScanResult result;
    std::vector<PairingIndexSet> best_sets;

    switch (options.strategy) {
    case ScanStrategy::Canonical: {
        best_sets = canonical_pairings(num_sites, dim, options.eta);
        result.examined = 1;
        break;
    }
    case ScanStrategy::Exhaustive: {
        const std::uint64_t total = exhaustive_combinations(num_sites, dim);
        if (total > options.limits.max_scan_combinations) {
            throw Error(ErrorCode::Strategy, "exhaustive scan needs " + std::to_string(total) +
                                                 " combinations, above the cap of " +
                                                 std::to_string(options.limits.max_scan_combinations) +
                                                 "; use the greedy strategy");
        }
        auto decode = [&](std::uint64_t combo) {
            std::vector<PairingIndexSet> sets(static_cast<std::size_t>(num_sites));
            for (int n = num_sites - 1; n >= 0; --n) {
                sets[static_cast<std::size_t>(n)] = candidates[combo % site_count];
                combo /= site_count;
            }
            return sets;
        };
        struct Best {
            double magnitude = -1.0;
            std::uint64_t combo = 0;
        };
        unsigned threads = options.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.threads;
        threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, total));
        std::vector<Best> partial(threads);
        auto work = [&](unsigned chunk) {
            const std::uint64_t begin = total * chunk / threads;
            const std::uint64_t end = total * (chunk + 1) / threads;
            Best local;
            for (std::uint64_t combo = begin; combo < end; ++combo) {
                const double m = magnitude(decode(combo));
                if (m > local.magnitude) {
                    local = {m, combo};
                }
            }
            partial[chunk] = local;
        };
        if (threads == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned chunk = 0; chunk < threads; ++chunk) {
                pool.emplace_back(work, chunk);
            }
        }
        // chunks cover increasing combination ranges, so a strict comparison
        // reproduces the sequential first-maximum choice
        Best best = partial.front();
        for (const auto& b : partial) {
            if (b.magnitude > best.magnitude) {
                best = b;
            }
        }
        best_sets = decode(best.combo);
        result.examined = total;
        break;
    }
    case ScanStrategy::Greedy: {
        // Start from the best assignment that uses one set on every site,
        // then improve one site at a time until a full sweep changes nothing.
        std::vector<std::size_t> choice(static_cast<std::size_t>(num_sites), 0);
        double best = -1.0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            std::vector<PairingIndexSet> uniform(static_cast<std::size_t>(num_sites), candidates[c]);
            const double m = magnitude(uniform);
            ++result.examined;
            if (m > best) {
                best = m;
                std::fill(choice.begin(), choice.end(), c);
            }
        }
        auto assemble = [&]() {
            std::vector<PairingIndexSet> sets;
            for (auto c : choice) {
                sets.push_back(candidates[c]);
            }
            return sets;
        };
        for (int sweep = 0; sweep < options.max_greedy_sweeps; ++sweep) {
            bool improved = false;
            for (std::size_t n = 0; n < choice.size(); ++n) {
                const std::size_t keep = choice[n];
                std::size_t winner = keep;
                for (std::size_t c = 0; c < candidates.size(); ++c) {
                    if (c == keep) {
                        continue;
                    }
                    choice[n] = c;
                    const double m = magnitude(assemble());
                    ++result.examined;
                    if (m > best) {
                        best = m;
                        winner = c;
                        improved = true;
                    }
                }
                choice[n] = winner;
            }
            if (!improved) {
                break;
            }
        }
        best_sets = assemble();
        break;
    }
    }

    result.best = correlation(state, best_sets, options.limits);
    return result;
}

}  // namespace sepbell
