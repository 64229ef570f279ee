#include "sepbell/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Eigenvalues>

#include "sepbell/errors.hpp"

namespace sepbell {
namespace {

constexpr double kHermitianTolerance = 1e-12;

struct AscentRun {
    Vector psi;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Ascent on f = |z|^2, z = <psi|A|psi>; the Wirtinger gradient is
// conj(z) A psi + z A^dagger psi, projected onto the sphere's tangent space.
AscentRun ascend(const Matrix& a, Vector psi, const AscentOptions& options)
{
    const Matrix a_adj = a.adjoint();
    auto objective = [&](const Vector& v) { return std::norm(v.dot(a * v)); };
    double f = objective(psi);
    double step = 0.5;
    AscentRun run;
    for (; run.iterations < options.max_iterations; ++run.iterations) {
        const cplx z = psi.dot(a * psi);
        Vector grad = std::conj(z) * (a * psi) + z * (a_adj * psi);
        grad -= psi.dot(grad) * psi;
        if (grad.norm() < 1e-10) {
            run.converged = true;
            break;
        }
        bool accepted = false;
        while (step > 1e-14) {
            Vector trial = psi + step * grad;
            trial /= trial.norm();
            const double f_trial = objective(trial);
            if (f_trial > f) {
                const double gain = f_trial - f;
                psi = std::move(trial);
                f = f_trial;
                step = std::min(step * 1.5, 8.0);
                accepted = true;
                if (gain < options.tolerance) {
                    run.converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // no ascent direction left at machine precision
            run.converged = true;
            break;
        }
        if (run.converged) {
            ++run.iterations;
            break;
        }
    }
    run.psi = std::move(psi);
    run.value = std::abs(run.psi.dot(a * run.psi));
    return run;
}

void require_hermitian(const GlobalOperator& op)
{
    if (!op.is_hermitian(kHermitianTolerance)) {
        throw Error(ErrorCode::NotHermitian, "spectral_extremes needs a Hermitian operator");
    }
}

std::vector<int> checked_partition(int num_sites, std::span<const int> sites)
{
    std::set<int> unique(sites.begin(), sites.end());
    if (unique.empty() || static_cast<int>(unique.size()) >= num_sites || unique.size() != sites.size() ||
        *unique.begin() < 0 || *unique.rbegin() >= num_sites) {
        throw Error(ErrorCode::TrivialPartition,
                    "partial transpose needs a nonempty proper subset of distinct sites in [0, N)");
    }
    return {unique.begin(), unique.end()};
}

// Applies op to tensor factor `site` of a big-endian state vector.
void apply_local(Vector& v, int num_sites, int dim, int site, const Matrix& op)
{
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::Index stride = 1;
    for (int n = site + 1; n < num_sites; ++n) {
        stride *= d;
    }
    const Eigen::Index block = stride * d;
    Vector local(d);
    for (Eigen::Index base = 0; base < v.size(); base += block) {
        for (Eigen::Index offset = 0; offset < stride; ++offset) {
            for (Eigen::Index k = 0; k < d; ++k) {
                local(k) = v(base + k * stride + offset);
            }
            const Vector out = op * local;
            for (Eigen::Index k = 0; k < d; ++k) {
                v(base + k * stride + offset) = out(k);
            }
        }
    }
}

// Outcome probabilities of measuring every site in the given bases.
std::vector<double> outcome_probabilities(const State& state, const std::vector<Matrix>& bases)
{
    const int num_sites = num_sites_of(state);
    const int dim = dim_of(state);
    std::vector<double> probs;
    if (const auto* psi = std::get_if<PureState>(&state)) {
        Vector phi = psi->amplitudes;
        for (int n = 0; n < num_sites; ++n) {
            apply_local(phi, num_sites, dim, n, bases[static_cast<std::size_t>(n)].adjoint());
        }
        probs.resize(static_cast<std::size_t>(phi.size()));
        for (Eigen::Index k = 0; k < phi.size(); ++k) {
            probs[static_cast<std::size_t>(k)] = std::norm(phi(k));
        }
    } else {
        // diag(L rho L^dagger), L = (x)_n U_n^dagger, applied to columns twice
        Matrix work = std::get<DensityMatrix>(state).entries;
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index c = 0; c < work.cols(); ++c) {
                Vector col = work.col(c);
                for (int n = 0; n < num_sites; ++n) {
                    apply_local(col, num_sites, dim, n, bases[static_cast<std::size_t>(n)].adjoint());
                }
                work.col(c) = col;
            }
            work.adjointInPlace();
        }
        probs.resize(static_cast<std::size_t>(work.rows()));
        for (Eigen::Index k = 0; k < work.rows(); ++k) {
            probs[static_cast<std::size_t>(k)] = work(k, k).real();
        }
    }
    double total = 0.0;
    for (auto& p : probs) {
        p = std::max(p, 0.0);
        total += p;
    }
    for (auto& p : probs) {
        p /= total;
    }
    return probs;
}

struct TermStatistics {
    double mean = 0.0;
    double std_error = 0.0;
};

TermStatistics sample_term(const State& state, const std::vector<LocalEigenbasis>& bases, std::uint64_t shots,
                           Rng& rng)
{
    const int num_sites = num_sites_of(state);
    const auto dim = static_cast<std::size_t>(dim_of(state));
    std::vector<Matrix> vectors;
    for (const auto& b : bases) {
        vectors.push_back(b.eigenvectors);
    }
    // marginals[n] holds probabilities of the first n+1 outcomes
    std::vector<std::vector<double>> marginals(static_cast<std::size_t>(num_sites));
    marginals.back() = outcome_probabilities(state, vectors);
    for (int n = num_sites - 1; n > 0; --n) {
        const auto& finer = marginals[static_cast<std::size_t>(n)];
        auto& coarser = marginals[static_cast<std::size_t>(n - 1)];
        coarser.assign(finer.size() / dim, 0.0);
        for (std::size_t idx = 0; idx < finer.size(); ++idx) {
            coarser[idx / dim] += finer[idx];
        }
    }

    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        std::size_t prefix = 0;
        double outcome = 1.0;
        for (int n = 0; n < num_sites; ++n) {
            const auto& table = marginals[static_cast<std::size_t>(n)];
            const double total = n == 0 ? 1.0 : marginals[static_cast<std::size_t>(n - 1)][prefix];
            const double target = uniform(rng) * total;
            double cumulative = 0.0;
            std::size_t chosen = dim;
            std::size_t last_nonzero = 0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double p = table[prefix * dim + d];
                if (p > 0.0) {
                    last_nonzero = d;
                }
                cumulative += p;
                if (target < cumulative) {
                    chosen = d;
                    break;
                }
            }
            if (chosen == dim) {
                chosen = last_nonzero;  // target fell past the rounded total
            }
            outcome *= bases[static_cast<std::size_t>(n)].eigenvalues(static_cast<Eigen::Index>(chosen));
            prefix = prefix * dim + chosen;
        }
        sum += outcome;
        sum_sq += outcome * outcome;
    }
    const auto count = static_cast<double>(shots);
    TermStatistics stats;
    stats.mean = sum / count;
    if (shots > 1) {
        const double variance = std::max(0.0, (sum_sq - count * stats.mean * stats.mean) / (count - 1.0));
        stats.std_error = std::sqrt(variance / count);
    }
    return stats;
}

SampleEstimate sample_part(const State& state, const std::vector<SettingTerm>& terms,
                           std::uint64_t shots, Rng& rng)
{
    SampleEstimate estimate;
    estimate.shots_per_setting = shots;
    estimate.num_settings = static_cast<int>(terms.size());
    double variance = 0.0;
    for (const auto& term : terms) {
        std::vector<LocalEigenbasis> bases;
        for (const auto& f : term.factors) {
            bases.push_back(local_eigenbasis(f));
        }
        const auto stats = sample_term(state, bases, shots, rng);
        estimate.mean += term.coefficient * stats.mean;
        variance += term.coefficient * term.coefficient * stats.std_error * stats.std_error;
    }
    estimate.std_error = std::sqrt(variance);
    return estimate;
}

}  // namespace

OptimizationResult maximize_site(const PairingIndexSet& pairing, int restarts, Rng& rng, const AscentOptions& options)
{
    if (restarts < 1) {
        throw Error(ErrorCode::InvalidParameter, "restarts must be >= 1");
    }
    const Matrix sigma = local_sigma(pairing).entries;
    OptimizationResult result;
    result.best_value = -1.0;
    bool any_converged = false;
    for (int r = 0; r < restarts; ++r) {
        auto run = ascend(sigma, random_unit_vector(pairing.dim, rng), options);
        result.iterations += run.iterations;
        any_converged = any_converged || run.converged;
        if (run.value > result.best_value) {
            result.best_value = run.value;
            result.argument = {run.psi};
        }
    }
    result.site_values = {result.best_value};
    result.converged = any_converged;
    return result;
}

OptimizationResult maximize_over_products(std::span<const PairingIndexSet> pairings, int restarts, std::uint64_t seed,
                                          const AscentOptions& options)
{
    if (pairings.empty()) {
        throw Error(ErrorCode::InvalidParameter, "need at least one site");
    }
    const int dim = pairings.front().dim;
    for (const auto& p : pairings) {
        if (p.dim != dim) {
            throw Error(ErrorCode::DimensionMismatch, "all sites must share one qudit dimension");
        }
    }
    Rng rng(seed);
    OptimizationResult result;
    result.best_value = 1.0;
    result.converged = true;
    for (const auto& p : pairings) {
        auto site = maximize_site(p, restarts, rng, options);
        result.best_value *= site.best_value;
        result.argument.push_back(site.argument.front());
        result.site_values.push_back(site.best_value);
        result.iterations += site.iterations;
        result.converged = result.converged && site.converged;
    }
    return result;
}

SpectralExtremes spectral_extremes(const GlobalOperator& op, const Limits& limits)
{
    require_hermitian(op);
    if (op.size() > limits.max_operator_dim) {
        throw Error(ErrorCode::SizeLimit, "operator dimension " + std::to_string(op.size()) + " exceeds cap " +
                                              std::to_string(limits.max_operator_dim));
    }
    if (op.size() > limits.max_dense_dim) {
        return lanczos_extremes(op);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.to_dense(limits.max_dense_dim), Eigen::EigenvaluesOnly);
    return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff(), false};
}

SpectralExtremes lanczos_extremes(const GlobalOperator& op, double rel_tolerance, std::uint64_t seed,
                                  int max_iterations)
{
    require_hermitian(op);
    const auto n = static_cast<Eigen::Index>(op.size());
    if (op.nonzeros() == 0) {
        return {0.0, 0.0, true};
    }
    Rng rng(seed);
    std::vector<Vector> basis;
    std::vector<double> alpha;
    std::vector<double> beta;
    {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vector start(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            start(i) = cplx{re, im};
        }
        basis.push_back(start / start.norm());
    }
    double scale = 0.0;
    for (const auto& t : op.triplets()) {
        scale = std::max(scale, std::abs(t.value));
    }
    const int limit = static_cast<int>(std::min<Eigen::Index>(max_iterations, n));
    SpectralExtremes result{0.0, 0.0, true};
    for (int j = 0; j < limit; ++j) {
        Vector w = op.apply(basis.back());
        alpha.push_back(basis.back().dot(w).real());
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& v : basis) {
                w -= v.dot(w) * v;
            }
        }
        const double b = w.norm();

        const auto k = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            tri(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < k) {
                tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(tri);
        result.min = ritz.eigenvalues()(0);
        result.max = ritz.eigenvalues()(k - 1);
        const double norm_estimate = std::max({std::abs(result.min), std::abs(result.max), 1e-300});
        if (b <= 1e-12 * std::max(scale, 1.0)) {
            break;  // invariant subspace reached: Ritz values are exact
        }
        const double residual_min = b * std::abs(ritz.eigenvectors()(k - 1, 0));
        const double residual_max = b * std::abs(ritz.eigenvectors()(k - 1, k - 1));
        if (residual_min <= rel_tolerance * norm_estimate && residual_max <= rel_tolerance * norm_estimate) {
            break;
        }
        beta.push_back(b);
        basis.push_back(w / b);
    }
    return result;
}

Matrix partial_transpose(const DensityMatrix& rho, std::span<const int> sites)
{
    const auto chosen = checked_partition(rho.num_sites, sites);
    const auto size = static_cast<Index>(rho.entries.rows());
    const auto d = static_cast<Index>(rho.dim);
    std::vector<Index> weights;
    for (int site : chosen) {
        Index w = 1;
        for (int n = site + 1; n < rho.num_sites; ++n) {
            w *= d;
        }
        weights.push_back(w);
    }
    Matrix out(rho.entries.rows(), rho.entries.cols());
    for (Index r = 0; r < size; ++r) {
        for (Index c = 0; c < size; ++c) {
            Index r2 = r;
            Index c2 = c;
            for (Index w : weights) {
                const Index rd = (r / w) % d;
                const Index cd = (c / w) % d;
                r2 = r2 - rd * w + cd * w;
                c2 = c2 - cd * w + rd * w;
            }
            out(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(c2)) =
                rho.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

double ppt_min_eigenvalue(const DensityMatrix& rho, std::span<const int> sites, const Limits& limits)
{
    checked_hilbert_dim(rho.num_sites, rho.dim, limits.max_dense_dim, "ppt_min_eigenvalue");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(partial_transpose(rho, sites), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double ppt_threshold(int num_sites, int dim, std::span<const int> sites, const Limits& limits, double tolerance)
{
    checked_partition(num_sites, sites);
    auto lowest = [&](double p) { return ppt_min_eigenvalue(werner_state(num_sites, dim, p, limits.max_dense_dim), sites, limits); };
    if (lowest(1.0) >= 0.0) {
        return 1.0;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (lowest(mid) < 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double ppt_threshold_closed_form(int num_sites, int dim)
{
    return 1.0 / (1.0 + std::pow(static_cast<double>(dim), num_sites - 1));
}

std::vector<PptSweepRow> ppt_sweep(int num_sites, int dim, std::span<const int> sites, std::span<const double> p_grid,
                                   const Limits& limits)
{
    std::vector<PptSweepRow> rows;
    for (double p : p_grid) {
        rows.push_back({p, ppt_min_eigenvalue(werner_state(num_sites, dim, p, limits.max_dense_dim), sites, limits)});
    }
    return rows;
}

LocalEigenbasis local_eigenbasis(const LocalOperator& op)
{
    if (!op.is_hermitian(kHermitianTolerance)) {
        throw Error(ErrorCode::NotHermitian, "measurement factor must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.entries);
    LocalEigenbasis basis{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index c = 0; c < basis.eigenvectors.cols(); ++c) {
        auto col = basis.eigenvectors.col(c);
        Eigen::Index pivot = 0;
        double largest = -1.0;
        for (Eigen::Index r = 0; r < col.size(); ++r) {
            const double mag = std::abs(col(r));
            if (mag > largest * (1.0 + 1e-12)) {
                largest = mag;
                pivot = r;
            }
        }
        col *= std::conj(col(pivot)) / largest;
        col(pivot) = cplx{largest, 0.0};
    }
    return basis;
}

SampledCorrelation sample_correlation(const State& state, std::span<const PairingIndexSet> pairings,
                                      std::uint64_t shots_per_setting, std::uint64_t seed, const Limits& limits)
{
    if (shots_per_setting < 1) {
        throw Error(ErrorCode::InvalidShots, "shots per setting must be >= 1");
    }
    if (static_cast<int>(pairings.size()) != num_sites_of(state)) {
        throw Error(ErrorCode::DimensionMismatch, "one index set per site is required");
    }
    for (const auto& p : pairings) {
        if (p.dim != dim_of(state)) {
            throw Error(ErrorCode::DimensionMismatch, "index set dimension does not match the state");
        }
    }
    if (std::holds_alternative<DensityMatrix>(state)) {
        checked_hilbert_dim(num_sites_of(state), dim_of(state), limits.max_dense_dim, "sample_correlation");
    } else {
        checked_hilbert_dim(num_sites_of(state), dim_of(state), limits.max_operator_dim, "sample_correlation");
    }
    const auto decomposition = setting_decomposition(pairings);
    Rng rng(seed);
    SampledCorrelation out;
    out.re = sample_part(state, decomposition.plus_terms, shots_per_setting, rng);
    out.im = sample_part(state, decomposition.minus_terms, shots_per_setting, rng);
    return out;
}

}  // namespace sepbell
