#include "sepbell/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sepbell/errors.hpp"
#include "sepbell/operators.hpp"
#include "sepbell/oracles.hpp"
#include "sepbell/pairings.hpp"
#include "sepbell/serialize.hpp"
#include "sepbell/states.hpp"
#include "sepbell/witnesses.hpp"

namespace sepbell {
namespace {

class Recorder {
public:
    explicit Recorder(std::vector<VerificationCheck>& out) : out_(out) {}

    void abs_diff(const std::string& name, double expected, double actual, double tol)
    {
        push(name, "abs_diff", expected, actual, tol, std::abs(actual - expected) <= tol);
    }
    void rel_diff(const std::string& name, double expected, double actual, double tol)
    {
        const double scale = std::max(std::abs(expected), 1e-300);
        push(name, "rel_diff", expected, actual, tol, std::abs(actual - expected) / scale <= tol);
    }
    // actual <= bound + tol
    void le(const std::string& name, double bound, double actual, double tol)
    {
        push(name, "le", bound, actual, tol, actual <= bound + tol);
    }
    // actual >= bound - tol
    void ge(const std::string& name, double bound, double actual, double tol)
    {
        push(name, "ge", bound, actual, tol, actual >= bound - tol);
    }
    void eq(const std::string& name, double expected, double actual)
    {
        push(name, "eq", expected, actual, 0.0, actual == expected);
    }

private:
    void push(const std::string& name, const char* cmp, double expected, double actual, double tol, bool ok)
    {
        out_.push_back({name, cmp, expected, actual, tol, ok});
    }

    std::vector<VerificationCheck>& out_;
};

std::vector<cplx> test_phases(int dim)
{
    if (dim % 2 == 0) {
        return {cplx{1.0, 0.0}};
    }
    return {cplx{1.0, 0.0}, cplx{0.0, 1.0}, std::polar(1.0, std::numbers::pi / 3.0)};
}

Matrix dense_kron(const std::vector<LocalOperator>& factors)
{
    Matrix out = Matrix::Ones(1, 1);
    for (const auto& f : factors) {
        Matrix next(out.rows() * f.dim, out.cols() * f.dim);
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            for (Eigen::Index c = 0; c < out.cols(); ++c) {
                next.block(r * f.dim, c * f.dim, f.dim, f.dim) = out(r, c) * f.entries;
            }
        }
        out = std::move(next);
    }
    return out;
}

Matrix projector(int dim, std::optional<int> k)
{
    Matrix p = Matrix::Zero(dim, dim);
    if (k) {
        p(*k, *k) = 1.0;
    }
    return p;
}

std::vector<PairingIndexSet> random_sites(const std::vector<PairingIndexSet>& candidates, int num_sites, Rng& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    std::vector<PairingIndexSet> sets;
    for (int n = 0; n < num_sites; ++n) {
        sets.push_back(candidates[pick(rng)]);
    }
    return sets;
}

}  // namespace

bool VerificationLedger::all_passed() const
{
    return failures() == 0;
}

std::size_t VerificationLedger::failures() const
{
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

VerificationLedger run_verification(const VerifyOptions& options)
{
    const int n_sites = options.num_sites;
    const int dim = options.dim;
    if (n_sites < 1) {
        throw Error(ErrorCode::InvalidParameter, "verify needs N >= 1");
    }
    if (dim < 2) {
        throw Error(ErrorCode::InvalidDimension, "verify needs D >= 2");
    }
    checked_hilbert_dim(n_sites, dim, options.limits.max_dense_dim, "verify");

    VerificationLedger ledger;
    ledger.options = options;
    Recorder rec(ledger.checks);
    Rng rng(options.seed);
    const double half_max = std::ldexp(1.0, n_sites - 1);  // 2^{N-1}
    const bool odd_dim = dim % 2 == 1;

    // pairings
    const auto all_sets = enumerate_pairings(dim);
    rec.eq("pairings.count_matches_enumeration", static_cast<double>(count_pairings(dim)),
           static_cast<double>(all_sets.size()));
    {
        double valid = 1.0;
        for (const auto& s : all_sets) {
            try {
                s.validate();
            } catch (const Error&) {
                valid = 0.0;
            }
        }
        rec.eq("pairings.invariants_hold", 1.0, valid);
    }

    // local operator identities
    {
        double plus_sq = 0.0;
        double minus_sq = 0.0;
        double herm = 0.0;
        double radius = 0.0;
        for (const cplx eta : test_phases(dim)) {
            for (const auto& s : enumerate_pairings(dim, eta)) {
                const auto plus = local_sigma_plus(s);
                const auto minus = local_sigma_minus(s);
                const Matrix id = Matrix::Identity(dim, dim);
                const Matrix k = projector(dim, s.unpaired);
                const double im_eta = s.eta.imag();
                const double re_eta = s.eta.real();
                plus_sq = std::max(plus_sq,
                                   (plus.entries * plus.entries - (id - im_eta * im_eta * k)).cwiseAbs().maxCoeff());
                minus_sq = std::max(
                    minus_sq, (minus.entries * minus.entries - (id - re_eta * re_eta * k)).cwiseAbs().maxCoeff());
                herm = std::max({herm, (plus.entries - plus.entries.adjoint()).cwiseAbs().maxCoeff(),
                                 (minus.entries - minus.entries.adjoint()).cwiseAbs().maxCoeff()});
                radius = std::max({radius, plus.spectral_radius(), minus.spectral_radius()});
            }
        }
        rec.le("operators.sigma_plus_square_identity", 0.0, plus_sq, 1e-14);
        rec.le("operators.sigma_minus_square_identity", 0.0, minus_sq, 1e-14);
        rec.le("operators.local_parts_hermitian", 0.0, herm, 1e-14);
        rec.le("operators.local_spectral_radius", 1.0, radius, 1e-12);
    }

    // global operators
    const auto canonical = canonical_pairings(n_sites, dim);
    {
        const auto sigma = global_sigma(canonical, options.limits.max_operator_dim);
        const auto plus = hermitian_part(sigma);
        const auto minus = antihermitian_part(sigma);
        const double local_nz = canonical.front().local_nonzeros();
        rec.eq("operators.global_nonzeros", std::pow(local_nz, n_sites), static_cast<double>(sigma.nonzeros()));
        rec.eq("operators.global_parts_hermitian", 1.0,
               plus.is_hermitian(1e-14) && minus.is_hermitian(1e-14) ? 1.0 : 0.0);
        const auto recombined = GlobalOperator::combine(1.0, plus, kI, minus);
        rec.eq("operators.sigma_equals_plus_i_minus", 1.0, recombined == sigma ? 1.0 : 0.0);

        const auto decomposition = setting_decomposition(canonical);
        rec.eq("operators.decomposition_plus_terms", half_max, static_cast<double>(decomposition.plus_terms.size()));
        rec.eq("operators.decomposition_minus_terms", half_max,
               static_cast<double>(decomposition.minus_terms.size()));
        const Matrix plus_dense = plus.to_dense(options.limits.max_dense_dim);
        const Matrix minus_dense = minus.to_dense(options.limits.max_dense_dim);
        const double plus_err =
            (reconstruct(decomposition.plus_terms, options.limits.max_operator_dim).to_dense(options.limits.max_dense_dim) -
             plus_dense)
                .cwiseAbs()
                .maxCoeff();
        const double minus_err =
            (reconstruct(decomposition.minus_terms, options.limits.max_operator_dim).to_dense(options.limits.max_dense_dim) -
             minus_dense)
                .cwiseAbs()
                .maxCoeff();
        rec.le("operators.decomposition_reconstructs", 0.0, std::max(plus_err, minus_err), 1e-12);

        if (sigma.size() <= 256) {
            const auto mixed = random_sites(all_sets, n_sites, rng);
            std::vector<LocalOperator> factors;
            for (const auto& s : mixed) {
                factors.push_back(local_sigma(s));
            }
            const double err = (global_sigma(mixed).to_dense(256) - dense_kron(factors)).cwiseAbs().maxCoeff();
            rec.le("operators.global_matches_dense_kron", 0.0, err, 0.0);
        }

        const auto extremes = spectral_extremes(plus, options.limits);
        rec.rel_diff("spectral.sigma_plus_max", half_max, extremes.max, 1e-10);
        rec.rel_diff("spectral.sigma_plus_min", -half_max, extremes.min, 1e-10);
    }

    // basic single-qudit bound and the product optimizer
    {
        double worst = 0.0;
        for (const cplx eta : test_phases(dim)) {
            for (const auto& s : enumerate_pairings(dim, eta)) {
                const Matrix sigma = local_sigma(s).entries;
                for (int t = 0; t < options.random_states; ++t) {
                    const Vector psi = random_unit_vector(dim, rng);
                    worst = std::max(worst, std::abs(psi.dot(sigma * psi)));
                }
            }
        }
        rec.le("bounds.basic_inequality", 1.0, worst, 1e-12);
        const auto opt = maximize_over_products(canonical, options.optimizer_restarts, options.seed);
        rec.le("bounds.product_optimizer_upper", 1.0, opt.best_value, 1e-9);
        rec.ge("bounds.product_optimizer_attains", 1.0, opt.best_value, 1e-6);
    }

    // separable ensembles
    {
        double worst_modulus = 0.0;
        double worst_quadratic = 0.0;
        double worst_ppt = 0.0;
        for (int e = 0; e < options.ensembles; ++e) {
            const auto ensemble = random_separable_ensemble(n_sites, dim, options.ensemble_terms, rng);
            const auto rho = ensemble_to_density(ensemble, options.limits.max_dense_dim);
            const auto sets = random_sites(all_sets, n_sites, rng);
            const auto report = correlation(rho, sets, options.limits);
            worst_modulus = std::max(worst_modulus, std::abs(report.value));
            worst_quadratic = std::max(worst_quadratic, report.quadratic_lhs);
            if (n_sites >= 2 && e < 20) {
                const std::vector<int> first{0};
                worst_ppt = std::min(worst_ppt, ppt_min_eigenvalue(rho, first, options.limits));
            }
        }
        rec.le("bounds.separable_modulus", 1.0, worst_modulus, 1e-12);
        rec.le("bounds.separable_quadratic", 1.0, worst_quadratic, 1e-12);
        if (n_sites >= 2) {
            rec.ge("ppt.separable_nonnegative", 0.0, worst_ppt, 1e-10);
        }
    }

    // violating continuum and eigenvalue equations
    {
        double res_plus = 0.0;
        double res_minus = 0.0;
        double res_mixed = 0.0;
        double value_err = 0.0;
        const double boosted = std::pow(2.0, n_sites - 0.5);
        const cplx e_pos = std::polar(1.0, std::numbers::pi / 4.0);
        const cplx e_neg = std::polar(1.0, -std::numbers::pi / 4.0);
        for (int draw = 0; draw < options.coefficient_draws; ++draw) {
            const auto sets = random_sites(all_sets, n_sites, rng);
            const auto coeffs = random_coefficients(sets, rng);
            const auto sigma = global_sigma(sets, options.limits.max_operator_dim);
            const auto plus = hermitian_part(sigma);
            const auto minus = antihermitian_part(sigma);
            const auto sum = GlobalOperator::combine(1.0, plus, 1.0, minus);
            const auto diff = GlobalOperator::combine(1.0, plus, -1.0, minus);
            for (double sign : {1.0, -1.0}) {
                const auto a = psi_mu(sets, coeffs, cplx{sign, 0.0});
                res_plus = std::max(res_plus, (plus.apply(a.amplitudes) - sign * half_max * a.amplitudes).norm());
                const auto b = psi_mu(sets, coeffs, cplx{0.0, sign});
                res_minus = std::max(res_minus, (minus.apply(b.amplitudes) - sign * half_max * b.amplitudes).norm());
            }
            const auto c = psi_mu(sets, coeffs, e_pos);
            const auto d = psi_mu(sets, coeffs, e_neg);
            res_mixed = std::max({res_mixed, (sum.apply(c.amplitudes) - boosted * c.amplitudes).norm(),
                                  (diff.apply(d.amplitudes) - boosted * d.amplitudes).norm()});
            for (int k = 0; k < 16; ++k) {
                const cplx mu = std::polar(1.0, 2.0 * std::numbers::pi * k / 16.0);
                const auto psi = psi_mu(sets, coeffs, mu);
                value_err = std::max(value_err, std::abs(sigma.expectation(psi.amplitudes) - mu * half_max));
            }
        }
        rec.le("eigen.sigma_plus_residual", 0.0, res_plus, 1e-10);
        rec.le("eigen.sigma_minus_residual", 0.0, res_minus, 1e-10);
        rec.le("eigen.sigma_plus_minus_residual", 0.0, res_mixed, 1e-10);
        rec.le("eigen.psi_mu_value", 0.0, value_err, 1e-10);

        if (dim >= 4) {
            const auto sets = random_sites(all_sets, n_sites, rng);
            const auto first = psi_mu(sets, random_coefficients(sets, rng), cplx{1.0, 0.0});
            const auto second = psi_mu(sets, random_coefficients(sets, rng), cplx{1.0, 0.0});
            const auto sigma = global_sigma(sets, options.limits.max_operator_dim);
            rec.le("continuum.fidelity_below", 0.99, fidelity(first, second), 0.0);
            rec.abs_diff("continuum.first_value", half_max, std::abs(sigma.expectation(first.amplitudes)), 1e-10);
            rec.abs_diff("continuum.second_value", half_max, std::abs(sigma.expectation(second.amplitudes)), 1e-10);
        }
    }

    // violation ratios against both bounds
    {
        const cplx best_mu = n_sites % 2 == 1 ? cplx{1.0, 0.0} : std::polar(1.0, std::numbers::pi / 4.0);
        const auto coeffs = random_coefficients(canonical, rng);
        const auto report = correlation(psi_mu(canonical, coeffs, best_mu), canonical, options.limits);
        rec.abs_diff("ratios.separability", half_max, report.violation_ratio_sep, 1e-10);
        rec.abs_diff("ratios.lhv", std::pow(std::numbers::sqrt2, n_sites - 1), report.violation_ratio_lhv, 1e-10);
    }

    // maximally entangled state
    {
        const auto psi = maximally_entangled(n_sites, dim, options.limits.max_operator_dim);
        const double expected = odd_dim ? half_max * (dim - 1.0) / dim + 1.0 / dim : half_max;
        const auto report = correlation(psi, canonical, options.limits);
        rec.abs_diff("maxent.value_re", expected, report.value.real(), 1e-10);
        rec.abs_diff("maxent.value_im", 0.0, report.value.imag(), 1e-10);
    }

    // Werner family
    const auto grid = parse_grid("0:1:0.1");
    const auto sweep = werner_sweep(n_sites, dim, grid, options.limits);
    {
        double err = 0.0;
        for (const auto& row : sweep.rows) {
            err = std::max(err, std::abs(row.value - cplx{werner_correlation_closed_form(n_sites, dim, row.p), 0.0}));
        }
        rec.le("werner.closed_form", 0.0, err, 1e-10);
        rec.abs_diff("werner.threshold", sweep.closed_form_threshold, sweep.numeric_threshold, 1e-6);
    }
    if (n_sites >= 2) {
        const std::vector<int> first{0};
        const double ppt = ppt_threshold(n_sites, dim, first, options.limits);
        rec.abs_diff("ppt.threshold", ppt_threshold_closed_form(n_sites, dim), ppt, 1e-6);
        rec.le("ppt.not_weaker_than_witness", sweep.numeric_threshold, ppt, 0.0);
        const double between = 0.5 * (ppt + sweep.numeric_threshold);
        const auto rho = werner_state(n_sites, dim, between, options.limits.max_dense_dim);
        rec.le("ppt.certifies_between_thresholds", 0.0, ppt_min_eigenvalue(rho, first, options.limits), 0.0);
        rec.le("werner.witness_silent_between_thresholds", 1.0, std::abs(correlation(rho, canonical).value),
               kCertificationTolerance);
    }

    // sampling oracle
    {
        const auto coeffs = random_coefficients(canonical, rng);
        const auto pure = psi_mu(canonical, coeffs, std::polar(1.0, std::numbers::pi / 4.0));
        const std::vector<std::pair<std::string, State>> cases{
            {"psi_mu", pure}, {"werner", werner_state(n_sites, dim, 0.7, options.limits.max_dense_dim)}};
        std::uint64_t sub_seed = options.seed;
        for (const auto& [label, state] : cases) {
            const auto exact = correlation(state, canonical, options.limits);
            const auto sampled = sample_correlation(state, canonical, options.shots, ++sub_seed, options.limits);
            rec.le("sampling." + label + ".re_within_5se", 5.0 * sampled.re.std_error + 1e-9,
                   std::abs(sampled.re.mean - exact.re_part), 0.0);
            rec.le("sampling." + label + ".im_within_5se", 5.0 * sampled.im.std_error + 1e-9,
                   std::abs(sampled.im.mean - exact.im_part), 0.0);
            rec.eq("sampling." + label + ".settings", half_max,
                   static_cast<double>(std::min(sampled.re.num_settings, sampled.im.num_settings)));
        }
    }

    return ledger;
}

nlohmann::json to_json(const VerificationLedger& ledger)
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : ledger.checks) {
        checks.push_back({{"name", c.name},
                          {"comparison", c.comparison},
                          {"expected", c.expected},
                          {"actual", c.actual},
                          {"tolerance", c.tolerance},
                          {"passed", c.passed}});
    }
    const auto& o = ledger.options;
    return {{"options",
             {{"n", o.num_sites},
              {"d", o.dim},
              {"seed", o.seed},
              {"random_states", o.random_states},
              {"ensembles", o.ensembles},
              {"ensemble_terms", o.ensemble_terms},
              {"coefficient_draws", o.coefficient_draws},
              {"optimizer_restarts", o.optimizer_restarts},
              {"shots", o.shots}}},
            {"checks", checks},
            {"failures", ledger.failures()},
            {"passed", ledger.all_passed()}};
}

}  // namespace sepbell
