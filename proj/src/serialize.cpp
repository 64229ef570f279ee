#include "sepbell/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "sepbell/errors.hpp"

namespace sepbell {
namespace {

json vector_to_json(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(complex_to_json(v(i)));
    }
    return out;
}

Vector vector_from_json(const json& j)
{
    if (!j.is_array()) {
        throw Error(ErrorCode::Format, "expected an array of [re, im] pairs");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    }
    return v;
}

template <typename F>
auto guarded(F&& f)
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, e.what());
    }
}

}  // namespace

json complex_to_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

cplx complex_from_json(const json& j)
{
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(ErrorCode::Format, "complex numbers are [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const PairingIndexSet& p)
{
    json pairs = json::array();
    for (const auto& [a, b] : p.pairs) {
        pairs.push_back({a, b});
    }
    j = json{{"dim", p.dim},
             {"pairs", pairs},
             {"unpaired", p.unpaired ? json(*p.unpaired) : json(nullptr)},
             {"eta", complex_to_json(p.eta)}};
}

void from_json(const json& j, PairingIndexSet& p)
{
    guarded([&] {
        p.dim = j.at("dim").get<int>();
        p.pairs.clear();
        for (const auto& pair : j.at("pairs")) {
            if (!pair.is_array() || pair.size() != 2) {
                throw Error(ErrorCode::Format, "pairs are [i, j]");
            }
            p.pairs.emplace_back(pair[0].get<int>(), pair[1].get<int>());
        }
        const auto& k = j.value("unpaired", json(nullptr));
        p.unpaired = k.is_null() ? std::nullopt : std::optional<int>(k.get<int>());
        p.eta = j.contains("eta") ? complex_from_json(j.at("eta"))
                                  : (p.unpaired ? cplx{1.0, 0.0} : cplx{0.0, 0.0});
        return 0;
    });
    p.validate();
}

void to_json(json& j, const GlobalOperator& op)
{
    json triplets = json::array();
    for (const auto& t : op.triplets()) {
        triplets.push_back({t.row, t.col, t.value.real(), t.value.imag()});
    }
    j = json{{"n", op.num_sites()}, {"d", op.dim()}, {"triplets", triplets}};
}

void from_json(const json& j, GlobalOperator& op)
{
    op = guarded([&] {
        std::vector<Triplet> triplets;
        for (const auto& t : j.at("triplets")) {
            if (!t.is_array() || t.size() != 4) {
                throw Error(ErrorCode::Format, "triplets are [row, col, re, im]");
            }
            triplets.push_back({t[0].get<Index>(), t[1].get<Index>(), cplx{t[2].get<double>(), t[3].get<double>()}});
        }
        return GlobalOperator(j.at("n").get<int>(), j.at("d").get<int>(), std::move(triplets));
    });
}

void to_json(json& j, const PureState& s)
{
    j = json{{"n", s.num_sites}, {"d", s.dim}, {"amps", vector_to_json(s.amplitudes)}};
}

void from_json(const json& j, PureState& s)
{
    guarded([&] {
        s.num_sites = j.at("n").get<int>();
        s.dim = j.at("d").get<int>();
        s.amplitudes = vector_from_json(j.at("amps"));
        return 0;
    });
    s.validate();
}

void to_json(json& j, const DensityMatrix& s)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < s.entries.rows(); ++r) {
        rows.push_back(vector_to_json(s.entries.row(r).transpose()));
    }
    j = json{{"n", s.num_sites}, {"d", s.dim}, {"rho", rows}, {"separable_certificate", s.separable_certificate}};
}

void from_json(const json& j, DensityMatrix& s)
{
    guarded([&] {
        s.num_sites = j.at("n").get<int>();
        s.dim = j.at("d").get<int>();
        const auto& rows = j.at("rho");
        const auto size = static_cast<Eigen::Index>(rows.size());
        s.entries.resize(size, size);
        for (Eigen::Index r = 0; r < size; ++r) {
            const Vector row = vector_from_json(rows[static_cast<std::size_t>(r)]);
            if (row.size() != size) {
                throw Error(ErrorCode::Format, "density matrix rows must be square");
            }
            s.entries.row(r) = row.transpose();
        }
        // a certificate is only ever earned by construction from an ensemble
        s.separable_certificate = false;
        return 0;
    });
    s.validate();
}

void to_json(json& j, const SeparableEnsemble& e)
{
    json factors = json::array();
    for (const auto& term : e.factors) {
        json sites = json::array();
        for (const auto& v : term) {
            sites.push_back(vector_to_json(v));
        }
        factors.push_back(sites);
    }
    j = json{{"weights", e.weights}, {"factors", factors}};
}

void from_json(const json& j, SeparableEnsemble& e)
{
    guarded([&] {
        e.weights = j.at("weights").get<std::vector<double>>();
        e.factors.clear();
        for (const auto& term : j.at("factors")) {
            std::vector<Vector> sites;
            for (const auto& v : term) {
                sites.push_back(vector_from_json(v));
            }
            e.factors.push_back(std::move(sites));
        }
        return 0;
    });
    e.validate();
}

void to_json(json& j, const SeparabilityVerdict& v)
{
    j = json{{"modulus_violated", v.modulus_violated},
             {"quadratic_violated", v.quadratic_violated},
             {"re_linear_violated", v.re_linear_violated},
             {"im_linear_violated", v.im_linear_violated},
             {"sum_linear_violated", v.sum_linear_violated},
             {"certified", v.certified()}};
}

void to_json(json& j, const LhvVerdict& v)
{
    j = json{{"odd_sites", v.odd_sites},
             {"re_violated", v.re_violated},
             {"im_violated", v.im_violated},
             {"sum_violated", v.sum_violated},
             {"violated", v.violated()}};
}

void to_json(json& j, const CorrelationReport& r)
{
    j = json{{"index_sets", r.index_sets},
             {"value", complex_to_json(r.value)},
             {"abs", std::abs(r.value)},
             {"re_part", r.re_part},
             {"im_part", r.im_part},
             {"separability_bound", r.separability_bound},
             {"quadratic_lhs", r.quadratic_lhs},
             {"lhv_bound_odd", r.lhv_bound_odd},
             {"lhv_bound_even_sum", r.lhv_bound_even_sum},
             {"violation_ratio_sep", r.violation_ratio_sep},
             {"violation_ratio_lhv", r.violation_ratio_lhv},
             {"verdicts",
              {{"entangled_certified", r.entangled_certified},
               {"lhv_violated", r.lhv_violated},
               {"separability", check_separability(r)},
               {"lhv", check_lhv(r)}}}};
}

void to_json(json& j, const SampleEstimate& s)
{
    j = json{{"mean", s.mean},
             {"std_error", s.std_error},
             {"shots_per_setting", s.shots_per_setting},
             {"num_settings", s.num_settings}};
}

void to_json(json& j, const OptimizationResult& r)
{
    json argument = json::array();
    for (const auto& v : r.argument) {
        argument.push_back(vector_to_json(v));
    }
    j = json{{"best_value", r.best_value},
             {"site_values", r.site_values},
             {"argument", argument},
             {"iterations", r.iterations},
             {"converged", r.converged}};
}

void to_json(json& j, const SpectralExtremes& s)
{
    j = json{{"min", s.min}, {"max", s.max}, {"method", s.iterative ? "lanczos" : "dense"}};
}

State state_from_json(const json& j, const Limits& limits)
{
    if (j.contains("amps")) {
        return j.get<PureState>();
    }
    if (j.contains("rho")) {
        return j.get<DensityMatrix>();
    }
    if (j.contains("weights")) {
        return ensemble_to_density(j.get<SeparableEnsemble>(), limits.max_dense_dim);
    }
    throw Error(ErrorCode::Format, "state JSON needs one of 'amps', 'rho' or 'weights'");
}

json state_to_json(const State& state)
{
    return std::visit([](const auto& s) { return json(s); }, state);
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Format, "cannot open '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Format, "'" + path + "': " + e.what());
    }
}

std::string format_real(double x)
{
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", x);
    return buffer;
}

void write_werner_csv(std::ostream& out, const WernerSweep& sweep)
{
    out << "p,re,im,abs,sep_violated,lhv_violated\n";
    for (const auto& row : sweep.rows) {
        out << format_real(row.p) << ',' << format_real(row.value.real()) << ',' << format_real(row.value.imag())
            << ',' << format_real(std::abs(row.value)) << ',' << (row.sep_violated ? 1 : 0) << ','
            << (row.lhv_violated ? 1 : 0) << '\n';
    }
}

void write_ppt_csv(std::ostream& out, std::span<const PptSweepRow> rows)
{
    out << "p,min_eigenvalue\n";
    for (const auto& row : rows) {
        out << format_real(row.p) << ',' << format_real(row.min_eigenvalue) << '\n';
    }
}

}  // namespace sepbell
