// sepbell: batch front end for separability Bell operators.
//
// Every subcommand echoes its fully resolved configuration into the output
// header. Verdicts live in the output; the exit status only reports whether
// the run itself succeeded (0), had a usage error (2) or hit a size cap (3).
// `verify` is the exception and exits 1 when any check fails.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "sepbell/sepbell.hpp"

namespace {

using sepbell::cplx;
using sepbell::Error;
using sepbell::ErrorCode;
using sepbell::json;

constexpr int kExitFailedChecks = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;
constexpr const char* kCapEnv = "SEPBELL_CAP_DIM";

struct RunConfig {
    std::string command;
    int n = 2;
    int d = 2;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    bool format_given = false;
    std::uint64_t cap_dim = sepbell::Limits{}.max_operator_dim;
    std::string cap_source = "default";
    std::uint64_t dense_cap = sepbell::Limits{}.max_dense_dim;

    std::string state = "psi-mu";
    std::string mu = "1";
    double p = 0.5;
    std::string pairing = "canonical";
    std::string eta = "1";
    std::string coeffs = "uniform";

    std::string family = "werner";
    std::string grid = "0:1:0.01";
    std::string partition = "0";

    std::string strategy = "exhaustive";
    std::uint64_t max_combinations = sepbell::Limits{}.max_scan_combinations;

    std::uint64_t shots = 100000;
    int random_states = 1000;
    int ensembles = 200;

    [[nodiscard]] sepbell::Limits limits() const
    {
        return {cap_dim, dense_cap, max_combinations};
    }
};

cplx parse_phase(const std::string& text, const char* what)
{
    auto fail = [&]() -> cplx {
        throw Error(ErrorCode::InvalidParameter,
                    std::string("cannot parse ") + what + " '" + text + "'; use 1, -1, i, -i, re,im or phase:x");
    };
    if (text == "i" || text == "+i") {
        return {0.0, 1.0};
    }
    if (text == "-i") {
        return {0.0, -1.0};
    }
    try {
        if (text.rfind("phase:", 0) == 0) {
            return std::polar(1.0, std::numbers::pi * std::stod(text.substr(6)));
        }
        const auto comma = text.find(',');
        if (comma == std::string::npos) {
            std::size_t used = 0;
            const double re = std::stod(text, &used);
            return used == text.size() ? cplx{re, 0.0} : fail();
        }
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::logic_error&) {
        return fail();
    }
}

json config_json(const RunConfig& c)
{
    json j{{"command", c.command},
           {"n", c.n},
           {"d", c.d},
           {"seed", c.seed},
           {"out", c.out.empty() ? json(nullptr) : json(c.out)},
           {"format", c.format},
           {"cap_dim", c.cap_dim},
           {"cap_dim_source", c.cap_source},
           {"dense_cap", c.dense_cap}};
    if (c.cap_source == "env") {
        j["cap_dim_env"] = kCapEnv;
    }
    if (c.command == "witness" || c.command == "scan" || c.command == "sample") {
        j["state"] = c.state;
        j["mu"] = c.mu;
        j["p"] = c.p;
        j["coeffs"] = c.coeffs;
    }
    if (c.command != "verify") {
        j["pairing"] = c.pairing;
        j["eta"] = c.eta;
    }
    if (c.command == "sweep") {
        j["family"] = c.family;
        j["grid"] = c.grid;
        j["partition"] = c.partition;
        j["coeffs"] = c.coeffs;
    }
    if (c.command == "scan") {
        j["strategy"] = c.strategy;
        j["max_combinations"] = c.max_combinations;
    }
    if (c.command == "sample" || c.command == "verify") {
        j["shots"] = c.shots;
    }
    if (c.command == "verify") {
        j["random_states"] = c.random_states;
        j["ensembles"] = c.ensembles;
    }
    return j;
}

std::vector<sepbell::PairingIndexSet> resolve_pairings(const RunConfig& c)
{
    const cplx eta = parse_phase(c.eta, "eta");
    if (c.pairing == "canonical") {
        return sepbell::canonical_pairings(c.n, c.d, eta);
    }
    const json doc = c.pairing.starts_with('[') || c.pairing.starts_with('{') ? json::parse(c.pairing, nullptr, false)
                                                                            : sepbell::read_json_file(c.pairing);
    if (doc.is_discarded()) {
        throw Error(ErrorCode::Format, "cannot parse inline pairing JSON");
    }
    std::vector<sepbell::PairingIndexSet> sets;
    if (doc.is_object()) {
        sets.assign(static_cast<std::size_t>(c.n), doc.get<sepbell::PairingIndexSet>());
    } else {
        for (const auto& item : doc) {
            sets.push_back(item.get<sepbell::PairingIndexSet>());
        }
    }
    if (static_cast<int>(sets.size()) != c.n) {
        throw Error(ErrorCode::DimensionMismatch, "pairing file lists " + std::to_string(sets.size()) +
                                                      " sites but --n is " + std::to_string(c.n));
    }
    for (const auto& s : sets) {
        if (s.dim != c.d) {
            throw Error(ErrorCode::DimensionMismatch, "pairing dimension does not match --d");
        }
    }
    return sets;
}

std::vector<sepbell::Vector> resolve_coefficients(const RunConfig& c,
                                                  const std::vector<sepbell::PairingIndexSet>& sets)
{
    if (c.coeffs == "random") {
        sepbell::Rng rng(c.seed);
        return sepbell::random_coefficients(sets, rng);
    }
    if (c.coeffs != "uniform") {
        throw Error(ErrorCode::InvalidParameter, "--coeffs must be uniform or random");
    }
    std::vector<sepbell::Vector> out;
    for (const auto& s : sets) {
        const auto m = s.pair_count();
        out.push_back(sepbell::Vector::Constant(m, cplx{1.0 / std::sqrt(static_cast<double>(m)), 0.0}));
    }
    return out;
}

sepbell::State resolve_state(const RunConfig& c, const std::vector<sepbell::PairingIndexSet>& sets)
{
    const auto limits = c.limits();
    if (c.state.rfind("file:", 0) == 0) {
        auto state = sepbell::state_from_json(sepbell::read_json_file(c.state.substr(5)), limits);
        if (sepbell::num_sites_of(state) != c.n || sepbell::dim_of(state) != c.d) {
            throw Error(ErrorCode::DimensionMismatch, "state file does not match --n/--d");
        }
        return state;
    }
    if (c.state == "psi-mu") {
        return sepbell::psi_mu(sets, resolve_coefficients(c, sets), parse_phase(c.mu, "mu"), limits.max_operator_dim);
    }
    if (c.state == "max") {
        return sepbell::maximally_entangled(c.n, c.d, limits.max_operator_dim);
    }
    if (c.state == "werner") {
        return sepbell::werner_state(c.n, c.d, c.p, limits.max_dense_dim);
    }
    if (c.state == "mixed") {
        return sepbell::maximally_mixed(c.n, c.d, limits.max_dense_dim);
    }
    if (c.state == "product") {
        return sepbell::random_product_state(c.n, c.d, c.seed, limits.max_operator_dim);
    }
    throw Error(ErrorCode::InvalidParameter,
                "unknown state '" + c.state + "'; use psi-mu, max, werner, mixed, product or file:PATH");
}

std::vector<int> parse_partition(const std::string& text)
{
    std::vector<int> sites;
    std::stringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) {
        try {
            sites.push_back(std::stoi(field));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidParameter, "bad partition '" + text + "'");
        }
    }
    return sites;
}

// Writes to a sibling temp file and renames it into place.
void emit(const RunConfig& c, const std::string& body)
{
    if (c.out.empty()) {
        std::cout << body;
        return;
    }
    const std::filesystem::path target(c.out);
    const auto temp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream file(temp, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw Error(ErrorCode::Format, "cannot write '" + temp + "'");
        }
        file << body;
        if (!file.flush()) {
            throw Error(ErrorCode::Format, "write to '" + temp + "' failed");
        }
    }
    std::filesystem::rename(temp, target);
}

std::string json_document(const RunConfig& c, json result)
{
    json doc{{"config", config_json(c)}, {"result", std::move(result)}};
    return doc.dump(2) + "\n";
}

std::string csv_document(const RunConfig& c, const std::string& table)
{
    return "# config: " + config_json(c).dump() + "\n" + table;
}

void require_json(const RunConfig& c)
{
    if (c.format != "json") {
        throw Error(ErrorCode::InvalidParameter, c.command + " only writes json");
    }
}

int cmd_witness(const RunConfig& c)
{
    require_json(c);
    const auto sets = resolve_pairings(c);
    const auto state = resolve_state(c, sets);
    const auto report = sepbell::correlation(state, sets, c.limits());
    emit(c, json_document(c, report));
    return 0;
}

int cmd_sweep(const RunConfig& c)
{
    const auto grid = sepbell::parse_grid(c.grid);
    const auto limits = c.limits();
    if (c.family == "werner") {
        const auto sweep = sepbell::werner_sweep(c.n, c.d, grid, limits);
        if (c.format == "csv") {
            std::ostringstream table;
            sepbell::write_werner_csv(table, sweep);
            table << "# numeric_threshold=" << sepbell::format_real(sweep.numeric_threshold)
                  << " closed_form_threshold=" << sepbell::format_real(sweep.closed_form_threshold) << "\n";
            emit(c, csv_document(c, table.str()));
        } else {
            json rows = json::array();
            for (const auto& r : sweep.rows) {
                rows.push_back({{"p", r.p},
                                {"value", sepbell::complex_to_json(r.value)},
                                {"abs", std::abs(r.value)},
                                {"sep_violated", r.sep_violated},
                                {"lhv_violated", r.lhv_violated}});
            }
            emit(c, json_document(c, {{"rows", rows},
                                      {"numeric_threshold", sweep.numeric_threshold},
                                      {"closed_form_threshold", sweep.closed_form_threshold}}));
        }
        return 0;
    }
    if (c.family == "ppt") {
        const auto sites = parse_partition(c.partition);
        const auto rows = sepbell::ppt_sweep(c.n, c.d, sites, grid, limits);
        const double threshold = sepbell::ppt_threshold(c.n, c.d, sites, limits);
        if (c.format == "csv") {
            std::ostringstream table;
            sepbell::write_ppt_csv(table, rows);
            table << "# ppt_threshold=" << sepbell::format_real(threshold) << " closed_form_threshold="
                  << sepbell::format_real(sepbell::ppt_threshold_closed_form(c.n, c.d)) << "\n";
            emit(c, csv_document(c, table.str()));
        } else {
            json out = json::array();
            for (const auto& r : rows) {
                out.push_back({{"p", r.p}, {"min_eigenvalue", r.min_eigenvalue}});
            }
            emit(c, json_document(c, {{"rows", out},
                                      {"ppt_threshold", threshold},
                                      {"closed_form_threshold", sepbell::ppt_threshold_closed_form(c.n, c.d)}}));
        }
        return 0;
    }
    if (c.family == "mu") {
        // grid values are phases in units of pi: mu = exp(i pi t)
        const auto sets = resolve_pairings(c);
        const auto coeffs = resolve_coefficients(c, sets);
        std::ostringstream table;
        table << "phase,re,im,abs,sep_violated,lhv_violated\n";
        json rows = json::array();
        for (double t : grid) {
            const auto psi = sepbell::psi_mu(sets, coeffs, std::polar(1.0, std::numbers::pi * t), limits.max_operator_dim);
            const auto report = sepbell::correlation(psi, sets, limits);
            const bool sep = sepbell::check_separability(report).certified();
            table << sepbell::format_real(t) << ',' << sepbell::format_real(report.value.real()) << ','
                  << sepbell::format_real(report.value.imag()) << ',' << sepbell::format_real(std::abs(report.value))
                  << ',' << (sep ? 1 : 0) << ',' << (report.lhv_violated ? 1 : 0) << '\n';
            rows.push_back({{"phase", t}, {"report", report}});
        }
        if (c.format == "csv") {
            emit(c, csv_document(c, table.str()));
        } else {
            emit(c, json_document(c, {{"rows", rows}}));
        }
        return 0;
    }
    throw Error(ErrorCode::InvalidParameter, "unknown family '" + c.family + "'; use werner, mu or ppt");
}

int cmd_scan(const RunConfig& c)
{
    require_json(c);
    const auto strategy = sepbell::parse_strategy(c.strategy);
    if (!strategy) {
        throw Error(ErrorCode::InvalidParameter, "unknown strategy '" + c.strategy + "'");
    }
    const auto sets = resolve_pairings(c);
    const auto state = resolve_state(c, sets);
    sepbell::ScanOptions options;
    options.strategy = *strategy;
    options.eta = c.d % 2 == 1 ? parse_phase(c.eta, "eta") : cplx{1.0, 0.0};
    options.limits = c.limits();
    const auto result = sepbell::scan_index_sets(state, options);
    emit(c, json_document(c, {{"examined", result.examined}, {"best", result.best}}));
    return 0;
}

int cmd_sample(const RunConfig& c)
{
    require_json(c);
    const auto sets = resolve_pairings(c);
    const auto state = resolve_state(c, sets);
    const auto sampled = sepbell::sample_correlation(state, sets, c.shots, c.seed, c.limits());
    const auto exact = sepbell::correlation(state, sets, c.limits());
    emit(c, json_document(c, {{"re", sampled.re},
                              {"im", sampled.im},
                              {"exact", {{"re", exact.re_part}, {"im", exact.im_part}}}}));
    return 0;
}

int cmd_verify(const RunConfig& c)
{
    require_json(c);
    sepbell::VerifyOptions options;
    options.num_sites = c.n;
    options.dim = c.d;
    options.seed = c.seed;
    options.limits = c.limits();
    options.shots = c.shots;
    options.random_states = c.random_states;
    options.ensembles = c.ensembles;
    const auto ledger = sepbell::run_verification(options);
    for (const auto& check : ledger.checks) {
        std::cerr << (check.passed ? "PASS " : "FAIL ") << check.name << " expected=" << check.expected
                  << " actual=" << check.actual << " tol=" << check.tolerance << " (" << check.comparison << ")\n";
    }
    emit(c, json_document(c, sepbell::to_json(ledger)));
    return ledger.all_passed() ? 0 : kExitFailedChecks;
}

int cmd_enumerate(const RunConfig& c)
{
    require_json(c);
    const auto sets = sepbell::enumerate_pairings(c.d, parse_phase(c.eta, "eta"));
    emit(c, json_document(c, {{"count", sepbell::count_pairings(c.d)},
                              {"inequalities_for_n_sites", sepbell::exhaustive_combinations(c.n, c.d)},
                              {"pairings", sets}}));
    return 0;
}

void add_state_options(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--state", c.state, "psi-mu | max | werner | mixed | product | file:PATH")->capture_default_str();
    sub->add_option("--mu", c.mu, "phase for psi-mu: 1, -1, i, -i, re,im or phase:x (= e^{i pi x})")
        ->capture_default_str();
    sub->add_option("--p", c.p, "Werner weight in [0, 1]")->capture_default_str();
    sub->add_option("--coeffs", c.coeffs, "psi-mu coefficients: uniform | random")->capture_default_str();
}

void add_pairing_options(CLI::App* sub, RunConfig& c)
{
    sub->add_option("--pairing", c.pairing, "canonical | JSON file | inline JSON")->capture_default_str();
    sub->add_option("--eta", c.eta, "phase of the unpaired index for odd D")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv)
{
    RunConfig config;
    CLI::App app{"Separability Bell operators for N qudits: witnesses, sweeps, scans, sampling, verification"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--n", config.n, "number of qudits N")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--d", config.d, "qudit dimension D")->capture_default_str()->check(CLI::Range(2, 64));
    app.add_option("--seed", config.seed, "RNG seed")->capture_default_str();
    app.add_option("--out", config.out, "output path (stdout if omitted)");
    auto* format_opt =
        app.add_option("--format", config.format, "json | csv")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
    auto* cap_opt = app.add_option("--cap-dim", config.cap_dim, "cap on D^N for operators and state vectors")
                        ->capture_default_str();
    app.add_option("--dense-cap", config.dense_cap, "cap on D^N for dense matrices")->capture_default_str();

    auto* witness = app.add_subcommand("witness", "evaluate Tr rho Sigma_I and both inequality families");
    add_state_options(witness, config);
    add_pairing_options(witness, config);

    auto* sweep = app.add_subcommand("sweep", "Werner, PPT or mu-phase sweeps");
    sweep->add_option("--family", config.family, "werner | ppt | mu")->capture_default_str();
    sweep->add_option("--grid", config.grid, "start:stop:step (mu: phase in units of pi)")->capture_default_str();
    sweep->add_option("--partition", config.partition, "transposed sites for ppt, comma separated")
        ->capture_default_str();
    sweep->add_option("--coeffs", config.coeffs, "psi-mu coefficients: uniform | random")->capture_default_str();
    add_pairing_options(sweep, config);

    auto* scan = app.add_subcommand("scan", "search index sets for the largest |Tr rho Sigma_I|");
    add_state_options(scan, config);
    add_pairing_options(scan, config);
    scan->add_option("--strategy", config.strategy, "exhaustive | greedy | canonical")->capture_default_str();
    scan->add_option("--max-combinations", config.max_combinations, "cap for exhaustive scans")
        ->capture_default_str();

    auto* sample = app.add_subcommand("sample", "finite-shot estimate of Tr rho Sigma_I^{+/-}");
    add_state_options(sample, config);
    add_pairing_options(sample, config);
    sample->add_option("--shots", config.shots, "shots per measurement setting")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run every invariant check at (N, D)");
    verify->add_option("--shots", config.shots, "shots per measurement setting")->capture_default_str();
    verify->add_option("--random-states", config.random_states, "Haar samples per index set")->capture_default_str();
    verify->add_option("--ensembles", config.ensembles, "random separable ensembles")->capture_default_str();

    auto* enumerate = app.add_subcommand("enumerate", "list every index set for D");
    add_pairing_options(enumerate, config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    config.format_given = format_opt->count() > 0;
    if (cap_opt->count() > 0) {
        config.cap_source = "flag";
    } else if (const char* env = std::getenv(kCapEnv)) {
        try {
            config.cap_dim = std::stoull(env);
            config.cap_source = "env";
        } catch (const std::logic_error&) {
            std::cerr << kCapEnv << " must be an integer\n";
            return kExitUsage;
        }
    }

    try {
        if (witness->parsed()) {
            config.command = "witness";
            return cmd_witness(config);
        }
        if (sweep->parsed()) {
            config.command = "sweep";
            if (!config.format_given) {
                config.format = "csv";
            }
            return cmd_sweep(config);
        }
        if (scan->parsed()) {
            config.command = "scan";
            return cmd_scan(config);
        }
        if (sample->parsed()) {
            config.command = "sample";
            return cmd_sample(config);
        }
        if (verify->parsed()) {
            config.command = "verify";
            return cmd_verify(config);
        }
        config.command = "enumerate";
        return cmd_enumerate(config);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_resource_error() ? kExitResource : kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
