#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sepbell/sepbell.hpp"

namespace py = pybind11;
using namespace sepbell;

namespace {

py::object to_python(const json& j)
{
    switch (j.type()) {
    case json::value_t::null:
        return py::none();
    case json::value_t::boolean:
        return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
        return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned:
        return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float:
        return py::float_(j.get<double>());
    case json::value_t::string:
        return py::str(j.get<std::string>());
    case json::value_t::array: {
        py::list out;
        for (const auto& item : j) {
            out.append(to_python(item));
        }
        return out;
    }
    default: {
        py::dict out;
        for (const auto& [key, value] : j.items()) {
            out[py::str(key)] = to_python(value);
        }
        return out;
    }
    }
}

State make_state(const Matrix& data, std::span<const PairingIndexSet> pairings)
{
    if (pairings.empty()) {
        throw Error(ErrorCode::InvalidParameter, "at least one index set is required");
    }
    const int n = static_cast<int>(pairings.size());
    const int d = pairings.front().dim;
    if (data.cols() == 1 || data.rows() == 1) {
        PureState psi{n, d, data.cols() == 1 ? Vector(data.col(0)) : Vector(data.row(0).transpose())};
        psi.validate();
        return psi;
    }
    DensityMatrix rho{n, d, data};
    rho.validate();
    return rho;
}

GlobalOperator global_part(const std::vector<PairingIndexSet>& pairings, const std::string& part, Index cap)
{
    if (part == "full") {
        return global_sigma(pairings, cap);
    }
    if (part == "plus") {
        return global_sigma_plus(pairings, cap);
    }
    if (part == "minus") {
        return global_sigma_minus(pairings, cap);
    }
    throw Error(ErrorCode::InvalidParameter, "part must be full, plus or minus");
}

}  // namespace

PYBIND11_MODULE(_sepbell, m)
{
    m.doc() = "Separability Bell operators for N qudits";

    py::register_exception<Error>(m, "SepbellError", PyExc_ValueError);

    py::class_<PairingIndexSet>(m, "PairingIndexSet")
        .def(py::init([](int dim, std::vector<std::pair<int, int>> pairs, std::optional<int> unpaired, cplx eta) {
                 PairingIndexSet s{dim, std::move(pairs), unpaired, eta};
                 s.validate();
                 return s;
             }),
             py::arg("dim"), py::arg("pairs"), py::arg("unpaired") = std::nullopt, py::arg("eta") = cplx{0.0, 0.0})
        .def_readonly("dim", &PairingIndexSet::dim)
        .def_readonly("pairs", &PairingIndexSet::pairs)
        .def_readonly("unpaired", &PairingIndexSet::unpaired)
        .def_readonly("eta", &PairingIndexSet::eta)
        .def("key", &PairingIndexSet::key)
        .def("__eq__", [](const PairingIndexSet& a, const PairingIndexSet& b) { return a == b; })
        .def("__repr__", [](const PairingIndexSet& s) { return "PairingIndexSet(" + s.key() + ")"; });

    m.def("enumerate_pairings", &enumerate_pairings, py::arg("dim"), py::arg("eta") = cplx{1.0, 0.0});
    m.def("count_pairings", &count_pairings, py::arg("dim"));
    m.def("canonical_pairing", &canonical_pairing, py::arg("dim"), py::arg("eta") = cplx{1.0, 0.0});
    m.def("canonical_pairings", &canonical_pairings, py::arg("num_sites"), py::arg("dim"),
          py::arg("eta") = cplx{1.0, 0.0});

    m.def("local_sigma", [](const PairingIndexSet& s) { return local_sigma(s).entries; });
    m.def("local_sigma_plus", [](const PairingIndexSet& s) { return local_sigma_plus(s).entries; });
    m.def("local_sigma_minus", [](const PairingIndexSet& s) { return local_sigma_minus(s).entries; });

    m.def(
        "global_sigma",
        [](const std::vector<PairingIndexSet>& pairings, const std::string& part, Index cap) {
            return global_part(pairings, part, cap).to_dense(cap);
        },
        py::arg("pairings"), py::arg("part") = "full", py::arg("cap") = Limits{}.max_dense_dim,
        "Dense Sigma_I (part='full'), Sigma_I^+ ('plus') or Sigma_I^- ('minus').");
    m.def(
        "global_nonzeros",
        [](const std::vector<PairingIndexSet>& pairings, const std::string& part) {
            return global_part(pairings, part, Limits{}.max_operator_dim).nonzeros();
        },
        py::arg("pairings"), py::arg("part") = "full");

    m.def(
        "psi_mu",
        [](const std::vector<PairingIndexSet>& pairings, const std::vector<Vector>& coeffs, cplx mu) {
            return psi_mu(pairings, coeffs, mu).amplitudes;
        },
        py::arg("pairings"), py::arg("coeffs"), py::arg("mu"));
    m.def(
        "maximally_entangled", [](int n, int d) { return maximally_entangled(n, d).amplitudes; }, py::arg("num_sites"),
        py::arg("dim"));
    m.def(
        "werner_state", [](int n, int d, double p) { return werner_state(n, d, p).entries; }, py::arg("num_sites"),
        py::arg("dim"), py::arg("p"));
    m.def(
        "random_product_state",
        [](int n, int d, std::uint64_t seed) { return random_product_state(n, d, seed).amplitudes; },
        py::arg("num_sites"), py::arg("dim"), py::arg("seed"));

    m.def(
        "correlation",
        [](const Matrix& state, const std::vector<PairingIndexSet>& pairings) {
            return to_python(json(correlation(make_state(state, pairings), pairings)));
        },
        py::arg("state"), py::arg("pairings"),
        "Report for a state vector (1-D) or density matrix (2-D) against Sigma_I.");
    m.def(
        "scan_index_sets",
        [](const Matrix& state, int n, int d, const std::string& strategy) {
            const auto parsed = parse_strategy(strategy);
            if (!parsed) {
                throw Error(ErrorCode::InvalidParameter, "unknown strategy '" + strategy + "'");
            }
            ScanOptions options;
            options.strategy = *parsed;
            const auto result = scan_index_sets(make_state(state, canonical_pairings(n, d)), options);
            return to_python(json{{"best", result.best}, {"examined", result.examined}});
        },
        py::arg("state"), py::arg("num_sites"), py::arg("dim"), py::arg("strategy") = "exhaustive");

    m.def("werner_correlation_closed_form", &werner_correlation_closed_form, py::arg("num_sites"), py::arg("dim"),
          py::arg("p"));
    m.def("werner_threshold_closed_form", &werner_threshold_closed_form, py::arg("num_sites"), py::arg("dim"));
    m.def(
        "werner_sweep",
        [](int n, int d, const std::vector<double>& grid) {
            const auto sweep = werner_sweep(n, d, grid);
            py::list rows;
            for (const auto& row : sweep.rows) {
                py::dict r;
                r["p"] = row.p;
                r["value"] = row.value;
                r["sep_violated"] = row.sep_violated;
                r["lhv_violated"] = row.lhv_violated;
                rows.append(r);
            }
            py::dict out;
            out["rows"] = rows;
            out["numeric_threshold"] = sweep.numeric_threshold;
            out["closed_form_threshold"] = sweep.closed_form_threshold;
            return out;
        },
        py::arg("num_sites"), py::arg("dim"), py::arg("grid"));

    m.def(
        "maximize_over_products",
        [](const std::vector<PairingIndexSet>& pairings, int restarts, std::uint64_t seed) {
            const auto r = maximize_over_products(pairings, restarts, seed);
            py::dict out;
            out["best_value"] = r.best_value;
            out["argument"] = r.argument;
            out["iterations"] = r.iterations;
            out["converged"] = r.converged;
            return out;
        },
        py::arg("pairings"), py::arg("restarts") = 6, py::arg("seed") = 1);
    m.def(
        "spectral_extremes",
        [](const std::vector<PairingIndexSet>& pairings, const std::string& part) {
            const auto s = spectral_extremes(global_part(pairings, part, Limits{}.max_operator_dim));
            return std::make_pair(s.min, s.max);
        },
        py::arg("pairings"), py::arg("part") = "plus");
    m.def(
        "ppt_min_eigenvalue",
        [](const Matrix& rho, int n, int d, const std::vector<int>& sites) {
            return ppt_min_eigenvalue(DensityMatrix{n, d, rho}, sites);
        },
        py::arg("rho"), py::arg("num_sites"), py::arg("dim"), py::arg("sites"));
    m.def(
        "ppt_threshold",
        [](int n, int d, const std::vector<int>& sites) { return ppt_threshold(n, d, sites); },
        py::arg("num_sites"), py::arg("dim"), py::arg("sites"));
    m.def("ppt_threshold_closed_form", &ppt_threshold_closed_form, py::arg("num_sites"), py::arg("dim"));
    m.def(
        "sample_correlation",
        [](const Matrix& state, const std::vector<PairingIndexSet>& pairings, std::uint64_t shots,
           std::uint64_t seed) {
            const auto s = sample_correlation(make_state(state, pairings), pairings, shots, seed);
            return to_python(json{{"re", s.re}, {"im", s.im}});
        },
        py::arg("state"), py::arg("pairings"), py::arg("shots"), py::arg("seed") = 1);

    m.def(
        "verify",
        [](int n, int d, std::uint64_t seed, std::uint64_t shots) {
            VerifyOptions options;
            options.num_sites = n;
            options.dim = d;
            options.seed = seed;
            options.shots = shots;
            py::gil_scoped_release release;
            const auto ledger = run_verification(options);
            py::gil_scoped_acquire acquire;
            return to_python(to_json(ledger));
        },
        py::arg("num_sites"), py::arg("dim"), py::arg("seed") = 1, py::arg("shots") = 20000);
}
