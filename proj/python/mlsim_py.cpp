#include "mlsim/coordinator.hpp"
#include "mlsim/flow.hpp"
#include "mlsim/ode.hpp"
#include "mlsim/pollution.hpp"
#include "mlsim/rng.hpp"
#include "mlsim/run.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <optional>

namespace py = pybind11;

namespace {

mlsim::RunConfig load(mlsim::Scenario scenario, const std::optional<std::string>& config_json,
                      std::optional<std::uint64_t> seed, std::optional<std::int64_t> steps,
                      std::optional<std::int64_t> workers)
{
    auto config = config_json ? mlsim::parse_config_text(*config_json, "<python>") : mlsim::default_config(scenario);
    if (config.scenario != scenario) {
        throw mlsim::Error(mlsim::Errc::SchemaError, "config", "configuration is for another scenario");
    }
    if (seed) config.master_seed = *seed;
    if (steps) config.steps = *steps;
    if (workers) config.worker_count = *workers;
    mlsim::validate(config, "<python>");
    return config;
}

py::dict to_dict(const mlsim::OutputTable& table)
{
    py::list rows;
    for (const auto& r : table.rows) {
        py::dict d;
        d["step"] = r.step;
        d["node_id"] = r.node_id;
        d["label"] = r.label;
        for (std::size_t k = 0; k < table.columns.size(); ++k) {
            d[py::str(table.columns[k])] = r.values[k];
        }
        rows.append(d);
    }
    py::dict out;
    out["columns"] = table.columns;
    out["rows"] = rows;
    out["csv"] = mlsim::format_csv(table);
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Multilevel epidemic and pollution simulation engine";

    static py::exception<mlsim::Error> error(m, "MlsimError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const mlsim::Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def(
        "seir_derivative",
        [](std::vector<double> y, double beta, double sigma, double gamma) {
            return mlsim::seir_derivative(mlsim::CompartmentState(mlsim::seir_labels(), std::move(y)),
                                          {beta, sigma, gamma});
        },
        py::arg("state"), py::arg("beta"), py::arg("sigma"), py::arg("gamma"));

    m.def(
        "fleet_derivative",
        [](std::vector<double> y, double beta, double sigma, double gamma) {
            return mlsim::fleet_derivative(mlsim::CompartmentState(mlsim::fleet_labels(), std::move(y)),
                                           {beta, sigma, gamma});
        },
        py::arg("state"), py::arg("beta"), py::arg("sigma"), py::arg("gamma"));

    m.def(
        "integrate_seir",
        [](std::vector<double> y, double beta, double sigma, double gamma, double t0, double t1, double dt) {
            const auto out = mlsim::integrate(mlsim::seir_model({beta, sigma, gamma}),
                                              mlsim::CompartmentState(mlsim::seir_labels(), std::move(y)), t0, t1, dt);
            return std::vector<double>(out.values().begin(), out.values().end());
        },
        py::arg("state"), py::arg("beta"), py::arg("sigma"), py::arg("gamma"), py::arg("t0"), py::arg("t1"),
        py::arg("dt"));

    m.def(
        "integrate_fleet",
        [](std::vector<double> y, double beta, double sigma, double gamma, double t0, double t1, double dt) {
            const auto out = mlsim::integrate(mlsim::fleet_model({beta, sigma, gamma}),
                                              mlsim::CompartmentState(mlsim::fleet_labels(), std::move(y)), t0, t1, dt);
            return std::vector<double>(out.values().begin(), out.values().end());
        },
        py::arg("state"), py::arg("beta"), py::arg("sigma"), py::arg("gamma"), py::arg("t0"), py::arg("t1"),
        py::arg("dt"));

    m.def(
        "discretize_conserving",
        [](const std::vector<double>& values, std::int64_t total) { return mlsim::discretize_conserving(values, total); },
        py::arg("values"), py::arg("target_total"));

    m.def(
        "diffuse",
        [](const std::vector<std::vector<double>>& levels, double d) {
            const auto h = static_cast<std::int64_t>(levels.size());
            const auto w = h ? static_cast<std::int64_t>(levels[0].size()) : 0;
            mlsim::PollutionGrid grid(w, h);
            for (std::int64_t y = 0; y < h; ++y) {
                for (std::int64_t x = 0; x < w; ++x) {
                    grid.at(x, y) = levels.at(static_cast<std::size_t>(y)).at(static_cast<std::size_t>(x));
                }
            }
            const auto out = mlsim::diffuse(grid, d);
            std::vector<std::vector<double>> result(static_cast<std::size_t>(h), std::vector<double>(w));
            for (std::int64_t y = 0; y < h; ++y) {
                for (std::int64_t x = 0; x < w; ++x) {
                    result[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = out.at(x, y);
                }
            }
            return result;
        },
        py::arg("levels"), py::arg("d"));

    py::class_<mlsim::RngStream>(m, "RngStream")
        .def("next", [](mlsim::RngStream& s) { return s(); })
        .def("uniform01", &mlsim::RngStream::uniform01)
        .def("uniform_below", &mlsim::RngStream::uniform_below, py::arg("bound"))
        .def_property_readonly("state", [](const mlsim::RngStream& s) {
            return std::vector<std::uint64_t>(s.state().begin(), s.state().end());
        });

    m.def(
        "derive_stream",
        [](std::uint64_t seed, const std::string& tag, std::uint64_t entity) {
            return mlsim::derive_stream(seed, tag, entity);
        },
        py::arg("master_seed"), py::arg("domain_tag"), py::arg("entity_id"));

    m.def(
        "run_epidemic",
        [](std::optional<std::string> config_json, std::optional<std::uint64_t> seed, std::optional<std::int64_t> steps,
           std::optional<std::int64_t> workers) {
            auto config = load(mlsim::Scenario::Epidemic, config_json, seed, steps, workers);
            mlsim::OutputTable table;
            {
                py::gil_scoped_release release;
                table = mlsim::run_epidemic(config);
            }
            return to_dict(table);
        },
        py::arg("config_json") = py::none(), py::arg("seed") = py::none(), py::arg("steps") = py::none(),
        py::arg("workers") = py::none());

    m.def(
        "run_pollution",
        [](std::optional<std::string> config_json, std::optional<std::uint64_t> seed, std::optional<std::int64_t> steps) {
            auto config = load(mlsim::Scenario::Pollution, config_json, seed, steps, std::nullopt);
            mlsim::OutputTable table;
            {
                py::gil_scoped_release release;
                table = mlsim::run_pollution(config);
            }
            return to_dict(table);
        },
        py::arg("config_json") = py::none(), py::arg("seed") = py::none(), py::arg("steps") = py::none());

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) { return mlsim::run_cli(args, std::cout, std::cerr); },
        py::arg("args"));
}
