#pragma once

#include "mlsim/ode.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mlsim {

enum class Scenario { Epidemic, Pollution };
enum class ExchangeMode { InProcess, JsonFiles };
enum class LockdownMode { None, Full, EssentialOnly };

std::string_view to_string(Scenario s) noexcept;

struct IntegratorConfig {
    double dt = 0.25;
    double dt_min = 0.0625;
    double dt_max = 1.0;
    double g_threshold = 0.05;
};

struct CityConfig {
    std::string name;
    std::int64_t population = 0;
    std::optional<double> beta;     // falls back to EpidemicConfig::beta
    std::optional<double> mobility; // falls back to EpidemicConfig::mobility
};

struct PolicyConfig {
    LockdownMode mode = LockdownMode::None;
    double contagion_factor = 0.5;
    std::optional<std::int64_t> infected_threshold; // default: 5% of each city's population
    bool latching = true;
};

struct EpidemicConfig {
    std::vector<CityConfig> cities;
    double beta = 0.0003;
    double sigma = 0.2;
    double gamma = 0.1;
    double mobility = 0.01;
    double essential_fraction = 0.2;
    PolicyConfig policy;

    double city_beta(std::size_t city) const { return cities.at(city).beta.value_or(beta); }
    double city_mobility(std::size_t city) const { return cities.at(city).mobility.value_or(mobility); }
    std::int64_t city_threshold(std::size_t city) const;
    std::int64_t total_population() const;
};

struct PollutionConfig {
    std::int64_t width = 50;
    std::int64_t height = 50;
    std::int64_t petrol = 500;
    std::int64_t lpg = 0;
    std::int64_t electric = 0;
    double deposit_lpg = 0.5;
    double diffusion = 0.5;
    double evaporation = 0.05;
    double electric_pollution = 0.0;
    std::int64_t fleet_update_period = 10;
    FleetParams fleet{0.001, 0.001, 0.002};

    std::int64_t vehicle_count() const { return petrol + lpg + electric; }
};

struct RunConfig {
    Scenario scenario = Scenario::Epidemic;
    std::uint64_t master_seed = 1;
    std::int64_t steps = 300;
    std::int64_t worker_count = 1;
    ExchangeMode exchange_mode = ExchangeMode::InProcess;
    IntegratorConfig integrator;
    EpidemicConfig epidemic;
    PollutionConfig pollution;
};

/// Built-in configuration used when no file is given: three cities of 1000
/// for the epidemic, a 50x50 grid with 500 petrol vehicles for pollution.
RunConfig default_config(Scenario scenario);

/// Reads and validates a JSON configuration. Unknown keys are rejected.
/// Throws Error(FileNotFound) or SchemaError.
RunConfig parse_config(const std::filesystem::path& path);

/// Same as parse_config for an in-memory JSON document; `source` names it in
/// errors.
RunConfig parse_config_text(std::string_view text, const std::string& source);

/// Checks every invariant of a RunConfig. Throws SchemaError naming the key.
void validate(const RunConfig& config, const std::string& source = "<config>");

} // namespace mlsim
