#include "mlsim/config.hpp"

#include "mlsim/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace mlsim {

using nlohmann::json;

std::string_view to_string(Scenario s) noexcept
{
    return s == Scenario::Epidemic ? "epidemic" : "pollution";
}

std::int64_t EpidemicConfig::city_threshold(std::size_t city) const
{
    if (policy.infected_threshold) {
        return *policy.infected_threshold;
    }
    // 5% of the city's population, rounded up.
    return (cities.at(city).population * 5 + 99) / 100;
}

std::int64_t EpidemicConfig::total_population() const
{
    return std::accumulate(cities.begin(), cities.end(), std::int64_t{0},
                           [](std::int64_t acc, const CityConfig& c) { return acc + c.population; });
}

RunConfig default_config(Scenario scenario)
{
    RunConfig c;
    c.scenario = scenario;
    if (scenario == Scenario::Epidemic) {
        c.steps = 300;
        c.epidemic.cities = {{"A", 1000, {}, {}}, {"B", 1000, {}, {}}, {"C", 1000, {}, {}}};
    } else {
        c.steps = 3000;
    }
    return c;
}

namespace {

/// Walks one JSON object, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string prefix, const std::string& source)
        : obj_(obj)
        , prefix_(std::move(prefix))
        , source_(source)
    {
        if (!obj.is_object()) {
            fail(prefix_.empty() ? "<root>" : prefix_, "must be an object");
        }
    }

    std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    [[noreturn]] void fail(const std::string& key, const std::string& reason) const
    {
        throw SchemaError(source_, key, reason);
    }

    const json* get(const std::string& key)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out)
    {
        if (const auto* v = get(key)) {
            if (!v->is_number()) fail(path(key), "must be a number");
            out = v->get<double>();
        }
    }

    void number(const std::string& key, std::optional<double>& out)
    {
        if (const auto* v = get(key)) {
            if (!v->is_number()) fail(path(key), "must be a number");
            out = v->get<double>();
        }
    }

    void integer(const std::string& key, std::int64_t& out)
    {
        if (const auto* v = get(key)) {
            if (!v->is_number_integer()) fail(path(key), "must be an integer");
            out = v->get<std::int64_t>();
        }
    }

    void integer(const std::string& key, std::optional<std::int64_t>& out)
    {
        std::int64_t tmp = 0;
        if (obj_.contains(key)) {
            integer(key, tmp);
            out = tmp;
        } else {
            seen_.insert(key);
        }
    }

    void unsigned_integer(const std::string& key, std::uint64_t& out)
    {
        if (const auto* v = get(key)) {
            if (!v->is_number_unsigned()) fail(path(key), "must be a nonnegative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const std::string& key, bool& out)
    {
        if (const auto* v = get(key)) {
            if (!v->is_boolean()) fail(path(key), "must be true or false");
            out = v->get<bool>();
        }
    }

    template <class Enum>
    void choice(const std::string& key, Enum& out, std::initializer_list<std::pair<const char*, Enum>> options)
    {
        const auto* v = get(key);
        if (!v) return;
        if (v->is_string()) {
            for (const auto& [name, value] : options) {
                if (v->get<std::string>() == name) {
                    out = value;
                    return;
                }
            }
        }
        std::string allowed;
        for (const auto& [name, value] : options) {
            allowed += allowed.empty() ? name : std::string(", ") + name;
        }
        fail(path(key), "must be one of: " + allowed);
    }

    void finish() const
    {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) {
                fail(path(key), "unknown key");
            }
        }
    }

private:
    const json& obj_;
    std::string prefix_;
    const std::string& source_;
    std::set<std::string> seen_;
};

void read_integrator(const json& j, IntegratorConfig& out, const std::string& source)
{
    ObjectReader r(j, "integrator", source);
    r.number("dt", out.dt);
    r.number("dt_min", out.dt_min);
    r.number("dt_max", out.dt_max);
    r.number("g_threshold", out.g_threshold);
    r.finish();
}

void read_policy(const json& j, PolicyConfig& out, const std::string& source)
{
    ObjectReader r(j, "epidemic.policy", source);
    r.choice("mode", out.mode,
             {{"none", LockdownMode::None}, {"full", LockdownMode::Full}, {"essential_only", LockdownMode::EssentialOnly}});
    r.number("contagion_factor", out.contagion_factor);
    r.integer("infected_threshold", out.infected_threshold);
    r.boolean("latching", out.latching);
    r.finish();
}

void read_epidemic(const json& j, EpidemicConfig& out, const std::string& source)
{
    ObjectReader r(j, "epidemic", source);
    if (const auto* cities = r.get("cities")) {
        if (!cities->is_array()) r.fail("epidemic.cities", "must be an array");
        out.cities.clear();
        for (std::size_t i = 0; i < cities->size(); ++i) {
            const std::string prefix = "epidemic.cities[" + std::to_string(i) + "]";
            ObjectReader c((*cities)[i], prefix, source);
            CityConfig city;
            if (const auto* name = c.get("name")) {
                if (!name->is_string()) c.fail(prefix + ".name", "must be a string");
                city.name = name->get<std::string>();
            } else {
                city.name = "city" + std::to_string(i);
            }
            c.integer("population", city.population);
            c.number("beta", city.beta);
            c.number("mobility", city.mobility);
            c.finish();
            out.cities.push_back(std::move(city));
        }
    }
    r.number("beta", out.beta);
    r.number("sigma", out.sigma);
    r.number("gamma", out.gamma);
    r.number("mobility", out.mobility);
    r.number("essential_fraction", out.essential_fraction);
    if (const auto* policy = r.get("policy")) {
        read_policy(*policy, out.policy, source);
    }
    r.finish();
}

void read_pollution(const json& j, PollutionConfig& out, const std::string& source)
{
    ObjectReader r(j, "pollution", source);
    r.integer("width", out.width);
    r.integer("height", out.height);
    if (const auto* v = r.get("vehicles")) {
        ObjectReader vr(*v, "pollution.vehicles", source);
        vr.integer("petrol", out.petrol);
        vr.integer("lpg", out.lpg);
        vr.integer("electric", out.electric);
        vr.finish();
    }
    r.number("deposit_lpg", out.deposit_lpg);
    r.number("diffusion", out.diffusion);
    r.number("evaporation", out.evaporation);
    r.number("electric_pollution", out.electric_pollution);
    r.integer("fleet_update_period", out.fleet_update_period);
    if (const auto* f = r.get("fleet_rates")) {
        ObjectReader fr(*f, "pollution.fleet_rates", source);
        fr.number("beta", out.fleet.beta);
        fr.number("sigma", out.fleet.sigma);
        fr.number("gamma", out.fleet.gamma);
        fr.finish();
    }
    r.finish();
}

RunConfig parse_document(const json& doc, const std::string& source)
{
    ObjectReader r(doc, "", source);
    Scenario scenario = Scenario::Epidemic;
    r.choice("scenario", scenario, {{"epidemic", Scenario::Epidemic}, {"pollution", Scenario::Pollution}});

    RunConfig c = default_config(scenario);
    r.unsigned_integer("master_seed", c.master_seed);
    r.integer("steps", c.steps);
    r.integer("worker_count", c.worker_count);
    r.choice("exchange_mode", c.exchange_mode,
             {{"in_process", ExchangeMode::InProcess}, {"json_files", ExchangeMode::JsonFiles}});
    if (const auto* v = r.get("integrator")) read_integrator(*v, c.integrator, source);
    if (const auto* v = r.get("epidemic")) read_epidemic(*v, c.epidemic, source);
    if (const auto* v = r.get("pollution")) read_pollution(*v, c.pollution, source);
    r.finish();

    validate(c, source);
    return c;
}

void require(bool ok, const std::string& source, const std::string& key, const std::string& reason)
{
    if (!ok) {
        throw SchemaError(source, key, reason);
    }
}

bool finite_nonnegative(double v)
{
    return std::isfinite(v) && v >= 0.0;
}

} // namespace

void validate(const RunConfig& c, const std::string& source)
{
    require(c.steps >= 1, source, "steps", "must be at least 1");
    require(c.worker_count >= 1, source, "worker_count", "must be at least 1");

    const auto& in = c.integrator;
    require(std::isfinite(in.dt_min) && in.dt_min > 0.0, source, "integrator.dt_min", "must be positive");
    require(std::isfinite(in.dt) && in.dt >= in.dt_min, source, "integrator.dt", "must be >= dt_min");
    require(std::isfinite(in.dt_max) && in.dt_max >= in.dt, source, "integrator.dt_max", "must be >= dt");
    require(finite_nonnegative(in.g_threshold), source, "integrator.g_threshold", "must be nonnegative");

    if (c.scenario == Scenario::Epidemic) {
        const auto& e = c.epidemic;
        require(!e.cities.empty(), source, "epidemic.cities", "at least one city is required");
        for (std::size_t i = 0; i < e.cities.size(); ++i) {
            const auto prefix = "epidemic.cities[" + std::to_string(i) + "]";
            const auto& city = e.cities[i];
            require(city.population > 0, source, prefix + ".population", "must be positive");
            require(!city.name.empty() && city.name.find_first_of(",\"\n\r") == std::string::npos, source,
                    prefix + ".name", "must be non-empty without commas, quotes or newlines");
            if (city.beta) require(finite_nonnegative(*city.beta), source, prefix + ".beta", "must be nonnegative");
            if (city.mobility) {
                require(finite_nonnegative(*city.mobility) && *city.mobility <= 1.0, source, prefix + ".mobility",
                        "must lie in [0, 1]");
            }
        }
        require(finite_nonnegative(e.beta), source, "epidemic.beta", "must be nonnegative");
        require(finite_nonnegative(e.sigma), source, "epidemic.sigma", "must be nonnegative");
        require(finite_nonnegative(e.gamma), source, "epidemic.gamma", "must be nonnegative");
        require(finite_nonnegative(e.mobility) && e.mobility <= 1.0, source, "epidemic.mobility", "must lie in [0, 1]");
        require(finite_nonnegative(e.essential_fraction) && e.essential_fraction <= 1.0, source,
                "epidemic.essential_fraction", "must lie in [0, 1]");
        require(std::isfinite(e.policy.contagion_factor) && e.policy.contagion_factor > 0.0 &&
                    e.policy.contagion_factor <= 1.0,
                source, "epidemic.policy.contagion_factor", "must lie in (0, 1]");
        if (e.policy.infected_threshold) {
            require(*e.policy.infected_threshold >= 0, source, "epidemic.policy.infected_threshold",
                    "must be nonnegative");
        }
    } else {
        const auto& p = c.pollution;
        require(p.width > 0, source, "pollution.width", "must be positive");
        require(p.height > 0, source, "pollution.height", "must be positive");
        require(p.petrol >= 0, source, "pollution.vehicles.petrol", "must be nonnegative");
        require(p.lpg >= 0, source, "pollution.vehicles.lpg", "must be nonnegative");
        require(p.electric >= 0, source, "pollution.vehicles.electric", "must be nonnegative");
        require(finite_nonnegative(p.deposit_lpg), source, "pollution.deposit_lpg", "must be nonnegative");
        require(finite_nonnegative(p.diffusion) && p.diffusion <= 1.0, source, "pollution.diffusion",
                "must lie in [0, 1]");
        require(finite_nonnegative(p.evaporation), source, "pollution.evaporation", "must be nonnegative");
        require(finite_nonnegative(p.electric_pollution), source, "pollution.electric_pollution",
                "must be nonnegative");
        require(p.fleet_update_period >= 1, source, "pollution.fleet_update_period", "must be at least 1");
        require(finite_nonnegative(p.fleet.beta), source, "pollution.fleet_rates.beta", "must be nonnegative");
        require(finite_nonnegative(p.fleet.sigma), source, "pollution.fleet_rates.sigma", "must be nonnegative");
        require(finite_nonnegative(p.fleet.gamma), source, "pollution.fleet_rates.gamma", "must be nonnegative");
    }
}

RunConfig parse_config_text(std::string_view text, const std::string& source)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw SchemaError(source, "<document>", e.what());
    }
    return parse_document(doc, source);
}

RunConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::FileNotFound, "config", path.string() + ": cannot open configuration");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

} // namespace mlsim
