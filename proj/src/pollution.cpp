#include "mlsim/pollution.hpp"

#include <numeric>

namespace mlsim {

FleetCounts count_fleet(std::span<const Vehicle> vehicles)
{
    FleetCounts counts{};
    for (const auto& v : vehicles) {
        ++counts[static_cast<std::size_t>(v.fuel)];
    }
    return counts;
}

PollutionGrid::PollutionGrid(std::int64_t width, std::int64_t height, double initial)
    : width_(width)
    , height_(height)
{
    if (width <= 0 || height <= 0) {
        throw Error(Errc::EmptyScenario, "pollution", "grid dimensions must be positive");
    }
    levels_.assign(static_cast<std::size_t>(width * height), initial);
}

double& PollutionGrid::at(std::int64_t x, std::int64_t y)
{
    return levels_[static_cast<std::size_t>(wrap_y(y) * width_ + wrap_x(x))];
}

double PollutionGrid::at(std::int64_t x, std::int64_t y) const
{
    return levels_[static_cast<std::size_t>(wrap_y(y) * width_ + wrap_x(x))];
}

double PollutionGrid::total() const noexcept
{
    return std::accumulate(levels_.begin(), levels_.end(), 0.0);
}

std::int64_t PollutionGrid::wrap_x(std::int64_t x) const noexcept
{
    const auto r = x % width_;
    return r < 0 ? r + width_ : r;
}

std::int64_t PollutionGrid::wrap_y(std::int64_t y) const noexcept
{
    const auto r = y % height_;
    return r < 0 ? r + height_ : r;
}

double local_deposit(Fuel fuel, double deposit_lpg) noexcept
{
    switch (fuel) {
    case Fuel::Petrol: return 2.0 * deposit_lpg;
    case Fuel::LPG: return deposit_lpg;
    case Fuel::Electric: return 0.0;
    }
    return 0.0;
}

void step_vehicle(Vehicle& vehicle, std::size_t dir, PollutionGrid& grid, double deposit_lpg)
{
    const auto& d = kMooreDirections.at(dir);
    vehicle.x = grid.wrap_x(vehicle.x + d[0]);
    vehicle.y = grid.wrap_y(vehicle.y + d[1]);
    const double amount = local_deposit(vehicle.fuel, deposit_lpg);
    if (amount > 0.0) {
        grid.at(vehicle.x, vehicle.y) += amount;
    }
}

void move_vehicles(std::vector<Vehicle>& vehicles, PollutionGrid& grid, double deposit_lpg, RngStream& rng)
{
    for (auto& v : vehicles) {
        step_vehicle(v, static_cast<std::size_t>(rng.uniform_below(kMooreDirections.size())), grid, deposit_lpg);
    }
}

PollutionGrid diffuse(const PollutionGrid& grid, double d)
{
    if (!(d >= 0.0 && d <= 1.0)) {
        throw Error(Errc::InvalidArgument, "pollution", "diffusion fraction must lie in [0, 1]");
    }
    PollutionGrid out(grid.width(), grid.height());
    const std::int64_t w = grid.width();
    const std::int64_t h = grid.height();
    const double keep = 1.0 - d;
    const double share = d / 8.0;
    for (std::int64_t y = 0; y < h; ++y) {
        for (std::int64_t x = 0; x < w; ++x) {
            double inflow = 0.0;
            for (const auto& dir : kMooreDirections) {
                inflow += grid.at(x + dir[0], y + dir[1]);
            }
            out.at(x, y) = keep * grid.at(x, y) + share * inflow;
        }
    }
    return out;
}

void evaporate(PollutionGrid& grid, double e)
{
    if (e < 0.0) {
        throw Error(Errc::InvalidArgument, "pollution", "evaporation must be nonnegative");
    }
    for (double& level : grid.levels()) {
        level = std::max(0.0, level - e);
    }
}

void add_global_electric_pollution(PollutionGrid& grid, std::int64_t num_electric, double electric_pollution)
{
    const double per_patch =
        static_cast<double>(num_electric) * electric_pollution / static_cast<double>(grid.patch_count());
    if (per_patch == 0.0) {
        return;
    }
    for (double& level : grid.levels()) {
        level += per_patch;
    }
}

void update_fleet(std::vector<Vehicle>& vehicles, const FleetCounts& new_counts, RngStream& rng)
{
    std::vector<StageMember> members;
    members.reserve(vehicles.size());
    for (const auto& v : vehicles) {
        members.push_back({v.id, static_cast<std::size_t>(v.fuel)});
    }
    const auto old_counts = count_fleet(vehicles);
    const auto changed =
        chain_transitions(members, old_counts, new_counts, rng, Errc::UnreachableFleet, "pollution");

    // members and vehicles share the same id-sorted order.
    std::size_t j = 0;
    for (const auto& c : changed) {
        while (vehicles[j].id != c.id) {
            ++j;
        }
        vehicles[j].fuel = static_cast<Fuel>(c.stage);
    }
}

PollutionSimulation::PollutionSimulation(const RunConfig& config, std::optional<std::filesystem::path> exchange_dir)
    : config_(config)
    , exchange_dir_(std::move(exchange_dir))
    , tree_(build_hierarchy(config))
    , grid_(config.pollution.width, config.pollution.height)
    , coupling_(3)
    , move_rng_(derive_stream(config.master_seed, StreamDomain::VehicleMove, 0))
    , fleet_rng_(derive_stream(config.master_seed, StreamDomain::FleetAssign, 0))
{
    const auto& p = config_.pollution;
    params_ = {p.deposit_lpg, p.diffusion, p.evaporation, p.electric_pollution, p.fleet_update_period};

    auto init = derive_stream(config_.master_seed, StreamDomain::Init, 0);
    const std::array<std::pair<Fuel, std::int64_t>, 3> mix = {
        {{Fuel::Petrol, p.petrol}, {Fuel::LPG, p.lpg}, {Fuel::Electric, p.electric}}};
    for (const auto& [fuel, count] : mix) {
        for (std::int64_t k = 0; k < count; ++k) {
            Vehicle v;
            v.id = vehicles_.size();
            v.fuel = fuel;
            v.x = static_cast<std::int64_t>(init.uniform_below(static_cast<std::uint64_t>(p.width)));
            v.y = static_cast<std::int64_t>(init.uniform_below(static_cast<std::uint64_t>(p.height)));
            vehicles_.push_back(v);
        }
    }
}

ExchangeRecord PollutionSimulation::pass(const ExchangeRecord& record)
{
    if (!exchange_dir_) {
        return record;
    }
    return read_exchange(write_exchange(record, *exchange_dir_, clock_.step() + 1));
}

void PollutionSimulation::run_fleet_model(double t_start, double t_end)
{
    const auto census = count_fleet(vehicles_);
    const auto input = coupling_.macro_input(census);

    ExchangeRecord up;
    up.time = t_start;
    up.node_id = kGridNode;
    up.direction = ExchangeDirection::MicroToMacro;
    for (std::size_t k = 0; k < 3; ++k) {
        up.compartments.emplace_back(fleet_labels()[k], input[k]);
    }
    up.params = {{"beta", config_.pollution.fleet.beta},
                 {"sigma", config_.pollution.fleet.sigma},
                 {"gamma", config_.pollution.fleet.gamma}};
    up = pass(up);

    std::vector<double> values;
    for (const auto& label : fleet_labels()) {
        values.push_back(up.compartment(label));
    }
    const FleetParams rates{up.param("beta"), up.param("sigma"), up.param("gamma")};
    const auto out = run_bracketed(tree_.node(kFleetNode), fleet_model(rates),
                                   CompartmentState(fleet_labels(), std::move(values)), t_start, t_end);

    ExchangeRecord down;
    down.time = t_end;
    down.node_id = kFleetNode;
    down.direction = ExchangeDirection::MacroToMicro;
    for (std::size_t k = 0; k < out.size(); ++k) {
        down.compartments.emplace_back(out.labels()[k], out[k]);
    }
    down = pass(down);

    std::vector<double> result;
    for (const auto& label : fleet_labels()) {
        result.push_back(down.compartment(label));
    }
    const auto discrete = coupling_.discretize(census, result);
    FleetCounts target{};
    std::copy(discrete.counts.begin(), discrete.counts.end(), target.begin());
    update_fleet(vehicles_, target, fleet_rng_);
}

PollutionStepReport PollutionSimulation::step()
{
    move_vehicles(vehicles_, grid_, params_.deposit_lpg, move_rng_);
    add_global_electric_pollution(grid_, count_fleet(vehicles_)[static_cast<std::size_t>(Fuel::Electric)],
                                  params_.electric_pollution);
    grid_ = diffuse(grid_, params_.diffusion);
    evaporate(grid_, params_.evaporation);

    PollutionStepReport report;
    report.step = clock_.step() + 1;
    if (report.step % params_.fleet_update_period == 0) {
        const double t_end = clock_.next();
        const double t_start = t_end - static_cast<double>(params_.fleet_update_period) * clock_.micro_step();
        run_fleet_model(t_start, t_end);
        report.fleet_updated = true;
    }
    clock_.advance();

    report.total_pollution = grid_.total();
    report.fleet = count_fleet(vehicles_);
    return report;
}

} // namespace mlsim
