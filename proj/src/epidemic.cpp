#include "mlsim/epidemic.hpp"

#include <algorithm>

namespace mlsim {

std::vector<Agent> init_population(const EpidemicConfig& config, RngStream& rng)
{
    std::int64_t total = 0;
    for (const auto& c : config.cities) {
        total += std::max<std::int64_t>(c.population, 0);
    }
    if (config.cities.empty() || total < 1) {
        throw Error(Errc::EmptyPopulation, "epidemic", "no agents to create");
    }
    if (!(config.essential_fraction >= 0.0 && config.essential_fraction <= 1.0)) {
        throw Error(Errc::InvalidArgument, "epidemic", "essential_fraction must lie in [0, 1]");
    }

    std::vector<Agent> agents;
    agents.reserve(static_cast<std::size_t>(total));
    for (std::size_t c = 0; c < config.cities.size(); ++c) {
        for (std::int64_t k = 0; k < config.cities[c].population; ++k) {
            Agent a;
            a.id = agents.size();
            a.home_city = static_cast<CityId>(c);
            a.current_city = a.home_city;
            a.status = Status::S;
            a.occupation = rng.uniform01() < config.essential_fraction ? Occupation::Essential : Occupation::Regular;
            agents.push_back(a);
        }
    }
    agents[rng.uniform_below(agents.size())].status = Status::I;
    return agents;
}

MoveResult move_agents(std::vector<Agent>& agents, std::span<const double> p_by_city,
                       std::span<const MobilityGate> gates, RngStream& rng)
{
    const std::size_t n_cities = gates.size();
    if (p_by_city.size() != n_cities) {
        throw Error(Errc::ContractError, "epidemic", "mobility and gate tables differ in size");
    }
    MoveResult result;
    if (n_cities < 2) {
        result.single_city = true;
        return result;
    }

    for (std::size_t i = 0; i < agents.size(); ++i) {
        auto& a = agents[i];
        if (i > 0 && a.id <= agents[i - 1].id) {
            throw Error(Errc::ContractError, "epidemic", "agents must be sorted by id");
        }
        if (a.current_city >= n_cities) {
            throw Error(Errc::ContractError, "epidemic", "agent " + std::to_string(a.id) + " is in an unknown city");
        }
        const double draw = rng.uniform01();
        if (!(draw < p_by_city[a.current_city]) || a.status == Status::I) {
            continue;
        }
        const auto gate = gates[a.current_city];
        if (gate == MobilityGate::Closed ||
            (gate == MobilityGate::EssentialOnly && a.occupation != Occupation::Essential)) {
            continue;
        }
        auto dest = static_cast<CityId>(rng.uniform_below(n_cities - 1));
        if (dest >= a.current_city) {
            ++dest;
        }
        a.current_city = dest;
        ++result.moved;
    }
    return result;
}

MoveResult move_agents(std::vector<Agent>& agents, double p, std::span<const MobilityGate> gates, RngStream& rng)
{
    const std::vector<double> p_by_city(gates.size(), p);
    return move_agents(agents, p_by_city, gates, rng);
}

namespace {

LockdownPolicy city_policy(const EpidemicConfig& cfg, std::size_t city)
{
    return {cfg.policy.mode, cfg.policy.contagion_factor, cfg.city_threshold(city)};
}

} // namespace

EpidemicSimulation::EpidemicSimulation(const RunConfig& config, EngineOptions options)
    : config_(config)
    , options_(std::move(options))
    , tree_(build_hierarchy(config))
    , move_rng_(derive_stream(config.master_seed, StreamDomain::AgentMove, 0))
{
    const auto& ep = config_.epidemic;
    for (std::size_t c = 0; c < ep.cities.size(); ++c) {
        cities_.push_back({static_cast<CityId>(c), ep.cities[c].name, ep.cities[c].population, ep.city_beta(c)});
        mobility_.push_back(ep.city_mobility(c));
        coordinators_.emplace_back(static_cast<CityId>(c), city_policy(ep, c), ep.policy.latching, ep.city_beta(c),
                                   SeirParams{ep.city_beta(c), ep.sigma, ep.gamma},
                                   derive_stream(config_.master_seed, StreamDomain::CoordinatorAssign, c));
    }

    auto init_rng = derive_stream(config_.master_seed, StreamDomain::Init, 0);
    agents_ = init_population(ep, init_rng);
    for (const auto& a : agents_) {
        if (a.status == Status::I) {
            origin_city_ = a.home_city;
        }
    }
}

std::vector<std::vector<Agent>> EpidemicSimulation::rosters() const
{
    std::vector<std::vector<Agent>> out(cities_.size());
    for (const auto& a : agents_) {
        out[a.current_city].push_back(a);
    }
    return out;
}

std::vector<Census> EpidemicSimulation::census_by_city() const
{
    std::vector<Census> out(cities_.size(), Census{});
    for (const auto& a : agents_) {
        ++out[a.current_city][static_cast<std::size_t>(a.status)];
    }
    return out;
}

ExchangeRecord EpidemicSimulation::pass(const ExchangeRecord& record)
{
    if (!options_.exchange_dir) {
        return record;
    }
    return read_exchange(write_exchange(record, *options_.exchange_dir, clock_.step() + 1));
}

EpidemicStepReport EpidemicSimulation::step()
{
    const double t_start = clock_.now();
    const double t_end = clock_.next();
    const std::size_t workers = static_cast<std::size_t>(config_.worker_count);
    const std::size_t n = cities_.size();
    const auto roster = rosters();

    std::vector<NodeId> coordinator_ids(n);
    std::vector<NodeId> macro_ids(n);
    for (std::size_t c = 0; c < n; ++c) {
        coordinator_ids[c] = coordinator_node(c);
        macro_ids[c] = seir_node(c);
    }
    auto city_of = [](NodeId id) { return static_cast<std::size_t>((id - 1) / 2); };

    // Coordinators: census, policy, macro input.
    auto prepared = run_siblings_parallel(coordinator_ids, workers, [&](NodeId id) {
        const auto c = city_of(id);
        return coordinators_[c].prepare(roster[c]);
    });

    std::vector<ExchangeRecord> to_macro(n);
    for (std::size_t c = 0; c < n; ++c) {
        ExchangeRecord r;
        r.time = t_start;
        r.node_id = coordinator_ids[c];
        r.direction = ExchangeDirection::MicroToMacro;
        const auto values = prepared[c].macro_input.values();
        for (std::size_t k = 0; k < kStatusCount; ++k) {
            r.compartments.emplace_back(seir_labels()[k], values[k]);
        }
        r.params = {{"beta", prepared[c].params.beta},
                    {"sigma", prepared[c].params.sigma},
                    {"gamma", prepared[c].params.gamma}};
        to_macro[c] = pass(r);
    }

    // SEIR models over [t_start, t_end].
    auto macro_results = run_siblings_parallel(macro_ids, workers, [&](NodeId id) {
        const auto c = city_of(id);
        const auto& in = to_macro[c];
        std::vector<double> values;
        for (const auto& label : seir_labels()) {
            values.push_back(in.compartment(label));
        }
        const SeirParams params{in.param("beta"), in.param("sigma"), in.param("gamma")};
        const auto out = run_bracketed(tree_.node(id), seir_model(params),
                                       CompartmentState(seir_labels(), std::move(values)), t_start, t_end);
        ExchangeRecord r;
        r.time = t_end;
        r.node_id = id;
        r.direction = ExchangeDirection::MacroToMicro;
        for (std::size_t k = 0; k < out.size(); ++k) {
            r.compartments.emplace_back(out.labels()[k], out[k]);
        }
        return r;
    });

    std::vector<CompartmentState> macro_out(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto back = pass(macro_results[c]);
        std::vector<double> values;
        for (const auto& label : seir_labels()) {
            values.push_back(back.compartment(label));
        }
        macro_out[c] = CompartmentState(seir_labels(), std::move(values));
    }

    // Coordinators: discretize and pick the agents that change status.
    auto outcomes = run_siblings_parallel(coordinator_ids, workers, [&](NodeId id) {
        const auto c = city_of(id);
        return coordinators_[c].finish(roster[c], prepared[c].census, macro_out[c]);
    });

    EpidemicStepReport report;
    report.step = clock_.step() + 1;
    report.time = t_end;
    for (std::size_t c = 0; c < n; ++c) {
        for (const auto& u : outcomes[c].updates) {
            agents_[u.agent_id].status = u.status;
        }
    }

    const auto after = census_by_city();
    std::vector<MobilityGate> gates(n);
    for (std::size_t c = 0; c < n; ++c) {
        if (after[c] != outcomes[c].after) {
            throw Error(Errc::ContractError, "coordinator",
                        "census of city " + cities_[c].name + " diverged from its discretized SEIR output");
        }
        CityStepReport cr;
        cr.city = static_cast<CityId>(c);
        cr.before = prepared[c].census;
        cr.macro_input.assign(prepared[c].macro_input.values().begin(), prepared[c].macro_input.values().end());
        cr.macro_output = outcomes[c].macro_output;
        cr.discretized = outcomes[c].after;
        cr.after_transitions = after[c];
        cr.lockdown = prepared[c].policy.lockdown;
        cr.gate = prepared[c].policy.gate;
        cr.integrator_dt = tree_.node(macro_ids[c]).integrator->dt;
        cr.shifted_units = outcomes[c].shifted_units;
        report.cities.push_back(std::move(cr));

        gates[c] = prepared[c].policy.gate;
        constexpr auto I = static_cast<std::size_t>(Status::I);
        adapt_lod(tree_.node(macro_ids[c]), infected_growth(prepared[c].census[I], after[c][I]),
                  config_.integrator.g_threshold);
    }

    const auto moved = move_agents(agents_, mobility_, gates, move_rng_);
    report.moved = moved.moved;
    report.single_city = moved.single_city;

    const auto final_census = census_by_city();
    for (std::size_t c = 0; c < n; ++c) {
        report.cities[c].after_move = final_census[c];
    }
    clock_.advance();
    return report;
}

} // namespace mlsim
