#include <doctest.h>

#include "mlsim/pollution.hpp"

#include <cmath>

using namespace mlsim;

TEST_CASE("petrol deposits twice the LPG amount, electric nothing")
{
    CHECK(local_deposit(Fuel::Petrol, 0.5) == 1.0);
    CHECK(local_deposit(Fuel::LPG, 0.5) == 0.5);
    CHECK(local_deposit(Fuel::Electric, 0.5) == 0.0);

    PollutionGrid grid(10, 10);
    Vehicle v{0, Fuel::Petrol, 4, 4};
    step_vehicle(v, 4, grid, 0.5); // (+1, 0)
    CHECK(v.x == 5);
    CHECK(v.y == 4);
    CHECK(grid.at(5, 4) == 1.0);
    CHECK(grid.total() == 1.0);

    std::vector<Vehicle> electric;
    for (std::uint64_t i = 0; i < 20; ++i) {
        electric.push_back({i, Fuel::Electric, static_cast<std::int64_t>(i % 10), 3});
    }
    PollutionGrid clean(10, 10);
    auto rng = derive_stream(2, "vehicle-move", 0);
    move_vehicles(electric, clean, 0.5, rng);
    CHECK(clean.total() == 0.0);
}

TEST_CASE("vehicles wrap around the torus")
{
    PollutionGrid grid(10, 10);
    Vehicle v{0, Fuel::LPG, 0, 0};
    REQUIRE(kMooreDirections[0] == std::array<int, 2>{-1, -1});
    step_vehicle(v, 0, grid, 0.5);
    CHECK(v.x == 9);
    CHECK(v.y == 9);
    CHECK(grid.at(9, 9) == 0.5);
    CHECK(grid.wrap_x(10) == 0);
    CHECK(grid.wrap_y(-11) == 9);
}

TEST_CASE("random moves use all eight directions with equal frequency")
{
    PollutionGrid grid(50, 50);
    std::vector<Vehicle> one{{0, Fuel::Electric, 25, 25}};
    auto rng = derive_stream(3, "vehicle-move", 0);
    std::array<int, 8> seen{};
    const int n = 80000;
    for (int i = 0; i < n; ++i) {
        const auto before = one[0];
        move_vehicles(one, grid, 0.5, rng);
        int dx = static_cast<int>(one[0].x - before.x);
        int dy = static_cast<int>(one[0].y - before.y);
        dx = dx > 1 ? -1 : (dx < -1 ? 1 : dx);
        dy = dy > 1 ? -1 : (dy < -1 ? 1 : dy);
        REQUIRE((dx != 0 || dy != 0));
        for (std::size_t d = 0; d < 8; ++d) {
            if (kMooreDirections[d][0] == dx && kMooreDirections[d][1] == dy) {
                ++seen[d];
            }
        }
    }
    const double expected = n / 8.0;
    for (int s : seen) {
        CHECK(std::abs(s - expected) < 4.0 * std::sqrt(expected * 7.0 / 8.0));
    }
}

TEST_CASE("diffusion spreads to Moore neighbours and conserves the total")
{
    PollutionGrid grid(3, 3);
    grid.at(1, 1) = 8.0;
    const auto out = diffuse(grid, 0.5);
    CHECK(out.at(1, 1) == 4.0);
    for (std::int64_t x = 0; x < 3; ++x) {
        for (std::int64_t y = 0; y < 3; ++y) {
            if (x != 1 || y != 1) {
                CHECK(out.at(x, y) == 0.5);
            }
        }
    }
    CHECK(out.total() == doctest::Approx(8.0));

    PollutionGrid random(7, 5);
    auto rng = derive_stream(9, "init", 0);
    for (auto& v : random.levels()) {
        v = rng.uniform01() * 10;
    }
    const auto same = diffuse(random, 0.0);
    CHECK(std::equal(same.levels().begin(), same.levels().end(), random.levels().begin()));
    CHECK(diffuse(random, 0.7).total() == doctest::Approx(random.total()).epsilon(1e-12));

    PollutionGrid flat(6, 4, 2.5);
    const auto spread = diffuse(flat, 0.3);
    for (double v : spread.levels()) {
        CHECK(v == doctest::Approx(2.5));
    }
}

TEST_CASE("evaporation subtracts and clamps")
{
    PollutionGrid grid(2, 1);
    grid.at(0, 0) = 0.3;
    grid.at(1, 0) = 2.0;
    auto unchanged = grid;
    evaporate(unchanged, 0.0);
    CHECK(unchanged.at(0, 0) == 0.3);
    evaporate(grid, 0.5);
    CHECK(grid.at(0, 0) == 0.0);
    CHECK(grid.at(1, 0) == 1.5);
}

TEST_CASE("global electric pollution is spread evenly")
{
    PollutionGrid grid(10, 10);
    add_global_electric_pollution(grid, 0, 0.08);
    CHECK(grid.total() == 0.0);
    add_global_electric_pollution(grid, 100, 0.0);
    CHECK(grid.total() == 0.0);
    add_global_electric_pollution(grid, 100, 0.08);
    for (double v : grid.levels()) {
        CHECK(v == doctest::Approx(0.08));
    }
}

TEST_CASE("fleet update converts along P->L->E")
{
    std::vector<Vehicle> fleet;
    for (std::uint64_t i = 0; i < 10; ++i) {
        fleet.push_back({i, Fuel::Petrol, 0, 0});
    }
    const std::vector<double> ode{8.0, 1.5, 0.5};
    const auto counts = discretize_conserving(ode, 10);
    CHECK(counts == std::vector<std::int64_t>{8, 2, 0});

    auto rng = derive_stream(1, "fleet-assign", 0);
    update_fleet(fleet, {8, 2, 0}, rng);
    CHECK(count_fleet(fleet) == FleetCounts{8, 2, 0});

    const auto snapshot = fleet;
    update_fleet(fleet, {8, 2, 0}, rng);
    CHECK(fleet == snapshot);

    update_fleet(fleet, {5, 2, 3}, rng);
    CHECK(count_fleet(fleet) == FleetCounts{5, 2, 3});

    try {
        update_fleet(fleet, {6, 1, 3}, rng);
        FAIL("expected UnreachableFleet");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnreachableFleet);
    }
}

TEST_CASE("pollution engine: fleet drifts to electric and updates on schedule")
{
    auto cfg = default_config(Scenario::Pollution);
    cfg.pollution.width = 20;
    cfg.pollution.height = 20;
    cfg.pollution.petrol = 100;
    cfg.pollution.fleet = {0.01, 0.01, 0.02};
    PollutionSimulation sim(cfg);
    CHECK(sim.vehicles().size() == 100);
    FleetCounts prev = sim.fleet();
    for (int step = 1; step <= 400; ++step) {
        const auto r = sim.step();
        CHECK(r.fleet_updated == (step % 10 == 0));
        REQUIRE(r.fleet[0] + r.fleet[1] + r.fleet[2] == 100);
        REQUIRE(r.fleet[0] <= prev[0]);
        REQUIRE(r.fleet[0] + r.fleet[1] <= prev[0] + prev[1]);
        REQUIRE(r.total_pollution >= 0.0);
        prev = r.fleet;
    }
    CHECK(prev[2] > 50);
}
