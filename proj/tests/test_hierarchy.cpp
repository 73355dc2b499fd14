#include <doctest.h>

#include "mlsim/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

using namespace mlsim;

namespace {

ModelNode continuous(NodeId id, double dt, double dt_min, double dt_max)
{
    return {id, NodeKind::ContinuousMacro, "n" + std::to_string(id), {}, IntegratorSettings{dt, dt_min, dt_max}};
}

} // namespace

TEST_CASE("epidemic hierarchy: root, a coordinator per city, a SEIR node each")
{
    const auto tree = build_hierarchy(default_config(Scenario::Epidemic));
    CHECK(tree.size() == 7);
    CHECK(tree.root().kind == NodeKind::Coordinator);
    CHECK(tree.root().children.size() == 3);
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& coord = tree.node(coordinator_node(c));
        CHECK(coord.kind == NodeKind::Coordinator);
        REQUIRE(coord.children.size() == 1);
        CHECK(tree.node(coord.children[0]).kind == NodeKind::ContinuousMacro);
        CHECK(tree.parent(seir_node(c)) == coordinator_node(c));
    }
    CHECK_NOTHROW(tree.validate());
}

TEST_CASE("pollution hierarchy: grid node and fleet node")
{
    const auto tree = build_hierarchy(default_config(Scenario::Pollution));
    CHECK(tree.size() == 3);
    CHECK(tree.node(kGridNode).kind == NodeKind::DiscreteMicro);
    CHECK(tree.node(kFleetNode).kind == NodeKind::ContinuousMacro);
}

TEST_CASE("hierarchy errors")
{
    auto cfg = default_config(Scenario::Epidemic);
    cfg.epidemic.cities[2].name = cfg.epidemic.cities[0].name;
    try {
        build_hierarchy(cfg);
        FAIL("expected DuplicateNodeId");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DuplicateNodeId);
    }

    cfg.epidemic.cities.clear();
    try {
        build_hierarchy(cfg);
        FAIL("expected EmptyScenario");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyScenario);
    }

    auto pol = default_config(Scenario::Pollution);
    pol.pollution.width = 0;
    CHECK_THROWS_AS(build_hierarchy(pol), Error);

    ModelTree tree;
    tree.add_node({0, NodeKind::Coordinator, "root", {}, {}}, std::nullopt);
    tree.add_node(continuous(1, 0.5, 0.1, 1.0), 0);
    try {
        tree.add_node(continuous(1, 0.5, 0.1, 1.0), 0);
        FAIL("expected DuplicateNodeId");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DuplicateNodeId);
    }
    tree.node(1).integrator->dt = 2.0;
    CHECK_THROWS_AS(tree.validate(), Error);
}

TEST_CASE("run_bracketed sub-steps land exactly on t_end")
{
    const auto node = continuous(2, 0.25, 0.1, 1.0);
    IntegrationTrace trace;
    const auto out = run_bracketed(node, seir_model({0.0003, 0.2, 0.1}), CompartmentState::seir(990, 0, 10, 0), 5.0,
                                   6.0, &trace);
    CHECK(trace.times.size() == 5); // 4 sub-steps
    CHECK(trace.times.back() == 6.0);

    trace.times.clear();
    const auto node3 = continuous(2, 0.3, 0.1, 1.0);
    run_bracketed(node3, seir_model({0.0003, 0.2, 0.1}), CompartmentState::seir(990, 0, 10, 0), 5.0, 6.0, &trace);
    REQUIRE(trace.times.size() == 5);
    CHECK(trace.times[4] - trace.times[3] == doctest::Approx(0.1));
    CHECK(*std::max_element(trace.times.begin(), trace.times.end()) == 6.0);

    const auto idle = CompartmentState::seir(10, 2, 3, 4);
    CHECK(run_bracketed(node, seir_model({}), idle, 5.0, 6.0) == idle);

    CHECK_THROWS_AS(run_bracketed(node, seir_model({}), idle, 6.0, 6.0), Error);
    ModelNode coord{9, NodeKind::Coordinator, "c", {}, {}};
    CHECK_THROWS_AS(run_bracketed(coord, seir_model({}), idle, 5.0, 6.0), Error);
}

TEST_CASE("bracketing holds for arbitrary intervals and step sizes")
{
    std::uint64_t x = 88172645463325252ULL;
    auto next = [&] {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        return static_cast<double>(x % 1000000) / 1e6;
    };
    for (int i = 0; i < 500; ++i) {
        const double t0 = std::floor(next() * 1000);
        const double t1 = t0 + 1.0 + std::floor(next() * 10);
        const double dt = 0.001 + next();
        IntegrationTrace trace;
        integrate(fleet_model({0.01, 0.01, 0.01}), CompartmentState::fleet(10, 0, 0), t0, t1, dt, &trace);
        CHECK(trace.times.back() == t1);
        for (std::size_t k = 1; k < trace.times.size(); ++k) {
            REQUIRE(trace.times[k] > trace.times[k - 1]);
            REQUIRE(trace.times[k] <= t1);
        }
    }
}

TEST_CASE("adapt_lod halves, doubles and clamps")
{
    auto node = continuous(2, 0.5, 0.125, 1.0);
    CHECK(adapt_lod(node, 0.2, 0.05) == 0.25);

    node.integrator->dt = 0.125;
    CHECK(adapt_lod(node, 0.2, 0.05) == 0.125);

    node.integrator->dt = 0.25;
    CHECK(adapt_lod(node, 0.01, 0.05) == 0.5);

    // Inside the hysteresis band nothing changes.
    CHECK(adapt_lod(node, 0.04, 0.05) == 0.5);

    node.integrator->dt = 1.0;
    CHECK(adapt_lod(node, -0.5, 0.05) == 1.0);

    CHECK(infected_growth(10, 12) == doctest::Approx(0.2));
    CHECK(infected_growth(0, 3) == doctest::Approx(3.0));
}

TEST_CASE("LoD never leaves its bounds")
{
    auto node = continuous(2, 0.25, 0.0625, 1.0);
    double g = 0.3;
    for (int i = 0; i < 1000; ++i) {
        g = std::fmod(g * 7.31 + 0.17, 0.2) - 0.05;
        adapt_lod(node, g, 0.05);
        REQUIRE(node.integrator->dt >= 0.0625);
        REQUIRE(node.integrator->dt <= 1.0);
    }
}

TEST_CASE("run_siblings_parallel is ordered by node id and worker-independent")
{
    const std::vector<NodeId> ids{7, 3, 5, 1};
    auto work = [](NodeId id) {
        // Enough arithmetic that threads interleave.
        double acc = static_cast<double>(id);
        for (int k = 0; k < 20000; ++k) {
            acc = std::sin(acc) + static_cast<double>(id);
        }
        return std::make_pair(id, acc);
    };
    const auto serial = run_siblings_parallel(ids, 1, work);
    REQUIRE(serial.size() == 4);
    CHECK(serial[0].first == 1);
    CHECK(serial[3].first == 7);
    for (std::size_t w : {2u, 3u, 8u}) {
        CHECK(run_siblings_parallel(ids, w, work) == serial);
    }
    const std::vector<NodeId> permuted{5, 1, 7, 3};
    CHECK(run_siblings_parallel(permuted, 3, work) == serial);

    const std::vector<NodeId> one{4};
    const auto single = run_siblings_parallel(one, 3, work);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == work(4));
}

TEST_CASE("a failing sibling aborts the step with its node id")
{
    const std::vector<NodeId> ids{1, 3, 5};
    auto work = [](NodeId id) -> double {
        if (id == 3) {
            return integrate(seir_model({1e300, 0, 0}), CompartmentState::seir(1e10, 0, 1e10, 0), 0, 1, 1)[0];
        }
        return 1.0;
    };
    for (std::size_t w : {1u, 3u}) {
        try {
            run_siblings_parallel(ids, w, work);
            FAIL("expected ChildFailure");
        } catch (const ChildFailure& e) {
            CHECK(e.node_id() == 3);
            CHECK(e.code() == Errc::ChildFailure);
        }
    }
    CHECK_THROWS_AS(run_siblings_parallel(ids, 0, work), Error);
}

TEST_CASE("SimClock derives time from the step counter")
{
    SimClock clock;
    CHECK(clock.now() == 0.0);
    for (int i = 0; i < 1000; ++i) {
        const double before = clock.now();
        clock.advance();
        REQUIRE(clock.now() > before);
    }
    CHECK(clock.now() == 1000.0);
    CHECK(clock.next() == 1001.0);
}
