#include <doctest.h>

#include "mlsim/error.hpp"
#include "mlsim/ode.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace mlsim;

TEST_CASE("SEIR derivative by direct substitution")
{
    const auto d = seir_derivative(CompartmentState::seir(990, 0, 10, 0), {0.0003, 0.2, 0.1});
    REQUIRE(d.size() == 4);
    CHECK(d[0] == doctest::Approx(-2.97).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(2.97).epsilon(1e-12));
    CHECK(d[2] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(d[3] == doctest::Approx(1.0).epsilon(1e-12));

    const auto zero_beta = seir_derivative(CompartmentState::seir(500, 20, 30, 1), {0.0, 0.2, 0.1});
    CHECK(zero_beta[0] == 0.0);
}

TEST_CASE("fleet derivative by direct substitution")
{
    const auto idle = fleet_derivative(CompartmentState::fleet(100, 0, 0), {0, 0, 0});
    CHECK(idle == std::vector<double>{0, 0, 0});

    const auto d = fleet_derivative(CompartmentState::fleet(100, 50, 0), {0.1, 0.05, 0.2});
    CHECK(d[0] == doctest::Approx(-15.0));
    CHECK(d[1] == doctest::Approx(0.0));
    CHECK(d[2] == doctest::Approx(15.0));
}

TEST_CASE("derivatives sum to zero")
{
    auto rng_state = 12345.0;
    auto next = [&] {
        rng_state = std::fmod(rng_state * 16807.0, 2147483647.0);
        return rng_state / 2147483647.0;
    };
    for (int i = 0; i < 1000; ++i) {
        const auto s = CompartmentState::seir(1000 * next(), 100 * next(), 100 * next(), 500 * next());
        const auto d = seir_derivative(s, {0.001 * next(), next(), next()});
        CHECK(std::abs(d[0] + d[1] + d[2] + d[3]) <= 1e-12 * (1 + std::abs(d[0]) + std::abs(d[1])));

        const auto f = CompartmentState::fleet(1000 * next(), 100 * next(), 100 * next());
        const auto df = fleet_derivative(f, {next(), next(), next()});
        CHECK(std::abs(df[0] + df[1] + df[2]) <= 1e-12 * (1 + std::abs(df[0])));
    }
}

TEST_CASE("wrong labels are rejected")
{
    CHECK_THROWS_AS(seir_derivative(CompartmentState::fleet(1, 2, 3), {}), Error);
    CHECK_THROWS_AS(fleet_derivative(CompartmentState::seir(1, 2, 3, 4), {}), Error);
    CHECK_THROWS_AS(integrate(seir_model({}), CompartmentState::fleet(1, 2, 3), 0, 1, 0.1), Error);
}

TEST_CASE("fleet RK4 matches the closed form")
{
    const FleetParams p{0.05, 0.05, 0.1};
    const auto out = integrate(fleet_model(p), CompartmentState::fleet(100, 0, 0), 0, 10, 0.01);
    const double exact_p = oracle::fleet_petrol(100, 0.05, 0.05, 10);
    CHECK(exact_p == doctest::Approx(36.787944117144235).epsilon(1e-15));
    CHECK(std::abs(out[0] - exact_p) / exact_p < 1e-6);
    // beta+sigma == gamma here, so L(t) = beta*P0*t*exp(-gamma t).
    const double exact_l = 0.05 * 100 * 10 * std::exp(-1.0);
    CHECK(std::abs(out[1] - exact_l) / exact_l < 1e-6);
}

TEST_CASE("fleet RK4 shows fourth-order convergence")
{
    const FleetParams p{0.3, 0.2, 0.4};
    const double exact = oracle::fleet_lpg(100, 20, 0.3, 0.2, 0.4, 10);
    auto err = [&](double dt) {
        const auto out = integrate(fleet_model(p), CompartmentState::fleet(100, 20, 0), 0, 10, dt);
        return std::abs(out[1] - exact);
    };
    const double e1 = err(0.5);
    const double e2 = err(0.25);
    CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("SEIR RK4 agrees with a fine Euler oracle")
{
    const auto out = integrate(seir_model({0.0003, 0.2, 0.1}), CompartmentState::seir(990, 0, 10, 0), 0, 30, 0.01);
    const auto euler = oracle::seir_euler({990, 0, 10, 0}, 0.0003, 0.2, 0.1, 30, 1e-5);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(out[k] - euler[k]) / euler[k] < 1e-4);
        CHECK(std::abs(out[k] - oracle::kSeirT30[k]) / oracle::kSeirT30[k] < 1e-8);
    }
}

TEST_CASE("zero rates leave the state unchanged")
{
    const auto s = CompartmentState::seir(990, 3, 7, 0);
    CHECK(integrate(seir_model({}), s, 0, 5, 0.3) == s);
    const auto f = CompartmentState::fleet(10, 20, 30);
    CHECK(integrate(fleet_model({}), f, 2, 3, 0.25) == f);
}

TEST_CASE("integration lands exactly on t1")
{
    IntegrationTrace trace;
    integrate(seir_model({0.0003, 0.2, 0.1}), CompartmentState::seir(990, 0, 10, 0), 5.0, 6.0, 0.3, &trace);
    REQUIRE(trace.times.size() == 5);
    CHECK(trace.times.front() == 5.0);
    CHECK(trace.times.back() == 6.0);
    CHECK(trace.times[3] == doctest::Approx(5.9));
    for (double t : trace.times) {
        CHECK(t <= 6.0);
    }

    trace.times.clear();
    integrate(seir_model({0.0003, 0.2, 0.1}), CompartmentState::seir(990, 0, 10, 0), 5.0, 6.0, 0.25, &trace);
    CHECK(trace.times == std::vector<double>{5.0, 5.25, 5.5, 5.75, 6.0});
}

TEST_CASE("conservation and monotonicity along trajectories")
{
    const auto seir = seir_model({0.0005, 0.3, 0.1});
    auto s = CompartmentState::seir(995, 0, 5, 0);
    const double total = s.total();
    for (int k = 0; k < 200; ++k) {
        const auto next = integrate(seir, s, k, k + 1, 0.1);
        CHECK(next[0] <= s[0]);
        CHECK(next[3] >= s[3]);
        s = next;
    }
    CHECK(std::abs(s.total() - total) <= 1e-9 * total);

    const auto fleet = fleet_model({0.01, 0.02, 0.03});
    auto f = CompartmentState::fleet(500, 10, 0);
    for (int k = 0; k < 100; ++k) {
        const auto next = integrate(fleet, f, k, k + 1, 0.25);
        CHECK(next[0] <= f[0]);
        CHECK(next[2] >= f[2]);
        f = next;
    }
    CHECK(std::abs(f.total() - 510) <= 1e-9 * 510);
}

TEST_CASE("blowups are reported")
{
    // A huge step with a huge rate overshoots far below zero.
    CHECK_THROWS_AS(integrate(fleet_model({50, 0, 0}), CompartmentState::fleet(100, 0, 0), 0, 1, 1), Error);
    try {
        integrate(fleet_model({50, 0, 0}), CompartmentState::fleet(100, 0, 0), 0, 1, 1);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NegativeStateBlowup);
    }
    try {
        integrate(seir_model({1e300, 0, 0}), CompartmentState::seir(1e10, 0, 1e10, 0), 0, 1, 1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK((e.code() == Errc::NonFiniteState || e.code() == Errc::NegativeStateBlowup));
    }
    CHECK_THROWS_AS(integrate(seir_model({}), CompartmentState::seir(1, 0, 0, 0), 1, 1, 0.1), Error);
}
