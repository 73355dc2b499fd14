#include <doctest.h>

#include "mlsim/error.hpp"
#include "mlsim/rng.hpp"

#include <cmath>
#include <set>

using namespace mlsim;

TEST_CASE("derive_stream is a pure function of its key")
{
    auto a = derive_stream(42, "agent-move", 7);
    auto b = derive_stream(42, "agent-move", 7);
    for (int i = 0; i < 100; ++i) {
        CHECK(a() == b());
    }
}

TEST_CASE("neighbouring entity ids get different streams")
{
    const auto s7 = RngStream::seed_state({42, StreamDomain::AgentMove, 7});
    const auto s8 = RngStream::seed_state({42, StreamDomain::AgentMove, 8});
    CHECK(s7 != s8);
    CHECK(derive_stream(42, "agent-move", 7).state() == s7);

    auto a = derive_stream(42, "agent-move", 7);
    auto b = derive_stream(42, "agent-move", 8);
    CHECK(a() != b());
}

TEST_CASE("distinct keys never share an initial state")
{
    std::set<std::array<std::uint64_t, 4>> states;
    std::size_t keys = 0;
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, ~0ULL}) {
        for (auto tag : {"agent-move", "coordinator-assign", "vehicle-move", "fleet-assign", "init"}) {
            for (std::uint64_t id = 0; id < 200; ++id) {
                states.insert(derive_stream(seed, tag, id).state());
                ++keys;
            }
        }
    }
    CHECK(states.size() == keys);
}

TEST_CASE("unknown domain tag")
{
    CHECK_THROWS_AS(derive_stream(42, "foo", 1), Error);
    try {
        derive_stream(42, "foo", 1);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownDomainTag);
    }
}

TEST_CASE("uniform helpers stay in range and look uniform")
{
    auto rng = derive_stream(9, "init", 0);
    std::array<int, 10> bins{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        ++bins[static_cast<std::size_t>(rng.uniform_below(10))];
    }
    // Each bin expects 10000 with sd ~95; allow 5 sd.
    for (int b : bins) {
        CHECK(std::abs(b - n / 10) < 475);
    }
}

TEST_CASE("sample_without_replacement returns distinct sorted indices")
{
    auto rng = derive_stream(3, "init", 5);
    const auto s = rng.sample_without_replacement(50, 20);
    REQUIRE(s.size() == 20);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 20);
    CHECK(s.back() < 50);
    CHECK(rng.sample_without_replacement(5, 5) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(rng.sample_without_replacement(3, 4), Error);
}
