#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace mlsim {

/// Purpose of a random stream. Every consumer of randomness draws from a
/// stream keyed by (master seed, domain, entity id) so that no two consumers
/// ever share or overlap a sequence.
enum class StreamDomain : std::uint8_t {
    AgentMove,
    CoordinatorAssign,
    VehicleMove,
    FleetAssign,
    Init,
};

std::string_view domain_tag(StreamDomain domain) noexcept;

/// Throws Error(UnknownDomainTag) for tags outside the fixed set.
StreamDomain parse_domain_tag(std::string_view tag);

struct StreamKey {
    std::uint64_t master_seed = 0;
    StreamDomain domain = StreamDomain::Init;
    std::uint64_t entity_id = 0;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// xoshiro256** generator whose initial state is an injective keyed hash of
/// its StreamKey. Distinct keys always start from distinct states.
///
/// Satisfies UniformRandomBitGenerator, but the engine only uses the
/// member helpers below: std distributions are implementation-defined and
/// would make outputs host-dependent.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(const StreamKey& key);

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() noexcept;

    /// Uniform in [0, bound). bound must be > 0.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept;

    /// k distinct indices drawn uniformly from [0, n), returned ascending.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    const StreamKey& key() const noexcept { return key_; }
    const std::array<std::uint64_t, 4>& state() const noexcept { return state_; }

    /// The state a freshly derived stream for `key` starts from.
    static std::array<std::uint64_t, 4> seed_state(const StreamKey& key) noexcept;

private:
    StreamKey key_;
    std::array<std::uint64_t, 4> state_;
};

RngStream derive_stream(std::uint64_t master_seed, std::string_view domain_tag, std::uint64_t entity_id);
RngStream derive_stream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t entity_id);

} // namespace mlsim
