#include "mlsim/rng.hpp"

#include "mlsim/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mlsim {

namespace {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

constexpr std::array<StreamDomain, 5> kDomains = {
    StreamDomain::AgentMove, StreamDomain::CoordinatorAssign, StreamDomain::VehicleMove,
    StreamDomain::FleetAssign, StreamDomain::Init,
};

} // namespace

std::string_view domain_tag(StreamDomain domain) noexcept
{
    switch (domain) {
    case StreamDomain::AgentMove: return "agent-move";
    case StreamDomain::CoordinatorAssign: return "coordinator-assign";
    case StreamDomain::VehicleMove: return "vehicle-move";
    case StreamDomain::FleetAssign: return "fleet-assign";
    case StreamDomain::Init: return "init";
    }
    return "";
}

StreamDomain parse_domain_tag(std::string_view tag)
{
    for (auto d : kDomains) {
        if (domain_tag(d) == tag) {
            return d;
        }
    }
    throw Error(Errc::UnknownDomainTag, "core", "unknown stream domain tag '" + std::string(tag) + "'");
}

std::array<std::uint64_t, 4> RngStream::seed_state(const StreamKey& key) noexcept
{
    // Each word folds one more key component through a bijection, so the
    // words w0..w2 determine (seed, tag hash, id) uniquely. The id-dependent
    // words go first because the first output only reads s[1].
    const std::uint64_t w0 = mix64(key.master_seed);
    const std::uint64_t w1 = mix64(w0 ^ fnv1a64(domain_tag(key.domain)));
    const std::uint64_t w2 = mix64(w1 ^ key.entity_id);
    const std::uint64_t w3 = mix64(w2 + 0x9e3779b97f4a7c15ULL);
    return {w2, w3, w0, w1};
}

RngStream::RngStream(const StreamKey& key)
    : key_(key)
    , state_(seed_state(key))
{
}

RngStream::result_type RngStream::operator()() noexcept
{
    auto& s = state_;
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double RngStream::uniform01() noexcept
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) noexcept
{
    // Lemire's multiply-shift with rejection.
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>((*this)()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::vector<std::size_t> RngStream::sample_without_replacement(std::size_t n, std::size_t k)
{
    if (k > n) {
        throw Error(Errc::InvalidArgument, "core", "cannot sample " + std::to_string(k) + " of " + std::to_string(n));
    }
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

RngStream derive_stream(std::uint64_t master_seed, std::string_view tag, std::uint64_t entity_id)
{
    return RngStream(StreamKey{master_seed, parse_domain_tag(tag), entity_id});
}

RngStream derive_stream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t entity_id)
{
    return RngStream(StreamKey{master_seed, domain, entity_id});
}

} // namespace mlsim
