#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace mlsim {

enum class Status : std::uint8_t { S = 0, E = 1, I = 2, R = 3 };
enum class Occupation : std::uint8_t { Essential, Regular };

inline constexpr std::size_t kStatusCount = 4;

std::string_view to_string(Status s) noexcept;

using CityId = std::uint32_t;

struct Agent {
    std::uint64_t id = 0;
    CityId home_city = 0;
    CityId current_city = 0;
    Status status = Status::S;
    Occupation occupation = Occupation::Regular;

    friend bool operator==(const Agent&, const Agent&) = default;
};

/// Integer head count per status, indexed by Status.
using Census = std::array<std::int64_t, kStatusCount>;

} // namespace mlsim
