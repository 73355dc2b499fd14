#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mlsim {

enum class ExchangeDirection { MicroToMacro, MacroToMicro };

std::string_view to_string(ExchangeDirection d) noexcept;

/// Data handed between a micro layer and a macro model at an interval
/// boundary. Map entries keep their insertion order.
struct ExchangeRecord {
    double time = 0.0;
    std::uint64_t node_id = 0;
    ExchangeDirection direction = ExchangeDirection::MicroToMacro;
    std::vector<std::pair<std::string, double>> compartments;
    std::vector<std::pair<std::string, double>> params;

    double compartment(std::string_view name) const;
    double param(std::string_view name) const;

    friend bool operator==(const ExchangeRecord&, const ExchangeRecord&) = default;
};

/// Canonical single-line JSON:
///   {"time":T,"node_id":N,"direction":"micro_to_macro","compartments":{...},"params":{...}}
/// Numbers use the shortest decimal form that round-trips exactly.
std::string serialize_exchange(const ExchangeRecord& record);

/// Throws ParseError(line, reason) on malformed input, unknown or missing
/// keys, and negative compartments.
ExchangeRecord parse_exchange(std::string_view text);

std::filesystem::path exchange_file_name(std::uint64_t node_id, std::int64_t step);

/// Writes `exchange_<node_id>_<step>.json` into `dir`. Fails with IoError if
/// the file already exists.
std::filesystem::path write_exchange(const ExchangeRecord& record, const std::filesystem::path& dir,
                                     std::int64_t step);

ExchangeRecord read_exchange(const std::filesystem::path& path);

/// Shortest round-trip decimal text for a finite double (locale independent).
std::string format_number(double value);

} // namespace mlsim
