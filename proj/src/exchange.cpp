#include "mlsim/exchange.hpp"

#include "mlsim/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace mlsim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::size_t line_at(std::string_view text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::size_t line_of(std::string_view text, std::string_view needle)
{
    const auto pos = text.find(needle);
    return pos == std::string_view::npos ? 1 : line_at(text, pos);
}

std::string json_quoted(std::string_view s)
{
    return nlohmann::json(std::string(s)).dump();
}

void append_map(std::string& out, const std::vector<std::pair<std::string, double>>& entries)
{
    out += '{';
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) out += ',';
        out += json_quoted(entries[i].first);
        out += ':';
        out += format_number(entries[i].second);
    }
    out += '}';
}

double read_number(std::string_view text, const ordered_json& v, const std::string& key)
{
    if (!v.is_number()) {
        throw ParseError(line_of(text, json_quoted(key)), "'" + key + "' must be a number");
    }
    return v.get<double>();
}

std::vector<std::pair<std::string, double>> read_map(std::string_view text, const ordered_json& v,
                                                     const std::string& key, bool nonnegative)
{
    if (!v.is_object()) {
        throw ParseError(line_of(text, json_quoted(key)), "'" + key + "' must be an object");
    }
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [name, value] : v.items()) {
        const double x = read_number(text, value, name);
        if (nonnegative && x < 0.0) {
            throw ParseError(line_of(text, json_quoted(name)), "compartment '" + name + "' is negative");
        }
        out.emplace_back(name, x);
    }
    return out;
}

} // namespace

std::string_view to_string(ExchangeDirection d) noexcept
{
    return d == ExchangeDirection::MicroToMacro ? "micro_to_macro" : "macro_to_micro";
}

double ExchangeRecord::compartment(std::string_view name) const
{
    for (const auto& [k, v] : compartments) {
        if (k == name) return v;
    }
    throw Error(Errc::ContractError, "exchange", "record has no compartment '" + std::string(name) + "'");
}

double ExchangeRecord::param(std::string_view name) const
{
    for (const auto& [k, v] : params) {
        if (k == name) return v;
    }
    throw Error(Errc::ContractError, "exchange", "record has no param '" + std::string(name) + "'");
}

std::string format_number(double value)
{
    if (!std::isfinite(value)) {
        throw Error(Errc::ContractError, "exchange", "cannot format a non-finite number");
    }
    if (value == 0.0) {
        value = 0.0; // drop the sign of -0
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string serialize_exchange(const ExchangeRecord& r)
{
    std::string out = "{\"time\":";
    out += format_number(r.time);
    out += ",\"node_id\":";
    out += std::to_string(r.node_id);
    out += ",\"direction\":";
    out += json_quoted(to_string(r.direction));
    out += ",\"compartments\":";
    append_map(out, r.compartments);
    out += ",\"params\":";
    append_map(out, r.params);
    out += "}\n";
    return out;
}

ExchangeRecord parse_exchange(std::string_view text)
{
    ordered_json doc;
    try {
        doc = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_at(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
    }
    if (!doc.is_object()) {
        throw ParseError(1, "record must be a JSON object");
    }

    ExchangeRecord r;
    bool seen[5] = {};
    for (const auto& [key, value] : doc.items()) {
        if (key == "time") {
            r.time = read_number(text, value, key);
            seen[0] = true;
        } else if (key == "node_id") {
            if (!value.is_number_unsigned()) {
                throw ParseError(line_of(text, "\"node_id\""), "'node_id' must be a nonnegative integer");
            }
            r.node_id = value.get<std::uint64_t>();
            seen[1] = true;
        } else if (key == "direction") {
            const auto s = value.is_string() ? value.get<std::string>() : std::string();
            if (s == "micro_to_macro") {
                r.direction = ExchangeDirection::MicroToMacro;
            } else if (s == "macro_to_micro") {
                r.direction = ExchangeDirection::MacroToMicro;
            } else {
                throw ParseError(line_of(text, "\"direction\""), "unknown direction");
            }
            seen[2] = true;
        } else if (key == "compartments") {
            r.compartments = read_map(text, value, key, true);
            seen[3] = true;
        } else if (key == "params") {
            r.params = read_map(text, value, key, false);
            seen[4] = true;
        } else {
            throw ParseError(line_of(text, json_quoted(key)), "unknown key '" + key + "'");
        }
    }
    // params may be omitted; it then reads as an empty map.
    static constexpr const char* names[] = {"time", "node_id", "direction", "compartments"};
    for (int i = 0; i < 4; ++i) {
        if (!seen[i]) {
            throw ParseError(1, std::string("missing key '") + names[i] + "'");
        }
    }
    return r;
}

std::filesystem::path exchange_file_name(std::uint64_t node_id, std::int64_t step)
{
    return "exchange_" + std::to_string(node_id) + "_" + std::to_string(step) + ".json";
}

std::filesystem::path write_exchange(const ExchangeRecord& record, const std::filesystem::path& dir,
                                     std::int64_t step)
{
    const auto path = dir / exchange_file_name(record.node_id, step);
    const std::string text = serialize_exchange(record);

    // "x": exclusive create, fails if the file exists.
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wx"), &std::fclose);
    if (!f) {
        const char* why = std::filesystem::exists(path) ? "file exists" : "cannot create file";
        throw Error(Errc::IoError, "exchange", path.string() + ": " + why);
    }
    if (std::fwrite(text.data(), 1, text.size(), f.get()) != text.size()) {
        throw Error(Errc::IoError, "exchange", path.string() + ": write failed");
    }
    return path;
}

ExchangeRecord read_exchange(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "exchange", path.string() + ": cannot open");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_exchange(buf.str());
}

} // namespace mlsim
