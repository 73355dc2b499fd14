#include "mlsim/output.hpp"

#include "mlsim/error.hpp"
#include "mlsim/exchange.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mlsim {

const std::vector<std::string>& epidemic_columns()
{
    static const std::vector<std::string> cols{"S", "E", "I", "R", "lockdown", "integrator_dt"};
    return cols;
}

const std::vector<std::string>& pollution_columns()
{
    static const std::vector<std::string> cols{"total_pollution", "P", "L", "E"};
    return cols;
}

std::string format_csv(const OutputTable& table)
{
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const auto& a = table.rows[i - 1];
        const auto& b = table.rows[i];
        if (!(a.step < b.step || (a.step == b.step && a.node_id < b.node_id))) {
            throw Error(Errc::ContractError, "csv",
                        "rows must be strictly ordered by (step, node_id); violated at row " + std::to_string(i));
        }
    }

    std::string out = "step,node_id,label";
    for (const auto& c : table.columns) {
        out += ',';
        out += c;
    }
    out += '\n';
    for (const auto& row : table.rows) {
        if (row.values.size() != table.columns.size()) {
            throw Error(Errc::ContractError, "csv", "row width does not match the header");
        }
        out += std::to_string(row.step);
        out += ',';
        out += std::to_string(row.node_id);
        out += ',';
        out += row.label;
        for (double v : row.values) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const OutputTable& table, const std::filesystem::path& path)
{
    const std::string text = format_csv(table);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::IoError, "csv", path.string() + ": cannot open for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error(Errc::IoError, "csv", path.string() + ": write failed");
    }
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

template <class T>
T parse_field(const std::string& s, std::size_t line)
{
    T value{};
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ParseError(line, "bad number '" + s + "'");
    }
    return value;
}

} // namespace

OutputTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::IoError, "csv", path.string() + ": cannot open");
    }
    OutputTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header");
    }
    auto header = split(line);
    if (header.size() < 3 || header[0] != "step" || header[1] != "node_id" || header[2] != "label") {
        throw ParseError(1, "header must start with step,node_id,label");
    }
    table.columns.assign(header.begin() + 3, header.end());

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto fields = split(line);
        if (fields.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields");
        }
        OutputRow row;
        row.step = parse_field<std::int64_t>(fields[0], line_no);
        row.node_id = parse_field<std::uint64_t>(fields[1], line_no);
        row.label = fields[2];
        for (std::size_t k = 3; k < fields.size(); ++k) {
            row.values.push_back(parse_field<double>(fields[k], line_no));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace mlsim
