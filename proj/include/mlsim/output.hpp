#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mlsim {

/// One CSV line: a (step, node) pair with its label and metric values.
struct OutputRow {
    std::int64_t step = 0;
    std::uint64_t node_id = 0;
    std::string label;
    std::vector<double> values;

    friend bool operator==(const OutputRow&, const OutputRow&) = default;
};

/// Rows plus the names of their value columns. The CSV header is
/// `step,node_id,label,<columns...>`.
struct OutputTable {
    std::vector<std::string> columns;
    std::vector<OutputRow> rows;

    friend bool operator==(const OutputTable&, const OutputTable&) = default;
};

/// Column layouts of the two scenarios.
const std::vector<std::string>& epidemic_columns();
const std::vector<std::string>& pollution_columns();

/// Writes the table with locale-independent shortest number formatting.
/// Throws ContractError unless rows are strictly ordered by (step, node_id),
/// IoError if the file cannot be written.
void write_csv(const OutputTable& table, const std::filesystem::path& path);

std::string format_csv(const OutputTable& table);

/// Reads a file written by write_csv. Throws IoError or ParseError.
OutputTable read_csv(const std::filesystem::path& path);

/// Renders line charts for a run CSV into out_dir and returns their paths.
/// Epidemic: infected per city plus one S/E/I/R chart per city. Pollution:
/// total pollution and fleet composition. Throws EmptyData for header-only
/// input.
std::vector<std::filesystem::path> emit_svg_plots(const std::filesystem::path& csv_path,
                                                  const std::filesystem::path& out_dir);

} // namespace mlsim
