#include "mlsim/error.hpp"
#include "mlsim/exchange.hpp"
#include "mlsim/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <array>
#include <cctype>
#include <iomanip>
#include <map>
#include <sstream>

namespace mlsim {

namespace {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Fixed-precision text for coordinates; tick labels use the shortest form.
std::string fmt(double v)
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
}

double nice_step(double range, int target_ticks)
{
    const double raw = range / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

std::string tick_label(double v)
{
    if (std::abs(v) < 1e-12) {
        return "0";
    }
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(6) << v;
    return s.str();
}

std::string render(const Chart& chart)
{
    constexpr double W = 720, H = 420, left = 70, right = 160, top = 40, bottom = 50;
    const double pw = W - left - right;
    const double ph = H - top - bottom;

    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                x0 = x1 = s.x[i];
                y1 = s.y[i];
                first = false;
            }
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y1 = std::max(y1, s.y[i]);
            y0 = std::min(y0, s.y[i]);
        }
    }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    const double ystep = nice_step(y1 - y0, 5);
    y1 = std::ceil(y1 / ystep) * ystep;
    const double xstep = nice_step(x1 - x0, 6);

    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o.imbue(std::locale::classic());
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(chart.title)
      << "</text>\n";

    for (double y = y0; y <= y1 + 1e-9 * ystep; y += ystep) {
        o << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << fmt(py(y)) << "\" y2=\""
          << fmt(py(y)) << "\" stroke=\"#e0e0e0\"/>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << fmt(py(y) + 4) << "\" text-anchor=\"end\">" << tick_label(y)
          << "</text>\n";
    }
    for (double x = std::ceil(x0 / xstep) * xstep; x <= x1 + 1e-9 * xstep; x += xstep) {
        o << "<line x1=\"" << fmt(px(x)) << "\" x2=\"" << fmt(px(x)) << "\" y1=\"" << top + ph << "\" y2=\""
          << top + ph + 5 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fmt(px(x)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
          << tick_label(x) << "</text>\n";
    }
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
      << escape_xml(chart.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << top + ph / 2 << ")\">" << escape_xml(chart.y_label) << "</text>\n";

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            o << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
        }
        o << "\"/>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        o << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::filesystem::path write_chart(const Chart& chart, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::IoError, "svg", path.string() + ": cannot open for writing");
    }
    out << render(chart);
    if (!out) {
        throw Error(Errc::IoError, "svg", path.string() + ": write failed");
    }
    return path;
}

std::size_t column(const OutputTable& t, const std::string& name)
{
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    if (it == t.columns.end()) {
        throw Error(Errc::ParseError, "svg", "CSV has no column '" + name + "'");
    }
    return static_cast<std::size_t>(it - t.columns.begin());
}

std::string file_safe(const std::string& s)
{
    std::string out;
    for (char c : s) {
        out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
    }
    return out;
}

} // namespace

std::vector<std::filesystem::path> emit_svg_plots(const std::filesystem::path& csv_path,
                                                  const std::filesystem::path& out_dir)
{
    const auto table = read_csv(csv_path);
    if (table.rows.empty()) {
        throw Error(Errc::EmptyData, "svg", csv_path.string() + " has no data rows");
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    const bool epidemic = std::find(table.columns.begin(), table.columns.end(), "S") != table.columns.end();
    if (epidemic) {
        // node id -> series per compartment, in first-seen order.
        std::map<std::uint64_t, std::string> labels;
        std::map<std::uint64_t, std::array<Series, 4>> per_node;
        const std::array<std::string, 4> names{"S", "E", "I", "R"};
        const std::array<std::size_t, 4> cols{column(table, "S"), column(table, "E"), column(table, "I"),
                                              column(table, "R")};
        for (const auto& row : table.rows) {
            labels[row.node_id] = row.label;
            auto& series = per_node[row.node_id];
            for (std::size_t k = 0; k < 4; ++k) {
                series[k].name = names[k];
                series[k].x.push_back(static_cast<double>(row.step));
                series[k].y.push_back(row.values[cols[k]]);
            }
        }
        Chart infected{"Infected individuals per city", "step", "infected", {}};
        for (const auto& [id, series] : per_node) {
            Series s = series[2];
            s.name = labels[id];
            infected.series.push_back(std::move(s));
        }
        written.push_back(write_chart(infected, out_dir / "infected_by_city.svg"));
        for (const auto& [id, series] : per_node) {
            Chart c{"SEIR compartments: " + labels[id], "step", "individuals", {series.begin(), series.end()}};
            written.push_back(write_chart(c, out_dir / ("seir_" + file_safe(labels[id]) + ".svg")));
        }
    } else {
        const auto total_col = column(table, "total_pollution");
        const std::array<std::size_t, 3> fleet_cols{column(table, "P"), column(table, "L"), column(table, "E")};
        Series total{"total pollution", {}, {}};
        std::array<Series, 3> fleet{Series{"petrol", {}, {}}, Series{"LPG", {}, {}}, Series{"electric", {}, {}}};
        for (const auto& row : table.rows) {
            const auto x = static_cast<double>(row.step);
            total.x.push_back(x);
            total.y.push_back(row.values[total_col]);
            for (std::size_t k = 0; k < 3; ++k) {
                fleet[k].x.push_back(x);
                fleet[k].y.push_back(row.values[fleet_cols[k]]);
            }
        }
        written.push_back(write_chart({"Total pollution", "step", "pollutant units", {total}},
                                      out_dir / "total_pollution.svg"));
        written.push_back(write_chart({"Fleet composition", "step", "vehicles", {fleet.begin(), fleet.end()}},
                                      out_dir / "fleet_composition.svg"));
    }
    return written;
}

} // namespace mlsim
