#ifndef OPTODIMER_IO_HPP
#define OPTODIMER_IO_HPP

// CSV and SVG emission for observable trajectories.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "optodimer/errors.hpp"
#include "optodimer/observables.hpp"
#include "optodimer/scenario.hpp"

namespace optodimer {

inline constexpr const char* csv_header = "t_seconds,omega_b_t,n_a_raw,n_b_raw,n_a,n_b,re_g1,im_g1,norm_or_trace";

using CsvRow = std::array<double, 9>;

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline CsvRow csv_row(const ObservableRecord& r, double omega_b) {
    return {r.t, omega_b * r.t, r.n_a_raw, r.n_b_raw, r.n_a, r.n_b, r.g1.real(), r.g1.imag(), r.trace};
}

inline void ensure_parent_dir(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string csv_text(const ObservableTrajectory& traj) {
    std::string s = csv_header;
    s += '\n';
    for (const auto& r : traj.records) {
        const auto row = csv_row(r, traj.omega_b);
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) s += ',';
            s += format_double(row[i]);
        }
        s += '\n';
    }
    return s;
}

inline void write_csv(const ObservableTrajectory& traj, const std::filesystem::path& path) {
    if (traj.records.empty()) throw Error("write_csv: empty trajectory");
    write_text(path, csv_text(traj));
}

/// Reads a file written by write_csv (header checked).
inline std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw IoError("unexpected CSV header in " + path.string());
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        CsvRow row{};
        size_t start = 0;
        for (size_t i = 0; i < row.size(); ++i) {
            const auto end = i + 1 < row.size() ? line.find(',', start) : line.size();
            if (end == std::string::npos) throw IoError("short CSV row in " + path.string());
            const char* b = line.data() + start;
            const char* e = line.data() + end;
            const auto [ptr, ec] = std::from_chars(b, e, row[i]);
            if (ec != std::errc() || ptr != e) throw IoError("bad CSV value in " + path.string());
            start = end + 1;
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------- SVG

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

inline std::string fmt_short(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

}  // namespace detail

/// Overlay plot: blue for n_a (or Re g1), red for n_b (or Im g1); dashed for the
/// non-Hermitian engine, solid otherwise. x axis in omega_b t.
inline std::string svg_text(const std::vector<const ObservableTrajectory*>& trajs, PlotKind plot,
                            const std::string& title = "") {
    if (trajs.empty()) throw Error("write_svg: no trajectories");
    constexpr double W = 720, H = 440, left = 70, right = 20, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto series = [plot](const ObservableRecord& r, int which) {
        if (plot == PlotKind::Occupations) return which == 0 ? r.n_a : r.n_b;
        return which == 0 ? r.g1.real() : r.g1.imag();
    };
    for (const auto* tr : trajs)
        for (const auto& r : tr->records) {
            const double x = tr->omega_b * r.t;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            for (int k = 0; k < 2; ++k) {
                const double y = series(r, k);
                if (std::isfinite(y)) {
                    y0 = std::min(y0, y);
                    y1 = std::max(y1, y);
                }
            }
        }
    if (plot == PlotKind::Occupations) {
        y0 = std::min(y0, 0.0);
        y1 = std::max(y1, 1.0);
    }
    if (!std::isfinite(y0) || !std::isfinite(y1)) y0 = 0.0, y1 = 1.0;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    if (!(x1 > x0)) x1 = x0 + 1.0;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << ' ' << H << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
       << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0;
        const double yv = y0 + (y1 - y0) * i / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
           << detail::fmt_short(xv) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
           << detail::fmt_short(yv) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 18
       << "\" font-size=\"13\" text-anchor=\"middle\">ω_b t</text>\n";
    os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << top + ph / 2 << ")\">" << (plot == PlotKind::Occupations ? "n_a, n_b" : "Re g1, Im g1") << "</text>\n";
    if (!title.empty())
        os << "<text x=\"" << W / 2 << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">"
           << detail::xml_escape(title) << "</text>\n";

    for (const auto* tr : trajs) {
        const bool dashed = tr->engine == Engine::NonHermitian;
        for (int k = 0; k < 2; ++k) {
            // NaN samples split the curve into separate polylines.
            std::vector<std::string> pieces;
            std::string current;
            for (const auto& r : tr->records) {
                const double y = series(r, k);
                if (!std::isfinite(y)) {
                    if (!current.empty()) pieces.push_back(std::move(current));
                    current.clear();
                    continue;
                }
                if (!current.empty()) current += ' ';
                current += detail::fmt_short(px(tr->omega_b * r.t)) + ',' + detail::fmt_short(py(y));
            }
            if (!current.empty()) pieces.push_back(std::move(current));
            for (const auto& pts : pieces) {
                os << "<polyline fill=\"none\" stroke=\"" << (k == 0 ? "blue" : "red") << "\" stroke-width=\"1.5\"";
                if (dashed) os << " stroke-dasharray=\"6,4\"";
                os << " data-engine=\"" << to_string(tr->engine) << "\" points=\"" << pts << "\"/>\n";
            }
        }
    }
    os << "</svg>\n";
    return os.str();
}

inline void write_svg(const std::vector<const ObservableTrajectory*>& trajs, const std::filesystem::path& path,
                      PlotKind plot = PlotKind::Occupations, const std::string& title = "") {
    write_text(path, svg_text(trajs, plot, title));
}

}  // namespace optodimer

#endif
