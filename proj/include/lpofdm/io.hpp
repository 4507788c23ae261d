#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpofdm/harness.hpp"

namespace lpofdm {

/// Columns: detector,snr_db,bits,errors,ber,seconds. LF endings, '.'
/// decimal separator regardless of locale.
inline std::string format_csv(const std::vector<BerRecord>& records) {
    if (records.empty()) throw std::invalid_argument("write_csv: no records");
    std::string out = "detector,snr_db,bits,errors,ber,seconds\n";
    char line[256];
    for (const auto& r : records) {
        std::snprintf(line, sizeof(line), "%s,%.10g,%lld,%lld,%.9e,%.3f\n", r.detector.c_str(),
                      r.snr_db, r.bits, r.errors, r.ber, r.seconds);
        out += line;
    }
    return out;
}

inline void write_csv(const std::vector<BerRecord>& records, const std::string& path) {
    const std::string body = format_csv(records);  // validates before touching the file
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_csv: cannot open " + path);
    f << body;
    if (!f) throw std::runtime_error("write_csv: write failed for " + path);
}

inline std::vector<BerRecord> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "detector,snr_db,bits,errors,ber,seconds")
        throw std::runtime_error("parse_csv: bad header");
    std::vector<BerRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        BerRecord r;
        char name[64];
        if (std::sscanf(line.c_str(), "%63[^,],%lf,%lld,%lld,%lf,%lf", name, &r.snr_db, &r.bits,
                        &r.errors, &r.ber, &r.seconds) != 6)
            throw std::runtime_error("parse_csv: bad row '" + line + "'");
        r.detector = name;
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<BerRecord> read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_csv: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

struct ReferenceCurve {
    std::string detector;
    std::vector<std::pair<double, double>> points;  // (snr_db, ber)
};

/// Published BER coordinates of the system this simulator models; drawn as
/// an overlay for visual comparison.
inline const std::vector<ReferenceCurve>& reference_ber_curves() {
    static const std::vector<ReferenceCurve> curves = {
        {"coherent",
         {{0, 0.1269034}, {4, 0.0221382}, {8, 0.001557}, {12, 0.0000579}, {14, 0.0000111}}},
        {"p1", {{0, 0.359}, {4, 0.1865}, {8, 0.03572}, {12, 0.00246}, {17, 0.0000418}}},
        {"p2", {{0, 0.33518}, {4, 0.12656}, {8, 0.0162}, {12, 0.0009408}, {17, 0.000027}}},
        {"p3", {{0, 0.311}, {4, 0.0966}, {8, 0.0102121}, {12, 0.0005193}, {17, 0.0000084}}},
    };
    return curves;
}

inline std::string legend_label(const std::string& detector) {
    if (detector == "coherent") return "ideal coherent";
    if (detector.size() >= 2 && detector[0] == 'p') {
        const int p = std::stoi(detector.substr(1));
        const int states = 4 << (p - 1);
        return "P=" + detector.substr(1) + ",S_ST=" + std::to_string(states);
    }
    return detector;
}

namespace detail {

struct SvgScale {
    double x0, x1, ymin_exp, ymax_exp;
    double left = 70, right = 790, top = 30, bottom = 500;

    double x(double snr) const { return left + (snr - x0) / (x1 - x0) * (right - left); }
    double y(double ber) const {
        const double e = std::log10(ber);
        return bottom - (e - ymin_exp) / (ymax_exp - ymin_exp) * (bottom - top);
    }
};

inline const char* curve_color(const std::string& d) {
    if (d == "coherent") return "#000000";
    if (d == "p1") return "#c0392b";
    if (d == "p2") return "#2471a3";
    if (d == "p3") return "#1e8449";
    return "#7d3c98";
}

}  // namespace detail

/// BER-vs-SNR plot: log10 y axis, one polyline per detector, optional
/// published reference overlay (dashed).
inline void render_svg(const std::vector<BerRecord>& records, const std::string& path,
                       bool overlay_reference = false) {
    if (records.empty()) throw std::invalid_argument("render_svg: no records");

    std::map<std::string, std::vector<std::pair<double, double>>> curves;
    double xmin = 1e300, xmax = -1e300, bmin = 1.0, bmax = 1e-300;
    for (const auto& r : records) {
        xmin = std::min(xmin, r.snr_db);
        xmax = std::max(xmax, r.snr_db);
        if (r.ber > 0) {
            bmin = std::min(bmin, r.ber);
            bmax = std::max(bmax, r.ber);
            curves[r.detector].push_back({r.snr_db, r.ber});
        }
    }
    if (overlay_reference)
        for (const auto& c : reference_ber_curves())
            for (const auto& [s, b] : c.points) {
                xmin = std::min(xmin, s);
                xmax = std::max(xmax, s);
                bmin = std::min(bmin, b);
                bmax = std::max(bmax, b);
            }
    if (curves.empty()) throw std::runtime_error("render_svg: all records have zero BER");
    if (xmax <= xmin) xmax = xmin + 1.0;

    detail::SvgScale sc{xmin, xmax, std::floor(std::log10(bmin)), std::ceil(std::log10(bmax))};
    if (sc.ymax_exp <= sc.ymin_exp) sc.ymax_exp = sc.ymin_exp + 1;

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='820' height='560' "
           "font-family='sans-serif' font-size='13'>\n"
        << "<rect width='820' height='560' fill='white'/>\n";

    // decade gridlines and y labels
    for (int e = static_cast<int>(sc.ymin_exp); e <= static_cast<int>(sc.ymax_exp); ++e) {
        const double y = sc.y(std::pow(10.0, e));
        svg << "<line x1='" << sc.left << "' y1='" << y << "' x2='" << sc.right << "' y2='" << y
            << "' stroke='#dddddd'/>\n"
            << "<text x='" << sc.left - 8 << "' y='" << y + 4
            << "' text-anchor='end'>1e" << e << "</text>\n";
    }
    // x ticks at integer dB steps that land on data range
    const int step = (xmax - xmin) > 12 ? 4 : 2;
    for (int s = static_cast<int>(std::ceil(xmin)); s <= static_cast<int>(std::floor(xmax));
         ++s) {
        if (s % step != 0) continue;
        const double x = sc.x(s);
        svg << "<line x1='" << x << "' y1='" << sc.bottom << "' x2='" << x << "' y2='"
            << sc.bottom + 5 << "' stroke='black'/>\n"
            << "<text x='" << x << "' y='" << sc.bottom + 20 << "' text-anchor='middle'>" << s
            << "</text>\n";
    }
    svg << "<rect x='" << sc.left << "' y='" << sc.top << "' width='" << sc.right - sc.left
        << "' height='" << sc.bottom - sc.top << "' fill='none' stroke='black'/>\n"
        << "<text x='" << (sc.left + sc.right) / 2 << "' y='545' text-anchor='middle'>SNR per bit "
           "(dB)</text>\n"
        << "<text x='18' y='" << (sc.top + sc.bottom) / 2
        << "' text-anchor='middle' transform='rotate(-90 18 " << (sc.top + sc.bottom) / 2
        << ")'>BER</text>\n";

    auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* color,
                        bool dashed) {
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5'";
        if (dashed) svg << " stroke-dasharray='6 4'";
        svg << " points='";
        for (const auto& [s, b] : pts) svg << sc.x(s) << ',' << sc.y(b) << ' ';
        svg << "'/>\n";
        for (const auto& [s, b] : pts)
            svg << "<circle cx='" << sc.x(s) << "' cy='" << sc.y(b) << "' r='3' fill='" << color
                << "'/>\n";
    };

    double ly = sc.top + 14;
    for (auto& [det, pts] : curves) {
        std::sort(pts.begin(), pts.end());
        polyline(pts, detail::curve_color(det), false);
        svg << "<line x1='" << sc.right - 180 << "' y1='" << ly << "' x2='" << sc.right - 150
            << "' y2='" << ly << "' stroke='" << detail::curve_color(det)
            << "' stroke-width='1.5'/>\n"
            << "<text x='" << sc.right - 144 << "' y='" << ly + 4 << "'>" << legend_label(det)
            << "</text>\n";
        ly += 18;
    }
    if (overlay_reference) {
        for (const auto& c : reference_ber_curves())
            polyline(c.points, detail::curve_color(c.detector), true);
        svg << "<text x='" << sc.right - 180 << "' y='" << ly + 4
            << "'>dashed: published reference</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("render_svg: cannot open " + path);
    f << svg.str();
    if (!f) throw std::runtime_error("render_svg: write failed for " + path);
}

}  // namespace lpofdm
