#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cylcm/error.hpp"
#include "cylcm/rational_poly.hpp"

namespace cylcm {

using Json = nlohmann::json;  // object keys are kept in a std::map, hence sorted

inline std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void dump_string(std::ostream& os, const std::string& s) { os << Json(s).dump(); }

inline void dump(std::ostream& os, const Json& j, int indent, int depth) {
    auto pad = [&](int d) { os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' '); };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) { os << "{}"; return; }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                pad(depth + 1);
                dump_string(os, it.key());
                os << ": ";
                dump(os, it.value(), indent, depth + 1);
            }
            pad(depth);
            os << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) { os << "[]"; return; }
            os << '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << ',';
                first = false;
                pad(depth + 1);
                dump(os, v, indent, depth + 1);
            }
            pad(depth);
            os << ']';
            return;
        }
        case Json::value_t::number_float: os << format_double(j.get<double>()); return;
        default: os << j.dump(); return;
    }
}

}  // namespace detail

/// JSON text with sorted keys and every float at 17 significant digits.
inline std::string to_json_text(const Json& j) {
    std::ostringstream os;
    detail::dump(os, j, 2, 0);
    os << '\n';
    return os.str();
}

/// Exact value as "p/q" next to its double.
inline Json exact_json(const Rational& r) {
    std::ostringstream os;
    os << r;
    return Json{{"exact", os.str()}, {"value", static_cast<double>(r)}};
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ------------------------------------------------------------------ CSV

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> r) {
        if (r.size() != header.size()) fail_pre("table row width does not match the header");
        rows.push_back(std::move(r));
    }

    std::string csv() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
            os << '\n';
        }
        return os.str();
    }
};

// ------------------------------------------------------------------ SVG

struct Polyline {
    std::vector<double> x, y;
    std::string stroke = "black";
    double width = 1.0;
};

/// Minimal plot: polylines mapped into a fixed viewport, no axes beyond a frame.
inline std::string svg_plot(const std::vector<Polyline>& lines, double x0, double x1, double y0, double y1,
                            const std::string& title = "") {
    const double W = 800, H = 400, m = 20;
    auto sx = [&](double x) { return m + (x - x0) / (x1 - x0) * (W - 2 * m); };
    auto sy = [&](double y) { return H - m - (y - y0) / (y1 - y0) * (H - 2 * m); };
    std::ostringstream os;
    char buf[64];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    if (!title.empty()) os << "<title>" << title << "</title>\n";
    os << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << W - 2 * m << "\" height=\"" << H - 2 * m
       << "\" fill=\"none\" stroke=\"gray\"/>\n";
    for (const auto& l : lines) {
        if (l.x.empty()) continue;
        os << "<path fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\"" << l.width << "\" d=\"";
        for (std::size_t i = 0; i < l.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%c%.3f %.3f ", i ? 'L' : 'M', sx(l.x[i]), sy(l.y[i]));
            os << buf;
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) fail_config("cannot write " + p.string());
    f << text;
}

}  // namespace cylcm
