#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cylcm/error.hpp"
#include "cylcm/io.hpp"
#include "cylcm/rational_poly.hpp"

namespace cylcm {

/// Sections and keys a run may carry. Anything else is a schema violation.
inline const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"run", {"application", "eps", "grid", "format"}},
        {"tolerances", {"rtol", "atol", "eigen_tol"}},
        {"spectrum", {"family", "count", "beta", "slope"}},
        {"elasticity", {"b1", "lambda2", "b2", "w1"}},
        {"fkpp", {"beta", "lambda1", "rho2"}},
        {"water", {"rho", "omega", "h0", "c0"}},
        {"conjugate", {"eps_max"}},
        {"verify", {"inject_dyn_fault", "seed", "draws"}},
    };
    return s;
}

/// Applications that read each parameter section; run and tolerances are shared by all.
inline const std::map<std::string, std::set<std::string>>& section_users() {
    static const std::map<std::string, std::set<std::string>> s{
        {"spectrum", {"spectrum"}}, {"elasticity", {"elasticity"}},       {"fkpp", {"fkpp"}},
        {"water", {"waterwave", "conjugate"}}, {"conjugate", {"conjugate"}}, {"verify", {"verify"}},
    };
    return s;
}

inline const std::vector<std::string>& applications() {
    static const std::vector<std::string> a{"spectrum", "elasticity", "fkpp", "waterwave", "conjugate", "verify"};
    return a;
}

/// Flat, validated key-value view of one run: "section.key" -> text.
class RunConfig {
public:
    explicit RunConfig(std::string application) : app_(std::move(application)) {
        if (std::find(applications().begin(), applications().end(), app_) == applications().end())
            fail_config("unknown application '" + app_ + "'");
    }

    const std::string& application() const { return app_; }

    /// Merge an INI text; later values override earlier ones.
    void load_ini(const std::string& text, const std::string& origin) {
        boost::property_tree::ptree pt;
        std::istringstream is(text);
        try {
            boost::property_tree::read_ini(is, pt);
        } catch (const boost::property_tree::ini_parser_error& e) {
            fail_config(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
        }
        for (const auto& [section, body] : pt) {
            if (body.empty() && !body.data().empty())
                fail_config(origin + ": key '" + section + "' outside a section");
            for (const auto& [key, v] : body) set(section, key, v.data(), origin);
        }
    }

    void set(const std::string& section, const std::string& key, const std::string& value,
             const std::string& origin = "flag") {
        const auto& schema = config_schema();
        auto sec = schema.find(section);
        if (sec == schema.end()) fail_config(origin + ": unknown section [" + section + "]");
        if (!sec->second.count(key)) fail_config(origin + ": unknown key '" + key + "' in [" + section + "]");
        auto users = section_users().find(section);
        if (users != section_users().end() && !users->second.count(app_))
            fail_config(origin + ": section [" + section + "] does not apply to '" + app_ + "'");
        if (section == "run" && key == "application" && value != app_)
            fail_config(origin + ": config is for '" + value + "', not '" + app_ + "'");
        kv_[section + "." + key] = trim(value);
    }

    bool has(const std::string& k) const { return kv_.count(k) > 0; }

    std::string text(const std::string& k, const std::string& def) const {
        auto it = kv_.find(k);
        return it == kv_.end() ? def : it->second;
    }

    double real(const std::string& k, double def) const {
        auto it = kv_.find(k);
        if (it == kv_.end()) return def;
        return parse_real(it->second, k);
    }

    int integer(const std::string& k, int def) const {
        auto it = kv_.find(k);
        if (it == kv_.end()) return def;
        try {
            std::size_t pos = 0;
            int v = std::stoi(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail_config("'" + k + "' must be an integer, got '" + it->second + "'");
        }
    }

    /// Exact value when the text is p/q, an integer or a plain decimal.
    std::optional<Rational> rational(const std::string& k) const {
        auto it = kv_.find(k);
        if (it == kv_.end()) return std::nullopt;
        return parse_rational(it->second);
    }

    /// Comma-separated reals; present-but-empty yields an empty list.
    std::optional<std::vector<double>> list(const std::string& k) const {
        auto it = kv_.find(k);
        if (it == kv_.end()) return std::nullopt;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(parse_real(item, k));
        }
        return out;
    }

    /// One "section.key=value" line per entry in key order; input to the hash.
    std::string canonical() const {
        std::string s = "application=" + app_ + "\n";
        for (const auto& [k, v] : kv_) s += k + "=" + v + "\n";
        return s;
    }
    std::string hash() const { return hex64(fnv1a(canonical())); }

    Json to_json() const {
        Json j = Json::object();
        for (const auto& [k, v] : kv_) j[k] = v;
        return j;
    }

private:
    static std::string trim(const std::string& s) {
        auto a = s.find_first_not_of(" \t\r\n\"");
        if (a == std::string::npos) return "";
        auto b = s.find_last_not_of(" \t\r\n\"");
        return s.substr(a, b - a + 1);
    }

    static double parse_real(const std::string& s, const std::string& k) {
        if (s.find('/') != std::string::npos) return static_cast<double>(parse_rational(s));
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail_config("'" + k + "' must be a real number, got '" + s + "'");
        }
    }

    std::string app_;
    std::map<std::string, std::string> kv_;
};

}  // namespace cylcm
