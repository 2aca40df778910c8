#ifndef CONJSCAN_CONFIG_HPP
#define CONJSCAN_CONFIG_HPP

#include "conjscan/errors.hpp"
#include "conjscan/problem.hpp"
#include "conjscan/scan.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace conjscan {

/// Line-oriented "key = value" file with [section] headers. Comments start
/// with '#' or ';'. Unknown sections, unknown keys, and duplicate keys are
/// rejected.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::config_error, "cannot open config file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_text(ss.str(), path);
    }

    static ConfigFile parse_text(const std::string& text, const std::string& origin = "<text>") {
        ConfigFile cfg;
        cfg.origin_ = origin;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto cut = line.find_first_of("#;");
            if (cut != std::string::npos) line.erase(cut);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw Error(ErrorCode::config_error,
                                origin + ":" + std::to_string(lineno) + ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                cfg.values_.try_emplace(section);
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::config_error,
                            origin + ":" + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (section.empty())
                throw Error(ErrorCode::config_error,
                            origin + ":" + std::to_string(lineno) + ": key outside any section");
            auto& sec = cfg.values_[section];
            if (sec.count(key))
                throw Error(ErrorCode::config_error,
                            origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            sec[key] = value;
        }
        return cfg;
    }

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        auto s = values_.find(section);
        if (s == values_.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    }

    double get_real(const std::string& section, const std::string& key, double fallback) const {
        auto v = get(section, key);
        if (!v) return fallback;
        return to_real(*v, section + "." + key);
    }

    int get_int(const std::string& section, const std::string& key, int fallback) const {
        auto v = get(section, key);
        if (!v) return fallback;
        try {
            size_t used = 0;
            int out = std::stoi(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing");
            return out;
        } catch (const std::exception&) {
            throw Error(ErrorCode::config_error,
                        "value of " + section + "." + key + " is not an integer: " + *v);
        }
    }

    /// Every (section, key) must appear in the schema.
    void reject_unknown(const std::map<std::string, std::vector<std::string>>& schema) const {
        for (const auto& [section, keys] : values_) {
            auto s = schema.find(section);
            if (s == schema.end())
                throw Error(ErrorCode::config_error,
                            origin_ + ": unknown section [" + section + "]");
            for (const auto& [key, value] : keys) {
                bool known = false;
                for (const auto& k : s->second) known = known || k == key;
                if (!known)
                    throw Error(ErrorCode::config_error, origin_ + ": unknown key '" + key +
                                                             "' in section [" + section + "]");
            }
        }
    }

    static double to_real(const std::string& text, const std::string& what) {
        try {
            size_t used = 0;
            double out = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument("trailing");
            return out;
        } catch (const std::exception&) {
            throw Error(ErrorCode::config_error, "value of " + what + " is not a number: " + text);
        }
    }

    static std::vector<double> to_real_list(const std::string& text, const std::string& what) {
        std::vector<double> out;
        std::string item;
        std::istringstream in(replace_commas(text));
        while (in >> item) out.push_back(to_real(item, what));
        return out;
    }

    static std::vector<int> to_int_list(const std::string& text, const std::string& what) {
        std::vector<int> out;
        for (double v : to_real_list(text, what)) {
            int i = static_cast<int>(v);
            if (static_cast<double>(i) != v)
                throw Error(ErrorCode::config_error, what + " must contain integers");
            out.push_back(i);
        }
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }
    static std::string replace_commas(std::string s) {
        for (char& c : s)
            if (c == ',') c = ' ';
        return s;
    }

    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> values_;
};

inline const std::map<std::string, std::vector<std::string>>& config_schema() {
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"problem", {"kind", "dimension"}},
        {"coefficients", {"a", "f", "a_table", "f_table", "a_smoothness", "f_smoothness"}},
        {"nonlinearity", {"g", "alpha"}},
        {"modes", {"nu_max", "nu_list"}},
        {"scan", {"n", "samples", "refine_tol", "tau", "r_min"}},
        {"bifurcate", {"s_schedule"}},
        {"matrix_lab", {"seed", "dims", "paths", "samples"}},
    };
    return schema;
}

namespace detail {

inline Smoothness smoothness_from(const std::optional<std::string>& text, Smoothness fallback) {
    if (!text) return fallback;
    if (*text == "C0") return Smoothness::c0;
    if (*text == "C1") return Smoothness::c1;
    if (*text == "Cinf") return Smoothness::c_inf;
    throw Error(ErrorCode::config_error, "smoothness must be one of C0, C1, Cinf");
}

inline CoefficientField coefficient_from(const ConfigFile& cfg, const std::string& name) {
    auto expr = cfg.get("coefficients", name);
    auto table = cfg.get("coefficients", name + "_table");
    auto smooth = cfg.get("coefficients", name + "_smoothness");
    if (expr && table)
        throw Error(ErrorCode::config_error,
                    "coefficient '" + name + "' given both as expression and table");
    if (expr)
        return CoefficientField::closed_form(*expr,
                                             smoothness_from(smooth, Smoothness::c_inf));
    if (table)
        return CoefficientField::tabulated(
            ConfigFile::to_real_list(*table, "coefficients." + name + "_table"),
            smoothness_from(smooth, Smoothness::c1));
    throw Error(ErrorCode::config_error, "missing coefficient '" + name + "'");
}

} // namespace detail

/// Builds the problem described by [problem] / [coefficients] /
/// [nonlinearity] / [modes].
inline Problem problem_from_config(const ConfigFile& cfg) {
    cfg.reject_unknown(config_schema());
    auto kind = cfg.get("problem", "kind");
    if (!kind) throw Error(ErrorCode::config_error, "missing problem.kind");
    CoefficientField a = detail::coefficient_from(cfg, "a");
    CoefficientField f = detail::coefficient_from(cfg, "f");
    if (*kind == "interval") {
        Interval1DProblem p{std::move(a), std::move(f), std::nullopt};
        if (auto g = cfg.get("nonlinearity", "g"))
            p.g = Nonlinearity::parse(*g, cfg.get_real("nonlinearity", "alpha", 1.0));
        return p;
    }
    if (*kind == "radial") {
        RadialProblem p;
        p.dimension = cfg.get_int("problem", "dimension", 2);
        p.a = std::move(a);
        p.f = std::move(f);
        if (auto list = cfg.get("modes", "nu_list")) {
            for (int nu : ConfigFile::to_int_list(*list, "modes.nu_list"))
                p.modes.push_back(AngularMode{nu});
        } else {
            int nu_max = cfg.get_int("modes", "nu_max", 2);
            for (int nu = 0; nu <= nu_max; ++nu) p.modes.push_back(AngularMode{nu});
        }
        if (cfg.get("nonlinearity", "g"))
            throw Error(ErrorCode::config_error,
                        "radial problems are scanned linearly; nonlinearity not supported");
        return p;
    }
    throw Error(ErrorCode::config_error, "problem.kind must be 'interval' or 'radial'");
}

/// Scan parameters from [scan]; CLI flags override these.
inline ScanParams scan_params_from_config(const ConfigFile& cfg, ScanParams defaults = {}) {
    ScanParams p = defaults;
    p.r_samples = cfg.get_int("scan", "samples", defaults.r_samples);
    p.refine_tol = cfg.get_real("scan", "refine_tol", defaults.refine_tol);
    p.kernel_tau = cfg.get_real("scan", "tau", defaults.kernel_tau);
    p.r_min = cfg.get_real("scan", "r_min", defaults.r_min);
    return p;
}

} // namespace conjscan

#endif
