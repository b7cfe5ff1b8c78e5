#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace compkit {

// Strict key = value configuration files: one pair per line, '#' comments,
// unknown keys rejected so a typo in a grid key cannot silently produce an
// empty sweep.
class Config {
  public:
    static Config parse(const std::string& text) {
        Config cfg;
        std::istringstream ss(text);
        std::string line;
        int lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            if (cfg.values_.count(key))
                throw ConfigError("config key '" + key + "' given twice");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    // Verifies that every present key is known and every required key present.
    void check_schema(const std::set<std::string>& allowed,
                      const std::set<std::string>& required) const {
        for (const auto& [k, v] : values_)
            if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
        for (const auto& k : required)
            if (!values_.count(k)) throw ConfigError("missing required config key '" + k + "'");
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_real(const std::string& key) const {
        try {
            std::size_t pos = 0;
            double v = std::stod(get(key), &pos);
            if (pos != get(key).size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' is not a real number");
        }
    }

    long long get_int(const std::string& key) const {
        try {
            std::size_t pos = 0;
            long long v = std::stoll(get(key), &pos);
            if (pos != get(key).size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' is not an integer");
        }
    }

    // Comma-separated reals, or start:stop:step ranges (inclusive stop within
    // half a step).
    std::vector<double> get_reals(const std::string& key) const {
        return parse_reals(get(key), key);
    }

    static std::vector<double> parse_reals(const std::string& text, const std::string& key) {
        std::vector<double> out;
        auto colon = std::count(text.begin(), text.end(), ':');
        if (colon == 2) {
            double start, stop, step;
            char c1, c2;
            std::istringstream ss(text);
            if (!(ss >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
                throw ConfigError("config key '" + key + "': bad range, want start:stop:step");
            for (double v = start; v <= stop + step * 0.5; v += step) out.push_back(v);
            return out;
        }
        std::istringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                out.push_back(std::stod(trim(cell)));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "' has a non-numeric entry");
            }
        }
        if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
        return out;
    }

    // Semicolon-separated groups of comma-separated reals.
    std::vector<std::vector<double>> get_real_groups(const std::string& key) const {
        std::vector<std::vector<double>> out;
        std::istringstream ss(get(key));
        std::string group;
        while (std::getline(ss, group, ';')) out.push_back(parse_reals(trim(group), key));
        if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
        return out;
    }

    const std::map<std::string, std::string>& items() const { return values_; }

  private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

}  // namespace compkit
