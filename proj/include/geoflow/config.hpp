#pragma once

// Flat key-value configuration with sections:
//
//   # comment
//   [run]
//   count = 100000
//   t = 2 4 6 8
//
// Keys are addressed as "section.key". Every key must be consumed by the
// experiment that reads the file; leftovers are reported as unknown.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "geoflow/errors.hpp"

namespace geoflow {

/// Parse or validation failure, located at a line of the source when known.
class ConfigError : public Error {
public:
    ConfigError(const std::string& source, int line, const std::string& what)
        : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

inline const std::vector<std::string>& config_sections() {
    static const std::vector<std::string> s{"experiment", "curve", "run", "tolerances", "output"};
    return s;
}

class Config {
public:
    struct Entry {
        std::string value;
        int line = 0; ///< 0 for values set programmatically
        mutable bool used = false;
    };

    explicit Config(std::string source = "<config>") : source_(std::move(source)) {}

    static Config parse(std::string_view text, std::string source) {
        Config cfg(std::move(source));
        std::string section;
        int lineno = 0;
        std::istringstream in{std::string(text)};
        std::string raw;
        while (std::getline(in, raw)) {
            ++lineno;
            std::string line = strip_comment(raw);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ConfigError(cfg.source_, lineno, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                const auto& known = config_sections();
                if (std::find(known.begin(), known.end(), section) == known.end())
                    throw ConfigError(cfg.source_, lineno, "unknown section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(cfg.source_, lineno, "expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (section.empty()) throw ConfigError(cfg.source_, lineno, "key '" + key + "' outside any section");
            if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_") != std::string::npos)
                throw ConfigError(cfg.source_, lineno, "malformed key '" + key + "'");
            if (value.empty()) throw ConfigError(cfg.source_, lineno, section + "." + key + ": empty value");
            const std::string full = section + "." + key;
            if (auto it = cfg.entries_.find(full); it != cfg.entries_.end())
                throw ConfigError(cfg.source_, lineno,
                                  full + ": duplicate key (first set on line " + std::to_string(it->second.line) + ")");
            cfg.entries_[full] = Entry{value, lineno};
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError(path, 0, "cannot open config file");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    const std::string& source() const { return source_; }
    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    /// Overrides (or adds) a value, e.g. from the command line.
    void set(const std::string& key, std::string value) {
        auto& e = entries_[key];
        e.value = std::move(value);
        e.line = 0;
    }

    /// Error located at the line that set `key`.
    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        const auto it = entries_.find(key);
        throw ConfigError(source_, it == entries_.end() ? 0 : it->second.line, key + ": " + what);
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const Entry* e = find(key);
        return e ? e->value : fallback;
    }

    std::string require_string(const std::string& key) const {
        const Entry* e = find(key);
        if (!e) throw ConfigError(source_, 0, key + ": required key missing");
        return e->value;
    }

    std::vector<std::string> get_words(const std::string& key, const std::vector<std::string>& fallback) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        std::vector<std::string> out;
        std::istringstream in(e->value);
        for (std::string w; in >> w;) out.push_back(w);
        return out;
    }

    double get_real(const std::string& key, double fallback, double lo = -std::numeric_limits<double>::infinity(),
                    double hi = std::numeric_limits<double>::infinity()) const {
        const Entry* e = find(key);
        const double v = e ? parse_real(key, e->value) : fallback;
        check_range(key, v, lo, hi);
        return v;
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback,
                         std::int64_t lo = std::numeric_limits<std::int64_t>::min(),
                         std::int64_t hi = std::numeric_limits<std::int64_t>::max()) const {
        const Entry* e = find(key);
        const std::int64_t v = e ? parse_int(key, e->value) : fallback;
        if (v < lo || v > hi) fail(key, "value " + std::to_string(v) + " outside [" + bound(lo) + ", " + bound(hi) + "]");
        return v;
    }

    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        std::uint64_t v = 0;
        const auto& s = e->value;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) fail(key, "expected a nonnegative 64-bit integer, got '" + s + "'");
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        if (e->value == "true") return true;
        if (e->value == "false") return false;
        fail(key, "expected true or false, got '" + e->value + "'");
    }

    std::vector<double> get_reals(const std::string& key, const std::vector<double>& fallback,
                                  double lo = -std::numeric_limits<double>::infinity(),
                                  double hi = std::numeric_limits<double>::infinity()) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        std::vector<double> out;
        for (const auto& w : get_words(key, {})) {
            out.push_back(parse_real(key, w));
            check_range(key, out.back(), lo, hi);
        }
        return out;
    }

    std::vector<std::int64_t> get_ints(const std::string& key, const std::vector<std::int64_t>& fallback,
                                       std::int64_t lo = std::numeric_limits<std::int64_t>::min(),
                                       std::int64_t hi = std::numeric_limits<std::int64_t>::max()) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        std::vector<std::int64_t> out;
        for (const auto& w : get_words(key, {})) {
            out.push_back(parse_int(key, w));
            if (out.back() < lo || out.back() > hi)
                fail(key, "value " + w + " outside [" + bound(lo) + ", " + bound(hi) + "]");
        }
        return out;
    }

    /// First key (by line) that nothing has read.
    void reject_unused(const std::string& experiment) const {
        const std::pair<const std::string, Entry>* worst = nullptr;
        for (const auto& kv : entries_)
            if (!kv.second.used && (!worst || kv.second.line < worst->second.line)) worst = &kv;
        if (worst)
            throw ConfigError(source_, worst->second.line,
                              worst->first + ": unknown key for experiment '" + experiment + "'");
    }

private:
    const Entry* find(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    double parse_real(const std::string& key, const std::string& s) const {
        double v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
            fail(key, "expected a finite number, got '" + s + "'");
        return v;
    }

    std::int64_t parse_int(const std::string& key, const std::string& s) const {
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && p == s.data() + s.size()) return v;
        // Accept integral values written in exponent form, e.g. 1e5.
        double d = 0;
        const auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (ec2 == std::errc() && q == s.data() + s.size() && std::isfinite(d) && d == std::floor(d) &&
            std::abs(d) < 9.0e15)
            return static_cast<std::int64_t>(d);
        fail(key, "expected an integer, got '" + s + "'");
    }

    void check_range(const std::string& key, double v, double lo, double hi) const {
        if (v < lo || v > hi) {
            std::ostringstream m;
            m << "value " << v << " outside [" << lo << ", " << hi << "]";
            fail(key, m.str());
        }
    }

    static std::string bound(std::int64_t v) {
        if (v == std::numeric_limits<std::int64_t>::min()) return "-inf";
        if (v == std::numeric_limits<std::int64_t>::max()) return "inf";
        return std::to_string(v);
    }

    static std::string strip_comment(const std::string& s) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] == '#' && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) return s.substr(0, i);
        return s;
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::string source_;
    std::map<std::string, Entry> entries_;
};

} // namespace geoflow
