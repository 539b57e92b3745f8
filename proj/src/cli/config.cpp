#include "soclimit/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "soclimit/errors.hpp"

namespace soclimit::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
    }
    return value;
}

}  // namespace

Config Config::parse(std::string_view text, std::string_view origin) {
    Config cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (line.empty() || line.front() == '#') continue;
        if (line.find('=') == std::string_view::npos) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                              ": expected key=value");
        }
        cfg.set_assignment(line);
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

void Config::set_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    }
    const auto key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + std::string(assignment) + "'");
    set(std::string(key), std::string(trim(assignment.substr(eq + 1))));
}

void Config::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

const std::string& Config::raw(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) {
    if (!has(key)) set(key, fallback);
    return raw(key);
}

double Config::get_double(const std::string& key) const {
    const double v = parse_number<double>(key, raw(key));
    if (!std::isfinite(v)) throw ConfigError("key '" + key + "' must be finite");
    return v;
}

double Config::get_double(const std::string& key, double fallback) {
    if (!has(key)) set(key, format_double(fallback));
    return get_double(key);
}

std::size_t Config::get_size(const std::string& key) const {
    return parse_number<std::size_t>(key, raw(key));
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) {
    if (!has(key)) set(key, std::to_string(fallback));
    return get_size(key);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) set(key, std::to_string(fallback));
    return parse_number<std::uint64_t>(key, raw(key));
}

void Config::require_known(const std::set<std::string>& known) const {
    for (const auto& [key, value] : entries_) {
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
}

std::string Config::to_text(const std::set<std::string>& omit) const {
    std::string out;
    for (const auto& [key, value] : entries_) {
        if (omit.count(key)) continue;
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

}  // namespace soclimit::cli
