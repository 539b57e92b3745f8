#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace soclimit::cli {

/**
 * Flat key=value configuration.  Lines starting with '#' are comments.
 *
 * Typed getters with a default record the default, so after a command has
 * read its keys `entries()` is the fully resolved configuration.
 */
class Config {
public:
    static Config parse(std::string_view text, std::string_view origin = "<string>");
    static Config load(const std::filesystem::path& path);

    /// Parses "key=value" (as given to --set).
    void set_assignment(std::string_view assignment);
    void set(std::string key, std::string value);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback);
    std::size_t get_size(const std::string& key) const;
    std::size_t get_size(const std::string& key, std::size_t fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);

    /// Throws ConfigError naming the first key not in `known`.
    void require_known(const std::set<std::string>& known) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    /// Sorted key=value lines, excluding `omit`.
    std::string to_text(const std::set<std::string>& omit = {}) const;

private:
    const std::string& raw(const std::string& key) const;

    std::map<std::string, std::string> entries_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace soclimit::cli
