#pragma once

#include <concepts>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "soclimit/cli/config.hpp"

namespace soclimit::cli {

/// Comma-separated output with a fixed header; doubles in round-trip form.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

    template <class... Fields>
    void row(const Fields&... fields) {
        if (sizeof...(Fields) != columns_) throw std::logic_error("csv row has wrong field count");
        std::string line;
        bool first = true;
        ((append(line, first, field(fields))), ...);
        line += '\n';
        out_ << line;
        ++rows_;
    }

    std::size_t rows() const noexcept { return rows_; }
    void close();

private:
    static std::string field(double v) { return format_double(v); }
    static std::string field(bool v) { return v ? "true" : "false"; }
    static std::string field(std::string_view v) { return std::string(v); }
    static std::string field(const std::string& v) { return v; }
    static std::string field(const char* v) { return v; }
    template <std::integral I>
        requires(!std::same_as<I, bool>)
    static std::string field(I v) {
        return std::to_string(v);
    }

    void append(std::string& line, bool& first, const std::string& f) {
        if (!first) line += ',';
        first = false;
        line += f;
    }

    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

/// Parsed CSV: header plus rows of raw fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace soclimit::cli
