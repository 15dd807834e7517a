#pragma once

#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "latfront/errors.hpp"

namespace latfront {

/// Formats a double with 17 significant digits (round-trips exactly).
inline std::string full_precision(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Minimal CSV writer. All numeric columns are emitted in full double
/// precision so reruns are byte-comparable.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& file, std::initializer_list<const char*> header)
        : path_(file) {
        f_ = std::fopen(file.string().c_str(), "wb");
        if (!f_) throw ConfigError("cannot open output file: " + file.string());
        bool first = true;
        for (const char* h : header) {
            if (!first) std::fputc(',', f_);
            std::fputs(h, f_);
            first = false;
        }
        std::fputc('\n', f_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) std::fputc(',', f_);
            std::fputs(full_precision(v).c_str(), f_);
            first = false;
        }
        std::fputc('\n', f_);
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::FILE* f_ = nullptr;
};

}  // namespace latfront
