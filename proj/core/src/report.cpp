#include "aoisim/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace aoisim {

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

void Summary::add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }

void Summary::add(const std::string& key, double value) { rows_.emplace_back(key, CsvTable::num(value)); }

void Summary::add(const std::string& key, std::int64_t value) {
    rows_.emplace_back(key, std::to_string(value));
}

void Summary::add_bool(const std::string& key, bool value) {
    rows_.emplace_back(key, value ? "true" : "false");
}

std::string Summary::to_string() const {
    std::string out;
    for (const auto& [k, v] : rows_) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("CSV row width mismatch");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvTable::num(std::int64_t v) { return std::to_string(v); }

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t k = 0; k < header_.size(); ++k) {
        if (k) out += ",";
        out += header_[k];
    }
    out += "\n";
    for (const auto& row : rows_) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ",";
            out += row[k];
        }
        out += "\n";
    }
    return out;
}

}  // namespace aoisim
