#pragma once

#include <string>
#include <utility>
#include <vector>

namespace aoisim {

/// Writes `content` to `path` atomically (write to a sibling temp file, then
/// rename), so partial runs never masquerade as complete outputs.
void atomic_write(const std::string& path, const std::string& content);

/// key = value report accumulator with stable ordering.
class Summary {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, std::int64_t value);
    void add_bool(const std::string& key, bool value);  // "true"/"false"
    std::string to_string() const;

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

/// Minimal CSV accumulator; numeric cells are rendered with %.17g so outputs
/// are byte-stable across identical runs.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    static std::string num(double v);
    static std::string num(std::int64_t v);
    std::string to_string() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace aoisim
