#pragma once

#include <string>
#include <vector>

namespace ghzclock::cli {

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(std::vector<std::string> row);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string fmt(double v);
std::string fmt(long long v);

// Writes through a sibling temp file and rename; empty path writes to stdout.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace ghzclock::cli
