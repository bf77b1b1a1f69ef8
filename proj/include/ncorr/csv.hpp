#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "ncorr/errors.hpp"

namespace ncorr {

/// Minimal CSV writer: comma-separated, header row, full double precision.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path,
                       const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw DataError("cannot open for writing: " + path.string());
        out_ << std::setprecision(17);
        for (std::size_t i = 0; i < header.size(); ++i) {
            out_ << (i ? "," : "") << header[i];
        }
        out_ << "\n";
        columns_ = header.size();
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_)
            throw DataError("csv row width mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            out_ << (i ? "," : "") << values[i];
        }
        out_ << "\n";
    }

    /// Mixed row: already-formatted cells.
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_)
            throw DataError("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw DataError("csv column not found: " + name);
    }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

inline std::string format_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

} // namespace ncorr
