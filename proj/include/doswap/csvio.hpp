#pragma once

#include <string>
#include <vector>

#include "doswap/mat.hpp"

namespace doswap {

// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    Mat data;
};

// Headered CSV, one numeric row per line, written at full precision so that
// identical inputs produce byte-identical files.
void write_csv(const std::string& path, const std::vector<std::string>& header, const Mat& data);
CsvTable read_csv(const std::string& path);

}  // namespace doswap
