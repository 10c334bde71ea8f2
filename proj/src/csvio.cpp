#include "doswap/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace doswap {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Trim to the shortest representation that still round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(probe, "%lf", &back);
        if (back == v) return probe;
    }
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const Mat& data) {
    if (static_cast<int>(header.size()) != data.cols)
        throw InvalidInput("write_csv: header width disagrees with data");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (int r = 0; r < data.rows; ++r) {
        for (int c = 0; c < data.cols; ++c) {
            if (c) out << ',';
            out << format_double(data(r, c));
        }
        out << '\n';
    }
    if (!out) throw InvalidInput("write_csv: failed writing " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("read_csv: cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("read_csv: empty file " + path);
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) t.header.push_back(field);
    }
    std::vector<double> values;
    int rows = 0;
    const int cols = static_cast<int>(t.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) {
            // A zero-column table still records its row count as blank lines.
            if (cols == 0) ++rows;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        int c = 0;
        while (std::getline(ss, field, ',')) {
            values.push_back(std::stod(field));
            ++c;
        }
        if (c != cols) throw InvalidInput("read_csv: ragged row in " + path);
        ++rows;
    }
    t.data = Mat(rows, cols);
    t.data.a = std::move(values);
    return t;
}

}  // namespace doswap
