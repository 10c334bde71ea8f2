#pragma once

#include <span>
#include <vector>

#include "doswap/common.hpp"

namespace doswap {

// Grid search options. clump_factor bounds the number of candidate cut
// positions per axis (clump_factor * max_bins); parallel toggles the OpenMP
// lane, whose output is bit-identical to the serial one.
struct MicOptions {
    double clump_factor = 15.0;
    bool parallel = true;
};

struct GridPartition {
    std::vector<double> x_cuts;  // strictly increasing
    std::vector<double> y_cuts;
};

// Plug-in mutual information (bits) of the 2-D histogram induced by an
// explicit grid.
double grid_information(std::span<const double> x, std::span<const double> y,
                        const GridPartition& grid);

struct CharCell {
    int x_bins = 0;
    int y_bins = 0;
    double value = 0.0;  // normalized mutual information in [0,1]
};

// All (a,b) grid scores with a,b >= 2 and a*b <= budget. Each entry is the
// best normalized mutual information found over grids of that size, maximum
// of both optimization orientations.
struct CharacteristicMatrix {
    int n = 0;
    int budget = 0;
    std::vector<CharCell> cells;  // ordered by (x_bins, y_bins)

    double max_value() const;
    double mean_value() const;
};

CharacteristicMatrix characteristic_matrix(std::span<const double> x, std::span<const double> y,
                                           int budget, const MicOptions& opts = {});

double mic(std::span<const double> x, std::span<const double> y, double alpha = 0.6,
           double clump_factor = 15.0, const MicOptions& opts = {});
double tic(std::span<const double> x, std::span<const double> y, double alpha = 0.6,
           double clump_factor = 15.0, const MicOptions& opts = {});

struct MicTic {
    double mic = 0.0;
    double tic = 0.0;
};
// One characteristic-matrix pass serving both statistics.
MicTic mic_tic(std::span<const double> x, std::span<const double> y, double alpha = 0.6,
               double clump_factor = 15.0, const MicOptions& opts = {});

// Brute force over every axis-aligned grid with cell count <= budget, cuts
// taken between consecutive distinct data values. Test oracle; refuses
// n > 30 or budget > 9.
double mic_exhaustive(std::span<const double> x, std::span<const double> y, int budget);

}  // namespace doswap
