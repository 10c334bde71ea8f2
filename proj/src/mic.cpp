#include "doswap/mic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace doswap {

double CharacteristicMatrix::max_value() const {
    double best = 0.0;
    for (const auto& c : cells) best = std::max(best, c.value);
    return best;
}

double CharacteristicMatrix::mean_value() const {
    if (cells.empty()) return 0.0;
    double s = 0.0;
    for (const auto& c : cells) s += c.value;
    return s / static_cast<double>(cells.size());
}

namespace {

// Stable order by (value, original index); all downstream grid work is rank
// based, which gives exact invariance under strictly monotone transforms.
std::vector<int> sorted_order(std::span<const double> v) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (v[a] != v[b]) return v[a] < v[b];
        return a < b;
    });
    return idx;
}

inline double xlog2x_ratio(double count, double total) {
    // count * log2(count/total), with 0 log 0 = 0
    if (count <= 0.0) return 0.0;
    return count * std::log2(count / total);
}

// Assign each point to one of `groups` bins along the sorted axis, keeping
// tied values together. Unequal bin sizes happen when ties force them.
std::vector<int> equipartition(std::span<const double> v, const std::vector<int>& order,
                               int groups) {
    const int n = static_cast<int>(order.size());
    std::vector<int> bin_of(n, 0);
    int row = 0;
    int in_row = 0;
    int placed = 0;
    double target = static_cast<double>(n) / groups;
    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && v[order[j]] == v[order[i]]) ++j;
        const int run = j - i;
        if (row < groups - 1 && in_row > 0 &&
            std::abs(in_row + run - target) > std::abs(in_row - target)) {
            ++row;
            in_row = 0;
            target = static_cast<double>(n - placed) / (groups - row);
        }
        for (int t = i; t < j; ++t) bin_of[order[t]] = row;
        in_row += run;
        placed += run;
        i = j;
    }
    return bin_of;
}

struct Atoms {
    // prefix[t * rows + r] = points of row r among the first t atoms
    std::vector<int> prefix;
    std::vector<int> totals;  // prefix point count per atom boundary
    int count = 0;
    int rows = 0;
};

// Candidate cut positions along the optimized axis: tied values are atomic,
// and maximal runs of same-row points merge (cutting inside such a run never
// improves the score). If the result exceeds `max_atoms`, adjacent atoms are
// pooled by count into that many superatoms.
Atoms build_atoms(std::span<const double> v, const std::vector<int>& order,
                  const std::vector<int>& row_of, int rows, int max_atoms) {
    const int n = static_cast<int>(order.size());

    // Tie groups with purity info.
    struct Group {
        int begin, end;
        int row;  // -1 when mixed
    };
    std::vector<Group> groups;
    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && v[order[j]] == v[order[i]]) ++j;
        int row = row_of[order[i]];
        for (int t = i + 1; t < j; ++t)
            if (row_of[order[t]] != row) {
                row = -1;
                break;
            }
        groups.push_back({i, j, row});
        i = j;
    }

    // Merge consecutive pure groups of the same row into clumps.
    std::vector<std::pair<int, int>> clumps;  // [begin, end) in sorted order
    std::vector<int> clump_row;               // row if pure, -1 if mixed
    for (const auto& g : groups) {
        if (!clumps.empty() && g.row >= 0 && clump_row.back() == g.row) {
            clumps.back().second = g.end;
        } else {
            clumps.push_back({g.begin, g.end});
            clump_row.push_back(g.row);
        }
    }

    // Pool into superatoms when over budget.
    std::vector<int> boundaries;  // end offset of each atom
    const int k = static_cast<int>(clumps.size());
    if (k <= max_atoms) {
        for (const auto& c : clumps) boundaries.push_back(c.second);
    } else {
        double target = static_cast<double>(n) / max_atoms;
        int in_atom = 0;
        int placed = 0;
        int atoms_done = 0;
        for (int c = 0; c < k; ++c) {
            const int sz = clumps[c].second - clumps[c].first;
            if (atoms_done < max_atoms - 1 && in_atom > 0 &&
                std::abs(in_atom + sz - target) > std::abs(in_atom - target)) {
                boundaries.push_back(clumps[c].first);
                ++atoms_done;
                in_atom = 0;
                target = static_cast<double>(n - placed) / (max_atoms - atoms_done);
            }
            in_atom += sz;
            placed += sz;
        }
        boundaries.push_back(n);
    }

    Atoms a;
    a.count = static_cast<int>(boundaries.size());
    a.rows = rows;
    a.prefix.assign(static_cast<std::size_t>(a.count + 1) * rows, 0);
    a.totals.assign(a.count + 1, 0);
    int pos = 0;
    for (int t = 0; t < a.count; ++t) {
        for (int r = 0; r < rows; ++r) a.prefix[(t + 1) * rows + r] = a.prefix[t * rows + r];
        while (pos < boundaries[t]) {
            ++a.prefix[(t + 1) * rows + row_of[order[pos]]];
            ++pos;
        }
        a.totals[t + 1] = pos;
    }
    return a;
}

// Best I(column partition; fixed rows) over partitions of the atoms into at
// most l columns, for every l in [1, max_bins]. Returns values in bits.
std::vector<double> optimize_axis(const Atoms& atoms, int n, int max_bins, double h_rows) {
    const int k = atoms.count;
    const int rows = atoms.rows;
    const int lmax = std::min(max_bins, std::max(k, 1));
    const double dn = static_cast<double>(n);

    // score of a column spanning atoms (s, t]: sum_r (w_r/n) log2(w_r / W)
    auto score = [&](int s, int t) {
        const double w_total = atoms.totals[t] - atoms.totals[s];
        if (w_total <= 0.0) return 0.0;
        double acc = 0.0;
        for (int r = 0; r < rows; ++r) {
            const double w = atoms.prefix[t * rows + r] - atoms.prefix[s * rows + r];
            acc += xlog2x_ratio(w, w_total);
        }
        return acc / dn;
    };

    // F[l][t] = best sum of column scores over partitions of atoms 1..t into
    // exactly l nonempty columns.
    constexpr double kNegInf = -1e300;
    std::vector<double> prev(k + 1, kNegInf), cur(k + 1, kNegInf);
    std::vector<double> best_for(static_cast<std::size_t>(max_bins) + 1, kNegInf);
    for (int t = 1; t <= k; ++t) prev[t] = score(0, t);
    if (k >= 1) best_for[1] = prev[k];
    for (int l = 2; l <= lmax; ++l) {
        std::fill(cur.begin(), cur.end(), kNegInf);
        for (int t = l; t <= k; ++t) {
            double best = kNegInf;
            for (int s = l - 1; s < t; ++s) {
                const double v = prev[s] + score(s, t);
                if (v > best) best = v;
            }
            cur[t] = best;
        }
        best_for[l] = cur[k];
        std::swap(prev, cur);
    }

    // Convert to mutual information, allow "at most l columns".
    std::vector<double> out(static_cast<std::size_t>(max_bins) + 1, 0.0);
    double running = 0.0;
    for (int l = 1; l <= max_bins; ++l) {
        if (l <= lmax && best_for[l] > kNegInf / 2) running = std::max(running, h_rows + best_for[l]);
        out[l] = std::max(0.0, running);
    }
    return out;
}

double rows_entropy(const std::vector<int>& row_of, int rows, int n) {
    std::vector<int> counts(rows, 0);
    for (int r : row_of) ++counts[r];
    double h = 0.0;
    for (int c : counts) h -= xlog2x_ratio(c, n) / n;
    return h;
}

struct Sweep {
    int fixed_bins = 0;          // bins on the equipartitioned axis
    bool optimize_x = false;     // which axis the DP runs over
    std::vector<double> values;  // values[l] = best I with <= l bins on the DP axis
};

std::vector<double> run_sweep(std::span<const double> opt_axis, std::span<const double> fix_axis,
                              const std::vector<int>& opt_order, const std::vector<int>& fix_order,
                              int fixed_bins, int max_bins, double clump_factor) {
    const int n = static_cast<int>(opt_axis.size());
    const auto row_of = equipartition(fix_axis, fix_order, fixed_bins);
    const double h_rows = rows_entropy(row_of, fixed_bins, n);
    const int max_atoms = std::max(2, static_cast<int>(std::llround(clump_factor * max_bins)));
    const Atoms atoms = build_atoms(opt_axis, opt_order, row_of, fixed_bins, max_atoms);
    return optimize_axis(atoms, n, max_bins, h_rows);
}

}  // namespace

CharacteristicMatrix characteristic_matrix(std::span<const double> x, std::span<const double> y,
                                           int budget, const MicOptions& opts) {
    if (x.size() != y.size()) throw InvalidInput("characteristic_matrix: length mismatch");
    const int n = static_cast<int>(x.size());
    if (n < 8) throw InvalidInput("characteristic_matrix: need at least 8 samples");
    if (budget < 4) throw InvalidInput("characteristic_matrix: budget must allow a 2x2 grid");
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw InvalidInput("characteristic_matrix: non-finite sample");

    CharacteristicMatrix cm;
    cm.n = n;
    cm.budget = budget;
    const int half = budget / 2;
    for (int a = 2; a <= half; ++a)
        for (int b = 2; a * b <= budget; ++b) cm.cells.push_back({a, b, 0.0});

    const auto x_order = sorted_order(x);
    const auto y_order = sorted_order(y);

    // One sweep per (orientation, fixed-axis bin count); all independent.
    std::vector<Sweep> sweeps;
    for (int b = 2; b <= half; ++b) sweeps.push_back({b, true, {}});
    for (int a = 2; a <= half; ++a) sweeps.push_back({a, false, {}});

    const int total = static_cast<int>(sweeps.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (int i = 0; i < total; ++i) {
        auto& sw = sweeps[i];
        const int max_bins = budget / sw.fixed_bins;
        if (sw.optimize_x) {
            sw.values = run_sweep(x, y, x_order, y_order, sw.fixed_bins, max_bins,
                                  opts.clump_factor);
        } else {
            sw.values = run_sweep(y, x, y_order, x_order, sw.fixed_bins, max_bins,
                                  opts.clump_factor);
        }
    }

    // Deterministic merge in sweep order.
    auto cell_at = [&](int a, int b) -> CharCell& {
        const auto it = std::lower_bound(cm.cells.begin(), cm.cells.end(), std::pair{a, b},
                                         [](const CharCell& c, const std::pair<int, int>& key) {
                                             if (c.x_bins != key.first) return c.x_bins < key.first;
                                             return c.y_bins < key.second;
                                         });
        return *it;
    };
    for (const auto& sw : sweeps) {
        const int max_bins = budget / sw.fixed_bins;
        for (int l = 2; l <= max_bins; ++l) {
            const int a = sw.optimize_x ? l : sw.fixed_bins;
            const int b = sw.optimize_x ? sw.fixed_bins : l;
            const double denom = std::log2(static_cast<double>(std::min(a, b)));
            const double v = std::clamp(sw.values[l] / denom, 0.0, 1.0);
            auto& cell = cell_at(a, b);
            cell.value = std::max(cell.value, v);
        }
    }
    return cm;
}

namespace {

int grid_budget(std::size_t n, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw InvalidInput("mic: alpha must be in (0,1]");
    return std::max(4, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), alpha))));
}

}  // namespace

MicTic mic_tic(std::span<const double> x, std::span<const double> y, double alpha,
               double clump_factor, const MicOptions& opts) {
    if (clump_factor < 1.0) throw InvalidInput("mic: clump factor must be >= 1");
    MicOptions o = opts;
    o.clump_factor = clump_factor;
    const auto cm = characteristic_matrix(x, y, grid_budget(x.size(), alpha), o);
    return {cm.max_value(), cm.mean_value()};
}

double mic(std::span<const double> x, std::span<const double> y, double alpha,
           double clump_factor, const MicOptions& opts) {
    return mic_tic(x, y, alpha, clump_factor, opts).mic;
}

double tic(std::span<const double> x, std::span<const double> y, double alpha,
           double clump_factor, const MicOptions& opts) {
    return mic_tic(x, y, alpha, clump_factor, opts).tic;
}

double grid_information(std::span<const double> x, std::span<const double> y,
                        const GridPartition& grid) {
    if (x.size() != y.size()) throw InvalidInput("grid_information: length mismatch");
    for (std::size_t i = 1; i < grid.x_cuts.size(); ++i)
        if (grid.x_cuts[i] <= grid.x_cuts[i - 1])
            throw InvalidInput("grid_information: cuts must be strictly increasing");
    for (std::size_t i = 1; i < grid.y_cuts.size(); ++i)
        if (grid.y_cuts[i] <= grid.y_cuts[i - 1])
            throw InvalidInput("grid_information: cuts must be strictly increasing");

    const int a = static_cast<int>(grid.x_cuts.size()) + 1;
    const int b = static_cast<int>(grid.y_cuts.size()) + 1;
    const int n = static_cast<int>(x.size());
    const double dn = n;

    auto bin_index = [](double v, const std::vector<double>& cuts) {
        int bin = 0;
        for (double c : cuts)
            if (v > c) ++bin;
        return bin;
    };

    std::vector<int> joint(static_cast<std::size_t>(a) * b, 0);
    std::vector<int> colsum(a, 0), rowsum(b, 0);
    for (int i = 0; i < n; ++i) {
        const int ca = bin_index(x[i], grid.x_cuts);
        const int rb = bin_index(y[i], grid.y_cuts);
        ++joint[static_cast<std::size_t>(ca) * b + rb];
        ++colsum[ca];
        ++rowsum[rb];
    }
    double info = 0.0;
    for (int ca = 0; ca < a; ++ca)
        for (int rb = 0; rb < b; ++rb) {
            const double j = joint[static_cast<std::size_t>(ca) * b + rb];
            if (j > 0.0)
                info += (j / dn) *
                        std::log2(j * dn / (static_cast<double>(colsum[ca]) * rowsum[rb]));
        }
    return std::max(0.0, info);
}

namespace {

// Midpoints between consecutive distinct values; cutting anywhere else is
// equivalent to one of these.
std::vector<double> candidate_cuts(std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] != sorted[i - 1]) cuts.push_back(0.5 * (sorted[i - 1] + sorted[i]));
    return cuts;
}

bool next_combination(std::vector<int>& comb, int limit) {
    const int k = static_cast<int>(comb.size());
    for (int i = k - 1; i >= 0; --i) {
        if (comb[i] < limit - (k - i)) {
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

double mic_exhaustive(std::span<const double> x, std::span<const double> y, int budget) {
    if (x.size() != y.size()) throw InvalidInput("mic_exhaustive: length mismatch");
    const int n = static_cast<int>(x.size());
    if (n > 30) throw InvalidInput("mic_exhaustive: refuses n > 30");
    if (budget > 9) throw InvalidInput("mic_exhaustive: refuses budget > 9");
    if (budget < 4) throw InvalidInput("mic_exhaustive: budget must allow a 2x2 grid");

    const auto x_cuts = candidate_cuts(x);
    const auto y_cuts = candidate_cuts(y);

    double best = 0.0;
    GridPartition grid;
    for (int a = 2; a <= budget / 2; ++a) {
        if (a - 1 > static_cast<int>(x_cuts.size())) break;
        for (int b = 2; a * b <= budget; ++b) {
            if (b - 1 > static_cast<int>(y_cuts.size())) break;
            const double denom = std::log2(static_cast<double>(std::min(a, b)));

            std::vector<int> xc(a - 1);
            std::iota(xc.begin(), xc.end(), 0);
            do {
                grid.x_cuts.clear();
                for (int c : xc) grid.x_cuts.push_back(x_cuts[c]);
                std::vector<int> yc(b - 1);
                std::iota(yc.begin(), yc.end(), 0);
                do {
                    grid.y_cuts.clear();
                    for (int c : yc) grid.y_cuts.push_back(y_cuts[c]);
                    const double info = grid_information(x, y, grid);
                    best = std::max(best, std::clamp(info / denom, 0.0, 1.0));
                } while (next_combination(yc, static_cast<int>(y_cuts.size())));
            } while (next_combination(xc, static_cast<int>(x_cuts.size())));
        }
    }
    return best;
}

}  // namespace doswap
