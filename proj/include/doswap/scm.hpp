#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "doswap/graph.hpp"
#include "doswap/mat.hpp"

namespace doswap {

// Ground-truth structural causal model. Root factors are sampled uniformly
// from their range; non-roots are deterministic functions of the full factor
// vector (reading only their graph parents) plus additive Gaussian noise.
struct Scm {
    std::vector<std::string> factor_names;
    BinaryGraph graph;
    // equations[i] is empty for roots; for non-roots it maps the current
    // factor vector (parents already filled) to the node value.
    std::vector<std::function<double(const std::vector<double>&)>> equations;
    std::vector<double> noise_scale;               // 0 for roots
    std::vector<std::array<double, 2>> ranges;     // [lo, hi] per factor

    int k() const { return graph.d; }
    void validate() const;
};

// Pendulum: angles drive shadow position and length via a parallel-light
// ground projection. Factors: pendulum_angle, light_angle (degrees),
// shadow_position, shadow_length.
Scm pendulum_scm();

// Flow: submerged ball raises the water level, level and outlet height set
// the outflow. Factors: ball_size, hole, water_height, flow.
Scm flow_scm();

// n x k factor table, bit-reproducible for a given seed.
Mat sample_factors(const Scm& scm, int n, std::uint64_t seed);

struct Observation {
    Mat observations;          // n x (k + m_u)
    Mat nuisance;              // n x m_u
    Mat mixing_q;              // orthogonal (k+m_u) x (k+m_u)
    std::vector<double> factor_means, factor_sds;  // standardization used
};

// Standardizes factors, appends standard-normal nuisance dimensions, applies
// a fixed seeded orthogonal mixing and isotropic observation noise.
Observation observe(const Mat& factors, int m_u, double noise_sd, std::uint64_t seed);

// Fixed-point-free permutation pairing each sample with a partner.
std::vector<int> make_pairs(int n, std::uint64_t seed);

struct DatasetBundle {
    std::string dataset;
    std::uint64_t seed = 0;
    double noise_sd = 0.0;
    Mat factors;       // n x k
    Mat observations;  // n x m
    Mat nuisance;      // n x m_u
    BinaryGraph truth;
    std::vector<int> pair_index;
    std::vector<std::string> factor_names;
    Mat mixing_q;
    std::vector<double> factor_means, factor_sds;
    std::vector<std::array<double, 2>> factor_ranges;

    int n() const { return factors.rows; }
    int k() const { return factors.cols; }
    int m() const { return observations.cols; }
    int m_u() const { return nuisance.cols; }

    // Factors standardized with the stored per-column statistics.
    Mat standardized_factors() const;

    void save(const std::string& dir) const;
    static DatasetBundle load(const std::string& dir);
};

DatasetBundle make_dataset(const Scm& scm, const std::string& name, int n, int m_u,
                           double noise_sd, std::uint64_t seed);

struct CounterexampleParams {
    std::array<double, 4> mu{1.0, 2.0, 3.0, 4.0};
    std::array<double, 4> sigma{1.0, 1.5, 0.8, 1.2};
    double rho = 0.9;
    // Couple through the first variable exactly as stated elsewhere, without
    // the variance-preserving correction. Marginal variances then drift.
    bool as_printed = false;
};

// Two four-column tables with identical per-column Gaussian marginals but
// opposite joint structure: `original` columns are independent, `constructed`
// columns are coupled through the first one.
struct CounterexampleBundle {
    Mat original;
    Mat constructed;
    CounterexampleParams params;
};

CounterexampleBundle gaussian_counterexample(const CounterexampleParams& params, int n,
                                             std::uint64_t seed);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Deterministic family of DAGs around a truth graph: the truth, the empty
// graph, single-edge deletions, acyclic single-edge reversals, then random
// acyclic single-edge additions, up to `count` distinct graphs.
std::vector<BinaryGraph> graph_variants(const BinaryGraph& truth, int count, std::uint64_t seed);

}  // namespace doswap
