#include "doswap/scm.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "doswap/csvio.hpp"
#include "doswap/rng.hpp"

namespace doswap {

using nlohmann::json;

void Scm::validate() const {
    const int d = graph.d;
    if (static_cast<int>(factor_names.size()) != d || static_cast<int>(equations.size()) != d ||
        static_cast<int>(noise_scale.size()) != d || static_cast<int>(ranges.size()) != d)
        throw InvalidInput("scm: field sizes disagree with graph");
    if (!is_dag(graph)) throw InvalidInput("scm: graph must be a DAG");
    for (int i = 0; i < d; ++i) {
        const bool root = graph.parents(i).empty();
        if (root && equations[i]) throw InvalidInput("scm: root node has an equation");
        if (!root && !equations[i]) throw InvalidInput("scm: non-root node lacks an equation");
        if (noise_scale[i] < 0) throw InvalidInput("scm: negative noise scale");
        if (ranges[i][0] >= ranges[i][1]) throw InvalidInput("scm: empty factor range");
    }
}

namespace {

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

constexpr double kPivotHeight = 10.0;
constexpr double kRodLength = 9.5;

// Ground shadow of a point under parallel light at `light_deg` from the
// horizontal: x + y / tan(theta).
double ground_shadow(double px, double py, double light_deg) {
    return px + py / std::tan(deg2rad(light_deg));
}

constexpr double kFlowCrossSection = 50.0;
constexpr double kFlowBaseVolume = 250.0;
constexpr double kFlowCoefficient = 1.0;
constexpr double kGravity = 9.8;

// Non-root noise defaults to 2% of the factor range.
double default_noise(const std::array<double, 2>& range) { return 0.02 * (range[1] - range[0]); }

}  // namespace

Scm pendulum_scm() {
    Scm s;
    s.factor_names = {"pendulum_angle", "light_angle", "shadow_position", "shadow_length"};
    s.graph = BinaryGraph(4);
    s.graph.set_edge(0, 2);  // pendulum_angle -> shadow_position
    s.graph.set_edge(0, 3);  // pendulum_angle -> shadow_length
    s.graph.set_edge(1, 2);  // light_angle -> shadow_position
    s.graph.set_edge(1, 3);  // light_angle -> shadow_length
    s.ranges = {{{-40.0, 40.0}, {50.0, 130.0}, {-12.0, 12.0}, {0.0, 16.0}}};

    auto endpoint = [](double pend_deg) {
        const double th = deg2rad(pend_deg);
        return std::pair{kRodLength * std::sin(th), kPivotHeight - kRodLength * std::cos(th)};
    };
    auto shadows = [endpoint](const std::vector<double>& v) {
        const auto [ex, ey] = endpoint(v[0]);
        const double s_pivot = ground_shadow(0.0, kPivotHeight, v[1]);
        const double s_end = ground_shadow(ex, ey, v[1]);
        return std::pair{s_pivot, s_end};
    };

    s.equations.resize(4);
    s.equations[2] = [shadows](const std::vector<double>& v) {
        const auto [s1, s2] = shadows(v);
        return 0.5 * (s1 + s2);
    };
    s.equations[3] = [shadows](const std::vector<double>& v) {
        const auto [s1, s2] = shadows(v);
        return std::abs(s1 - s2);
    };
    s.noise_scale = {0.0, 0.0, default_noise(s.ranges[2]), default_noise(s.ranges[3])};
    s.validate();
    return s;
}

Scm flow_scm() {
    Scm s;
    s.factor_names = {"ball_size", "hole", "water_height", "flow"};
    s.graph = BinaryGraph(4);
    s.graph.set_edge(0, 2);  // ball_size -> water_height
    s.graph.set_edge(2, 3);  // water_height -> flow
    s.graph.set_edge(1, 3);  // hole -> flow
    s.ranges = {{{1.0, 3.0}, {4.0, 7.0}, {4.8, 7.6}, {0.0, 9.0}}};

    s.equations.resize(4);
    s.equations[2] = [](const std::vector<double>& v) {
        const double displaced = (4.0 / 3.0) * std::numbers::pi * v[0] * v[0] * v[0];
        return (kFlowBaseVolume + displaced) / kFlowCrossSection;
    };
    s.equations[3] = [](const std::vector<double>& v) {
        const double head = std::max(v[2] - v[1], 0.0);
        return kFlowCoefficient * std::sqrt(2.0 * kGravity * head);
    };
    s.noise_scale = {0.0, 0.0, default_noise(s.ranges[2]), default_noise(s.ranges[3])};
    s.validate();
    return s;
}

Mat sample_factors(const Scm& scm, int n, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("sample_factors: need n >= 1");
    scm.validate();
    const int k = scm.k();
    const auto order = topological_order(scm.graph);

    Rng rng = make_stream(seed, "factors");
    Mat out(n, k);
    std::vector<double> row(k, 0.0);
    for (int r = 0; r < n; ++r) {
        for (int node : order) {
            const auto [lo, hi] = scm.ranges[node];
            if (!scm.equations[node]) {
                row[node] = rng.uniform(lo, hi);
            } else {
                double v = scm.equations[node](row);
                if (scm.noise_scale[node] > 0.0) v += scm.noise_scale[node] * rng.normal();
                row[node] = std::clamp(v, lo, hi);
            }
        }
        for (int c = 0; c < k; ++c) out(r, c) = row[c];
    }
    return out;
}

namespace {

// Householder QR of a seeded Gaussian matrix; sign-fixed so the factorization
// (and hence the mixing) is unique.
Mat random_orthogonal(int m, Rng& rng) {
    Mat a(m, m);
    for (auto& v : a.a) v = rng.normal();

    Mat q = Mat::identity(m);
    Mat r = a;
    std::vector<double> v(m);
    for (int col = 0; col < m; ++col) {
        double norm = 0.0;
        for (int i = col; i < m; ++i) norm += r(i, col) * r(i, col);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = r(col, col) > 0 ? -norm : norm;
        double vnorm = 0.0;
        for (int i = col; i < m; ++i) {
            v[i] = r(i, col) - (i == col ? alpha : 0.0);
            vnorm += v[i] * v[i];
        }
        if (vnorm == 0.0) continue;
        vnorm = std::sqrt(vnorm);
        for (int i = col; i < m; ++i) v[i] /= vnorm;

        for (int j = col; j < m; ++j) {
            double dot = 0.0;
            for (int i = col; i < m; ++i) dot += v[i] * r(i, j);
            for (int i = col; i < m; ++i) r(i, j) -= 2.0 * v[i] * dot;
        }
        for (int jrow = 0; jrow < m; ++jrow) {
            double dot = 0.0;
            for (int i = col; i < m; ++i) dot += q(jrow, i) * v[i];
            for (int i = col; i < m; ++i) q(jrow, i) -= 2.0 * dot * v[i];
        }
    }
    for (int col = 0; col < m; ++col) {
        if (r(col, col) < 0.0)
            for (int i = 0; i < m; ++i) q(i, col) = -q(i, col);
    }
    return q;
}

}  // namespace

Observation observe(const Mat& factors, int m_u, double noise_sd, std::uint64_t seed) {
    if (m_u < 0) throw InvalidInput("observe: nuisance dimension must be >= 0");
    if (noise_sd < 0) throw InvalidInput("observe: noise level must be >= 0");
    const int n = factors.rows;
    const int k = factors.cols;
    const int m = k + m_u;

    Observation obs;
    obs.factor_means.resize(k);
    obs.factor_sds.resize(k);
    for (int c = 0; c < k; ++c) {
        double mean = 0.0;
        for (int r = 0; r < n; ++r) mean += factors(r, c);
        mean /= n;
        double var = 0.0;
        for (int r = 0; r < n; ++r) var += (factors(r, c) - mean) * (factors(r, c) - mean);
        var = n > 1 ? var / (n - 1) : 0.0;
        obs.factor_means[c] = mean;
        obs.factor_sds[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }

    Rng q_rng = make_stream(seed, "mixing");
    obs.mixing_q = random_orthogonal(m, q_rng);

    Rng nuis_rng = make_stream(seed, "nuisance");
    obs.nuisance = Mat(n, m_u);
    for (auto& v : obs.nuisance.a) v = nuis_rng.normal();

    Mat latent(n, m);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < k; ++c)
            latent(r, c) = (factors(r, c) - obs.factor_means[c]) / obs.factor_sds[c];
        for (int c = 0; c < m_u; ++c) latent(r, k + c) = obs.nuisance(r, c);
    }

    obs.observations = matmul(latent, transpose(obs.mixing_q));
    if (noise_sd > 0.0) {
        Rng noise_rng = make_stream(seed, "obs-noise");
        for (auto& v : obs.observations.a) v += noise_sd * noise_rng.normal();
    }
    return obs;
}

std::vector<int> make_pairs(int n, std::uint64_t seed) {
    if (n < 2) throw InvalidInput("make_pairs: need at least two samples");
    Rng rng = make_stream(seed, "pairs");
    for (int attempt = 0; attempt < 128; ++attempt) {
        auto p = rng.permutation(n);
        bool fixed_point = false;
        for (int i = 0; i < n; ++i)
            if (p[i] == i) {
                fixed_point = true;
                break;
            }
        if (!fixed_point) return p;
    }
    // Cyclic shift is always a derangement.
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = (i + 1) % n;
    return p;
}

Mat DatasetBundle::standardized_factors() const {
    Mat out(factors.rows, factors.cols);
    for (int r = 0; r < factors.rows; ++r)
        for (int c = 0; c < factors.cols; ++c)
            out(r, c) = (factors(r, c) - factor_means[c]) / factor_sds[c];
    return out;
}

DatasetBundle make_dataset(const Scm& scm, const std::string& name, int n, int m_u,
                           double noise_sd, std::uint64_t seed) {
    DatasetBundle b;
    b.dataset = name;
    b.seed = seed;
    b.noise_sd = noise_sd;
    b.factors = sample_factors(scm, n, seed);
    auto obs = observe(b.factors, m_u, noise_sd, seed);
    b.observations = std::move(obs.observations);
    b.nuisance = std::move(obs.nuisance);
    b.mixing_q = std::move(obs.mixing_q);
    b.factor_means = std::move(obs.factor_means);
    b.factor_sds = std::move(obs.factor_sds);
    b.truth = scm.graph;
    b.pair_index = make_pairs(n, seed);
    b.factor_names = scm.factor_names;
    b.factor_ranges = scm.ranges;
    return b;
}

namespace {

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    return m;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open for writing: " + path);
    out << text;
}

json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open: " + path);
    json j;
    in >> j;
    return j;
}

std::vector<std::string> numbered_header(const std::string& prefix, int count) {
    std::vector<std::string> h(count);
    for (int i = 0; i < count; ++i) h[i] = prefix + std::to_string(i);
    return h;
}

}  // namespace

void DatasetBundle::save(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    const auto path = [&](const char* f) { return (std::filesystem::path(dir) / f).string(); };

    write_csv(path("factors.csv"), factor_names, factors);
    write_csv(path("observations.csv"), numbered_header("x", m()), observations);
    write_csv(path("nuisance.csv"), numbered_header("nu", m_u()), nuisance);
    write_text(path("graph.json"), to_json(truth).dump(2) + "\n");
    write_text(path("pairs.json"), json{{"pair_index", pair_index}}.dump(2) + "\n");

    json ranges = json::array();
    for (const auto& r : factor_ranges) ranges.push_back({r[0], r[1]});
    const json meta = {{"dataset", dataset},
                       {"seed", seed},
                       {"noise_sd", noise_sd},
                       {"factor_names", factor_names},
                       {"factor_ranges", ranges},
                       {"factor_means", factor_means},
                       {"factor_sds", factor_sds},
                       {"mixing_q", mat_to_json(mixing_q)}};
    write_text(path("meta.json"), meta.dump(2) + "\n");
}

DatasetBundle DatasetBundle::load(const std::string& dir) {
    const auto path = [&](const char* f) { return (std::filesystem::path(dir) / f).string(); };

    DatasetBundle b;
    auto factors = read_csv(path("factors.csv"));
    b.factors = std::move(factors.data);
    b.factor_names = std::move(factors.header);
    b.observations = read_csv(path("observations.csv")).data;
    b.nuisance = read_csv(path("nuisance.csv")).data;
    b.truth = binary_graph_from_json(read_json(path("graph.json")));
    b.pair_index = read_json(path("pairs.json"))["pair_index"].get<std::vector<int>>();

    const json meta = read_json(path("meta.json"));
    b.dataset = meta["dataset"].get<std::string>();
    b.seed = meta["seed"].get<std::uint64_t>();
    b.noise_sd = meta["noise_sd"].get<double>();
    b.factor_means = meta["factor_means"].get<std::vector<double>>();
    b.factor_sds = meta["factor_sds"].get<std::vector<double>>();
    for (const auto& r : meta["factor_ranges"])
        b.factor_ranges.push_back({r[0].get<double>(), r[1].get<double>()});
    b.mixing_q = mat_from_json(meta["mixing_q"]);

    if (b.factors.rows != b.observations.rows || b.factors.rows != b.nuisance.rows ||
        static_cast<int>(b.pair_index.size()) != b.factors.rows)
        throw InvalidInput("bundle: tables disagree on sample count in " + dir);
    return b;
}

CounterexampleBundle gaussian_counterexample(const CounterexampleParams& params, int n,
                                             std::uint64_t seed) {
    for (double s : params.sigma)
        if (!(s > 0.0)) throw InvalidInput("counterexample: deviations must be positive");
    if (!(params.rho > 0.0 && params.rho < 1.0))
        throw InvalidInput("counterexample: coupling must lie in (0,1)");
    if (params.as_printed && params.mu[0] == 0.0)
        throw InvalidInput("counterexample: as-printed construction needs a nonzero first mean");
    if (n < 2) throw InvalidInput("counterexample: need n >= 2");

    CounterexampleBundle out;
    out.params = params;
    out.original = Mat(n, 4);
    out.constructed = Mat(n, 4);

    Rng orig_rng = make_stream(seed, "counterexample-original");
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < 4; ++c)
            out.original(r, c) = params.mu[c] + params.sigma[c] * orig_rng.normal();

    Rng con_rng = make_stream(seed, "counterexample-constructed");
    const double rho = params.rho;
    for (int r = 0; r < n; ++r) {
        const double a = params.mu[0] + params.sigma[0] * con_rng.normal();
        out.constructed(r, 0) = a;
        for (int c = 1; c < 4; ++c) {
            const double noise = con_rng.normal();
            if (params.as_printed) {
                const double k = params.mu[c] / params.mu[0];
                out.constructed(r, c) = k * a + (params.sigma[c] - k * params.sigma[0]) * noise;
            } else {
                out.constructed(r, c) =
                    params.mu[c] + rho * params.sigma[c] * (a - params.mu[0]) / params.sigma[0] +
                    std::sqrt(1.0 - rho * rho) * params.sigma[c] * noise;
            }
        }
    }
    return out;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidInput("ks_statistic: empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= v) ++i;
        while (j < sb.size() && sb[j] <= v) ++j;
        best = std::max(best, std::abs(i / na - j / nb));
    }
    return best;
}

std::vector<BinaryGraph> graph_variants(const BinaryGraph& truth, int count, std::uint64_t seed) {
    if (!is_dag(truth)) throw InvalidInput("graph_variants: truth must be a DAG");
    std::vector<BinaryGraph> out;
    auto push_unique = [&](const BinaryGraph& g) {
        if (static_cast<int>(out.size()) >= count) return;
        if (std::find(out.begin(), out.end(), g) == out.end() && is_dag(g)) out.push_back(g);
    };

    push_unique(truth);
    push_unique(BinaryGraph(truth.d));

    const int d = truth.d;
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            if (truth.edge(j, i)) {
                BinaryGraph g = truth;
                g.set_edge(j, i, false);
                push_unique(g);
            }
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            if (truth.edge(j, i) && !truth.edge(i, j)) {
                BinaryGraph g = truth;
                g.set_edge(j, i, false);
                g.set_edge(i, j, true);
                push_unique(g);  // skipped automatically when cyclic
            }

    Rng rng = make_stream(seed, "graph-variants");
    int attempts = 0;
    const int max_attempts = 1000 * std::max(count, 1);
    while (static_cast<int>(out.size()) < count && attempts < max_attempts) {
        ++attempts;
        const int j = static_cast<int>(rng.below(d));
        const int i = static_cast<int>(rng.below(d));
        if (i == j || truth.edge(j, i)) continue;
        BinaryGraph g = truth;
        g.set_edge(j, i, true);
        push_unique(g);
    }
    return out;
}

}  // namespace doswap
