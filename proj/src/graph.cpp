#include "doswap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace doswap {

WeightedDigraph::WeightedDigraph(Mat w, std::vector<std::string> names)
    : d(w.rows), weights(std::move(w)), node_names(std::move(names)) {
    if (node_names.empty()) {
        node_names.resize(d);
        for (int i = 0; i < d; ++i) node_names[i] = "z" + std::to_string(i);
    }
    validate();
}

void WeightedDigraph::validate() const {
    if (weights.rows != weights.cols) throw InvalidInput("graph weights must be square");
    if (weights.rows != d) throw InvalidInput("graph node count disagrees with weights");
    if (d > kMaxNodes) throw InvalidInput("graphs are limited to 64 nodes");
    if (!weights.all_finite()) throw InvalidInput("graph weights must be finite");
    for (int i = 0; i < d; ++i)
        if (weights(i, i) != 0.0) throw InvalidInput("graph diagonal must be zero");
    if (static_cast<int>(node_names.size()) != d)
        throw InvalidInput("graph has wrong number of node names");
}

void WeightedDigraph::clamp_diagonal() {
    for (int i = 0; i < d; ++i) weights(i, i) = 0.0;
}

WeightedDigraph WeightedDigraph::zeros(int d, std::vector<std::string> names) {
    return WeightedDigraph(Mat(d, d), std::move(names));
}

int BinaryGraph::edge_count() const {
    int c = 0;
    for (auto e : edges) c += e != 0;
    return c;
}

std::vector<int> BinaryGraph::parents(int i) const {
    std::vector<int> p;
    for (int j = 0; j < d; ++j)
        if (edge(j, i)) p.push_back(j);
    return p;
}

std::vector<int> BinaryGraph::roots() const {
    std::vector<int> r;
    for (int i = 0; i < d; ++i)
        if (parents(i).empty()) r.push_back(i);
    return r;
}

namespace {

double inf_norm(const Mat& m) {
    double best = 0.0;
    for (int i = 0; i < m.rows; ++i) {
        double row = 0.0;
        for (int j = 0; j < m.cols; ++j) row += std::abs(m(i, j));
        best = std::max(best, row);
    }
    return best;
}

}  // namespace

Mat matrix_exponential(const Mat& m) {
    if (m.rows != m.cols) throw InvalidInput("matrix_exponential: matrix must be square");
    if (m.rows > kMaxNodes) throw InvalidInput("matrix_exponential: dimension above 64");
    if (!m.all_finite()) throw InvalidInput("matrix_exponential: non-finite input");

    const int d = m.rows;
    if (d == 0) return Mat(0, 0);

    // Scale so the series argument has norm <= 0.5, then square back.
    int squarings = 0;
    double norm = inf_norm(m);
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    Mat t = scale(m, std::ldexp(1.0, -squarings));

    constexpr int kSeriesOrder = 12;
    Mat result = Mat::identity(d);
    Mat term = Mat::identity(d);
    for (int i = 1; i <= kSeriesOrder; ++i) {
        term = scale(matmul_reference(term, t), 1.0 / i);
        result = add(result, term);
    }
    for (int s = 0; s < squarings; ++s) result = matmul_reference(result, result);
    return result;
}

double acyclicity_penalty(const Mat& weights) {
    if (weights.rows != weights.cols) throw InvalidInput("acyclicity_penalty: matrix must be square");
    const Mat e = matrix_exponential(hadamard(weights, weights));
    double trace = 0.0;
    for (int i = 0; i < e.rows; ++i) trace += e(i, i);
    return std::max(0.0, trace - e.rows);
}

double acyclicity_penalty(const WeightedDigraph& g) {
    g.validate();
    return acyclicity_penalty(g.weights);
}

Mat acyclicity_gradient(const Mat& weights) {
    const Mat e = matrix_exponential(hadamard(weights, weights));
    return hadamard(transpose(e), scale(weights, 2.0));
}

Mat acyclicity_gradient(const WeightedDigraph& g) {
    g.validate();
    return acyclicity_gradient(g.weights);
}

namespace {

enum class Color { White, Gray, Black };

bool dfs_cycle(const BinaryGraph& g, int u, std::vector<Color>& color, std::vector<int>& stack,
               std::vector<int>& cycle_out) {
    color[u] = Color::Gray;
    stack.push_back(u);
    for (int v = 0; v < g.d; ++v) {
        if (!g.edge(u, v)) continue;
        if (color[v] == Color::Gray) {
            // Found a back edge; slice the cycle out of the stack.
            auto it = std::find(stack.begin(), stack.end(), v);
            cycle_out.assign(it, stack.end());
            cycle_out.push_back(v);
            return true;
        }
        if (color[v] == Color::White && dfs_cycle(g, v, color, stack, cycle_out)) return true;
    }
    stack.pop_back();
    color[u] = Color::Black;
    return false;
}

std::vector<int> find_cycle(const BinaryGraph& g) {
    std::vector<Color> color(g.d, Color::White);
    std::vector<int> stack, cycle;
    for (int u = 0; u < g.d; ++u)
        if (color[u] == Color::White && dfs_cycle(g, u, color, stack, cycle)) return cycle;
    return {};
}

}  // namespace

bool is_dag(const BinaryGraph& g) { return find_cycle(g).empty(); }

BinaryGraph binarize(const WeightedDigraph& g, double tau) {
    if (tau <= 0.0) throw InvalidInput("binarize: threshold must be positive");
    g.validate();
    BinaryGraph out(g.d);
    for (int j = 0; j < g.d; ++j)
        for (int i = 0; i < g.d; ++i)
            if (j != i && std::abs(g.weights(j, i)) >= tau) out.set_edge(j, i);
    return out;
}

GraphRubrics graph_rubrics(const BinaryGraph& pred, const BinaryGraph& truth) {
    if (pred.d != truth.d) throw InvalidInput("graph_rubrics: node counts differ");
    const int d = pred.d;

    int true_edges = 0, pred_edges = 0, correct = 0, wrong_pred = 0;
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            if (j == i) continue;
            const bool p = pred.edge(j, i);
            const bool t = truth.edge(j, i);
            true_edges += t;
            pred_edges += p;
            if (p && t) ++correct;
            if (p && !t) ++wrong_pred;  // extra or reversed
        }
    }

    // SHD per unordered pair: max of edges only-in-pred and only-in-truth,
    // which books a reversal as a single modification.
    int shd = 0;
    for (int j = 0; j < d; ++j) {
        for (int i = j + 1; i < d; ++i) {
            int only_pred = 0, only_truth = 0;
            for (auto [a, b] : {std::pair{j, i}, std::pair{i, j}}) {
                const bool p = pred.edge(a, b);
                const bool t = truth.edge(a, b);
                only_pred += p && !t;
                only_truth += t && !p;
            }
            shd += std::max(only_pred, only_truth);
        }
    }

    GraphRubrics r;
    r.tpr = true_edges > 0 ? static_cast<double>(correct) / true_edges : 1.0;
    r.fdr = static_cast<double>(wrong_pred) / std::max(1, pred_edges);
    r.shd = shd;
    return r;
}

std::vector<int> topological_order(const BinaryGraph& g) {
    const int d = g.d;
    std::vector<int> indegree(d, 0);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            if (g.edge(j, i)) ++indegree[i];

    std::vector<int> order;
    std::vector<bool> placed(d, false);
    order.reserve(d);
    for (int step = 0; step < d; ++step) {
        int pick = -1;
        for (int i = 0; i < d; ++i) {
            if (!placed[i] && indegree[i] == 0) {
                pick = i;
                break;
            }
        }
        if (pick < 0) {
            const auto cycle = find_cycle(g);
            std::ostringstream msg;
            msg << "topological_order: graph has a cycle:";
            for (std::size_t i = 0; i < cycle.size(); ++i) msg << (i ? " -> " : " ") << cycle[i];
            throw CycleError(msg.str());
        }
        placed[pick] = true;
        order.push_back(pick);
        for (int i = 0; i < d; ++i)
            if (g.edge(pick, i)) --indegree[i];
    }
    return order;
}

nlohmann::json to_json(const WeightedDigraph& g) {
    nlohmann::json rows = nlohmann::json::array();
    for (int j = 0; j < g.d; ++j) {
        nlohmann::json row = nlohmann::json::array();
        for (int i = 0; i < g.d; ++i) row.push_back(g.weights(j, i));
        rows.push_back(std::move(row));
    }
    return {{"nodes", g.node_names}, {"weights", rows}};
}

nlohmann::json to_json(const BinaryGraph& g) {
    nlohmann::json rows = nlohmann::json::array();
    for (int j = 0; j < g.d; ++j) {
        nlohmann::json row = nlohmann::json::array();
        for (int i = 0; i < g.d; ++i) row.push_back(g.edge(j, i) ? 1 : 0);
        rows.push_back(std::move(row));
    }
    nlohmann::json names = nlohmann::json::array();
    for (int i = 0; i < g.d; ++i) names.push_back("z" + std::to_string(i));
    return {{"nodes", names}, {"weights", rows}};
}

namespace {

Mat weights_from_json(const nlohmann::json& j, int& d_out) {
    if (!j.contains("weights") || !j["weights"].is_array())
        throw InvalidInput("graph json: missing weights array");
    const auto& rows = j["weights"];
    const int d = static_cast<int>(rows.size());
    Mat w(d, d);
    for (int r = 0; r < d; ++r) {
        if (static_cast<int>(rows[r].size()) != d)
            throw InvalidInput("graph json: weights must be square");
        for (int c = 0; c < d; ++c) w(r, c) = rows[r][c].get<double>();
    }
    d_out = d;
    return w;
}

}  // namespace

WeightedDigraph weighted_digraph_from_json(const nlohmann::json& j) {
    int d = 0;
    Mat w = weights_from_json(j, d);
    std::vector<std::string> names;
    if (j.contains("nodes")) names = j["nodes"].get<std::vector<std::string>>();
    return WeightedDigraph(std::move(w), std::move(names));
}

BinaryGraph binary_graph_from_json(const nlohmann::json& j) {
    int d = 0;
    Mat w = weights_from_json(j, d);
    BinaryGraph g(d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            if (w(r, c) != 0.0) g.set_edge(r, c);
    return g;
}

}  // namespace doswap
