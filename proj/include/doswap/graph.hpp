#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "doswap/mat.hpp"

namespace doswap {

constexpr int kMaxNodes = 64;

// Learnable causal structure: weights(j, i) is the strength of edge j -> i.
// The diagonal must stay exactly zero (it is re-clamped after every
// optimizer step).
struct WeightedDigraph {
    int d = 0;
    Mat weights;
    std::vector<std::string> node_names;

    WeightedDigraph() = default;
    WeightedDigraph(Mat w, std::vector<std::string> names = {});

    void validate() const;
    void clamp_diagonal();

    static WeightedDigraph zeros(int d, std::vector<std::string> names = {});
};

struct BinaryGraph {
    int d = 0;
    std::vector<std::uint8_t> edges;  // row-major, edges[j*d+i] != 0 means j -> i

    BinaryGraph() = default;
    explicit BinaryGraph(int d_) : d(d_), edges(static_cast<std::size_t>(d_) * d_, 0) {}

    bool edge(int j, int i) const { return edges[static_cast<std::size_t>(j) * d + i] != 0; }
    void set_edge(int j, int i, bool on = true) {
        edges[static_cast<std::size_t>(j) * d + i] = on ? 1 : 0;
    }
    int edge_count() const;
    bool operator==(const BinaryGraph& o) const { return d == o.d && edges == o.edges; }

    std::vector<int> parents(int i) const;
    std::vector<int> roots() const;  // nodes with no parents
};

struct GraphRubrics {
    double tpr = 0.0;
    double fdr = 0.0;
    int shd = 0;
};

// e^M via scaling-and-squaring with a truncated power series (order 12,
// scaled so the infinity norm is <= 0.5). Square matrices up to kMaxNodes.
Mat matrix_exponential(const Mat& m);

// h(W) = tr(e^{W.W}) - d, zero exactly when the support of W is a DAG.
double acyclicity_penalty(const Mat& weights);
double acyclicity_penalty(const WeightedDigraph& g);

// Analytic gradient of the penalty: (e^{W.W})^T . 2W.
Mat acyclicity_gradient(const Mat& weights);
Mat acyclicity_gradient(const WeightedDigraph& g);

bool is_dag(const BinaryGraph& g);

// Edge (j,i) kept iff |weights(j,i)| >= tau.
BinaryGraph binarize(const WeightedDigraph& g, double tau);

// TPR over true edges, FDR over predicted edges (reversed counts as wrong),
// SHD with a reversal costing one modification.
GraphRubrics graph_rubrics(const BinaryGraph& pred, const BinaryGraph& truth);

// Kahn's algorithm, lowest index first among ready nodes. Throws CycleError
// naming one cycle on cyclic input.
std::vector<int> topological_order(const BinaryGraph& g);

nlohmann::json to_json(const WeightedDigraph& g);
nlohmann::json to_json(const BinaryGraph& g);
WeightedDigraph weighted_digraph_from_json(const nlohmann::json& j);
BinaryGraph binary_graph_from_json(const nlohmann::json& j);

}  // namespace doswap
