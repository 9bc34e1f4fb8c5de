#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

namespace qnc {

// Nodes and edges are 0-based inside the library. The JSON file format and
// the CLI use 1-based ids.
using NodeId = int;
using EdgeId = int;

struct Edge {
    NodeId tail = 0;
    NodeId head = 0;
    int capacity = 1;  // bits per channel use
};

/// Directed data-gathering network with a single gateway.
///
/// Immutable once constructed. Edges are kept in canonical order
/// (lexicographic by (tail, head)); the edge id is the position in that
/// order. The constructor rejects self loops, duplicated pairs, non-positive
/// capacities and nodes that cannot reach the gateway.
class Deployment {
public:
    Deployment(int n, std::vector<Edge> edges, NodeId gateway, std::uint64_t seed = 0);

    int num_nodes() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    NodeId gateway() const { return gateway_; }
    std::uint64_t seed() const { return seed_; }

    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }

    /// Sorted ids of edges with head(e) == v.
    std::span<const EdgeId> in_edges(NodeId v) const;
    /// Sorted ids of edges with tail(e) == v.
    std::span<const EdgeId> out_edges(NodeId v) const;

private:
    int n_;
    std::vector<Edge> edges_;
    NodeId gateway_;
    std::uint64_t seed_;
    std::vector<std::vector<EdgeId>> in_;
    std::vector<std::vector<EdgeId>> out_;
};

/// True when every node has a directed path to `gateway`.
bool all_reach_gateway(int n, std::span<const Edge> edges, NodeId gateway);

inline constexpr int kDeploymentRetryBudget = 1000;

/// Random deployment: `num_edges` distinct ordered pairs drawn uniformly
/// without replacement, gateway drawn uniformly. Whole deployments are
/// resampled until every node reaches the gateway.
///
/// Throws InvalidParameters when n < 2 or num_edges > n(n-1), and
/// NonConvergence when the retry budget is exhausted.
Deployment generate_deployment(int n, int num_edges, std::uint64_t seed, int capacity = 1,
                               int retry_budget = kDeploymentRetryBudget);

/// |In(v0)| x |E| 0/1 selector picking the gateway's incoming edges in edge order.
Eigen::SparseMatrix<double> build_gateway_selector(const Deployment& d);

}  // namespace qnc
