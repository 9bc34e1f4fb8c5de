#include "qnc/network.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

#include "qnc/error.hpp"
#include "qnc/rng.hpp"

namespace qnc {

Deployment::Deployment(int n, std::vector<Edge> edges, NodeId gateway, std::uint64_t seed)
    : n_(n), edges_(std::move(edges)), gateway_(gateway), seed_(seed), in_(n), out_(n) {
    if (n < 2) throw InvalidParameters("deployment needs at least 2 nodes");
    if (gateway < 0 || gateway >= n) throw InvalidParameters("gateway id out of range");
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return a.tail != b.tail ? a.tail < b.tail : a.head < b.head;
    });
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n)
            throw InvalidParameters("edge endpoint out of range");
        if (e.tail == e.head) throw InvalidParameters("self loop at node " + std::to_string(e.tail + 1));
        if (e.capacity < 1) throw InvalidParameters("edge capacity must be a positive integer");
        if (i > 0 && edges_[i - 1].tail == e.tail && edges_[i - 1].head == e.head)
            throw InvalidParameters("duplicated edge " + std::to_string(e.tail + 1) + "->" +
                                    std::to_string(e.head + 1));
        out_[e.tail].push_back(static_cast<EdgeId>(i));
        in_[e.head].push_back(static_cast<EdgeId>(i));
    }
    if (!all_reach_gateway(n, edges_, gateway))
        throw InvalidParameters("some node has no directed path to the gateway");
}

std::span<const EdgeId> Deployment::in_edges(NodeId v) const { return in_.at(static_cast<std::size_t>(v)); }

std::span<const EdgeId> Deployment::out_edges(NodeId v) const { return out_.at(static_cast<std::size_t>(v)); }

bool all_reach_gateway(int n, std::span<const Edge> edges, NodeId gateway) {
    // BFS on the reversed graph from the gateway.
    std::vector<std::vector<NodeId>> rev(static_cast<std::size_t>(n));
    for (const Edge& e : edges) rev[e.head].push_back(e.tail);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<NodeId> frontier;
    frontier.push(gateway);
    seen[gateway] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        NodeId v = frontier.front();
        frontier.pop();
        for (NodeId u : rev[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                ++reached;
                frontier.push(u);
            }
        }
    }
    return reached == n;
}

Deployment generate_deployment(int n, int num_edges, std::uint64_t seed, int capacity, int retry_budget) {
    if (n < 2) throw InvalidParameters("n must be at least 2");
    const long long max_edges = static_cast<long long>(n) * (n - 1);
    if (num_edges < 0 || num_edges > max_edges)
        throw InvalidParameters("num_edges " + std::to_string(num_edges) + " exceeds n(n-1) = " +
                                std::to_string(max_edges));
    if (capacity < 1) throw InvalidParameters("capacity must be positive");

    Rng rng(seed);
    std::vector<long long> pairs(static_cast<std::size_t>(max_edges));
    for (int attempt = 0; attempt < retry_budget; ++attempt) {
        std::iota(pairs.begin(), pairs.end(), 0LL);
        // Partial Fisher-Yates: the first num_edges slots are a uniform sample.
        for (int i = 0; i < num_edges; ++i) {
            std::uniform_int_distribution<long long> pick(i, max_edges - 1);
            std::swap(pairs[static_cast<std::size_t>(i)], pairs[static_cast<std::size_t>(pick(rng))]);
        }
        std::vector<Edge> edges;
        edges.reserve(static_cast<std::size_t>(num_edges));
        for (int i = 0; i < num_edges; ++i) {
            // Index p enumerates ordered pairs (tail, head) with head != tail.
            long long p = pairs[static_cast<std::size_t>(i)];
            int tail = static_cast<int>(p / (n - 1));
            int head = static_cast<int>(p % (n - 1));
            if (head >= tail) ++head;
            edges.push_back({tail, head, capacity});
        }
        NodeId gateway = std::uniform_int_distribution<int>(0, n - 1)(rng);
        if (all_reach_gateway(n, edges, gateway)) return Deployment(n, std::move(edges), gateway, seed);
    }
    throw NonConvergence("no deployment with every node reaching the gateway after " +
                         std::to_string(retry_budget) + " attempts");
}

Eigen::SparseMatrix<double> build_gateway_selector(const Deployment& d) {
    auto in = d.in_edges(d.gateway());
    Eigen::SparseMatrix<double> b(static_cast<Eigen::Index>(in.size()), d.num_edges());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) entries.emplace_back(static_cast<int>(i), in[i], 1.0);
    b.setFromTriplets(entries.begin(), entries.end());
    return b;
}

}  // namespace qnc
