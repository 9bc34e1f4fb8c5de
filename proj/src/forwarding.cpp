#include "qnc/forwarding.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>

#include "qnc/error.hpp"
#include "qnc/quantizer.hpp"

namespace qnc {

NodeId Routes::next_hop(const Deployment& d, NodeId v) const {
    const EdgeId e = next_edge.at(static_cast<std::size_t>(v));
    return e < 0 ? -1 : d.edge(e).head;
}

Routes compute_routes(const Deployment& d) {
    const int n = d.num_nodes();
    constexpr int kInf = std::numeric_limits<int>::max();
    Routes r;
    r.hops.assign(static_cast<std::size_t>(n), kInf);
    r.next_edge.assign(static_cast<std::size_t>(n), -1);

    using Item = std::pair<int, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    r.hops[d.gateway()] = 0;
    heap.emplace(0, d.gateway());
    while (!heap.empty()) {
        auto [dist, v] = heap.top();
        heap.pop();
        if (dist != r.hops[v]) continue;
        for (EdgeId e : d.in_edges(v)) {
            const NodeId u = d.edge(e).tail;
            if (dist + 1 < r.hops[u]) {
                r.hops[u] = dist + 1;
                heap.emplace(dist + 1, u);
            }
        }
    }
    for (NodeId v = 0; v < n; ++v) {
        if (v == d.gateway()) continue;
        if (r.hops[v] == kInf) throw InvalidParameters("node has no route to the gateway");
        for (EdgeId e : d.out_edges(v)) {  // ascending edge id
            if (r.hops[d.edge(e).head] == r.hops[v] - 1) {
                r.next_edge[v] = e;
                break;
            }
        }
    }
    return r;
}

int PfTrace::completion_slot() const {
    int last = 0;
    for (int t : delivered_at) {
        if (t == 0) return 0;
        last = std::max(last, t);
    }
    return last;
}

namespace {

struct Packet {
    NodeId source;
    double value;
};

}  // namespace

PfTrace run_pf(const Deployment& d, const Eigen::VectorXd& x, int block_length, double q_max, int t_max) {
    if (t_max < 1) throw InvalidParameters("run_pf: t_max must be at least 1");
    if (x.size() != d.num_nodes()) throw InvalidParameters("run_pf: message length mismatch");
    if (x.cwiseAbs().maxCoeff() > q_max * (1.0 + 1e-12)) throw InvalidParameters("run_pf: |x_v| exceeds q_max");

    const int n = d.num_nodes();
    const NodeId gw = d.gateway();
    const Routes routes = compute_routes(d);

    auto source_quantize = [&](NodeId v) {
        EdgeId e = routes.next_edge[v];
        if (e < 0 && !d.out_edges(v).empty()) e = d.out_edges(v).front();
        const int capacity = e < 0 ? 1 : d.edge(e).capacity;
        const QuantizerSpec q({block_length * capacity}, block_length, q_max);
        return q.quantize(0, x(v));
    };

    PfTrace trace;
    trace.delivered_at.assign(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd estimate = Eigen::VectorXd::Zero(n);
    estimate(gw) = source_quantize(gw);
    trace.delivered_at[gw] = 1;

    std::vector<std::deque<Packet>> queues(static_cast<std::size_t>(d.num_edges()));
    int in_flight = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (v == gw) continue;
        queues[routes.next_edge[v]].push_back({v, source_quantize(v)});
        ++in_flight;
    }
    trace.x_hat.push_back(estimate);
    trace.in_flight.push_back(in_flight);

    std::vector<std::pair<NodeId, Packet>> arrivals;  // (receiving node, packet)
    for (int t = 2; t <= t_max; ++t) {
        // Every edge sends one packet; packets move only after all edges transmitted.
        arrivals.clear();
        for (EdgeId e = 0; e < d.num_edges(); ++e) {
            auto& queue = queues[static_cast<std::size_t>(e)];
            if (queue.empty()) continue;
            arrivals.emplace_back(d.edge(e).head, queue.front());
            queue.pop_front();
        }
        std::sort(arrivals.begin(), arrivals.end(),
                  [](const auto& a, const auto& b) { return a.second.source < b.second.source; });
        for (const auto& [node, packet] : arrivals) {
            if (node == gw) {
                estimate(packet.source) = packet.value;
                trace.delivered_at[packet.source] = t;
                --in_flight;
            } else {
                queues[routes.next_edge[node]].push_back(packet);
            }
        }
        trace.x_hat.push_back(estimate);
        trace.in_flight.push_back(in_flight);
    }
    return trace;
}

int pf_completion_slot(const Deployment& d) {
    // Message values do not influence the schedule.
    const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(d.num_nodes());
    for (int horizon = 2 * d.num_nodes() + 2;; horizon *= 2) {
        const int done = run_pf(d, zeros, 1, 1.0, horizon).completion_slot();
        if (done > 0) return done;
    }
}

}  // namespace qnc
