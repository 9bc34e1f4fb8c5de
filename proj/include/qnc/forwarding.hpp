#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qnc/network.hpp"

namespace qnc {

/// Shortest-hop routes toward the gateway.
struct Routes {
    std::vector<EdgeId> next_edge;  // route edge leaving each node; -1 at the gateway
    std::vector<int> hops;          // hop distance to the gateway

    NodeId next_hop(const Deployment& d, NodeId v) const;
};

/// Dijkstra with unit edge weights on the reversed graph. Among equally short
/// routes the outgoing edge with the lowest id wins.
Routes compute_routes(const Deployment& d);

struct PfTrace {
    std::vector<Eigen::VectorXd> x_hat;  // x_hat[t - 1] = estimate after slot t, t = 1..t_max
    std::vector<int> delivered_at;       // slot index at which each message reached the gateway, 0 if never
    std::vector<int> in_flight;          // in_flight[t - 1] = packets still queued after slot t

    int t_max() const { return static_cast<int>(x_hat.size()); }
    /// First slot after which every message is delivered, or 0.
    int completion_slot() const;
};

/// Packet forwarding baseline.
///
/// Every node quantizes its message at t = 1 with the quantizer of its route
/// edge (L * C_e bits) and queues it on that edge. In every later slot each
/// edge forwards the packet at the head of its FIFO. Packets arriving in the
/// same slot are queued by source id. The gateway knows its own message from
/// t = 1, quantized with its first outgoing edge's resolution (C = 1 if it
/// has none). Undelivered messages are estimated as zero.
PfTrace run_pf(const Deployment& d, const Eigen::VectorXd& x, int block_length, double q_max, int t_max);

/// Slots needed by run_pf to deliver every message.
int pf_completion_slot(const Deployment& d);

}  // namespace qnc
