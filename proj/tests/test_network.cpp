#include <doctest.h>

#include <algorithm>
#include <set>

#include "qnc/error.hpp"
#include "qnc/network.hpp"

using namespace qnc;

namespace {

Deployment chain(int n) {
    // 0 -> 1 -> ... -> n-1, gateway n-1
    std::vector<Edge> edges;
    for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, 1});
    return Deployment(n, edges, n - 1);
}

}  // namespace

TEST_CASE("constructor sorts edges lexicographically") {
    Deployment d(3, {{2, 0, 1}, {1, 0, 1}, {1, 2, 1}}, 0);
    REQUIRE(d.num_edges() == 3);
    CHECK(d.edge(0).tail == 1);
    CHECK(d.edge(0).head == 0);
    CHECK(d.edge(1).tail == 1);
    CHECK(d.edge(1).head == 2);
    CHECK(d.edge(2).tail == 2);
}

TEST_CASE("constructor rejects malformed edge sets") {
    CHECK_THROWS_AS(Deployment(3, {{0, 0, 1}, {1, 0, 1}, {2, 0, 1}}, 0), InvalidParameters);
    CHECK_THROWS_AS(Deployment(3, {{1, 0, 1}, {1, 0, 1}, {2, 0, 1}}, 0), InvalidParameters);
    CHECK_THROWS_AS(Deployment(3, {{1, 0, 0}, {2, 0, 1}}, 0), InvalidParameters);
    CHECK_THROWS_AS(Deployment(3, {{1, 0, 1}, {0, 2, 1}}, 0), InvalidParameters);  // 2 cannot reach 0
    CHECK_THROWS_AS(Deployment(3, {{1, 5, 1}}, 0), InvalidParameters);
    CHECK_THROWS_AS(Deployment(2, {{1, 0, 1}}, 2), InvalidParameters);
}

TEST_CASE("chain in and out edges") {
    const Deployment d = chain(4);
    CHECK(d.in_edges(0).empty());
    CHECK(d.out_edges(3).empty());
    for (int v = 1; v < 4; ++v) {
        REQUIRE(d.in_edges(v).size() == 1);
        CHECK(d.edge(d.in_edges(v)[0]).head == v);
    }
    for (int v = 0; v < 3; ++v) {
        REQUIRE(d.out_edges(v).size() == 1);
        CHECK(d.edge(d.out_edges(v)[0]).tail == v);
    }
}

TEST_CASE("generate_deployment validates its arguments") {
    CHECK_THROWS_AS(generate_deployment(1, 0, 1), InvalidParameters);
    CHECK_THROWS_AS(generate_deployment(5, 21, 1), InvalidParameters);  // more than n(n-1)
    CHECK_THROWS_AS(generate_deployment(5, 3, 1), NonConvergence);      // fewer than n-1 edges never connects
    CHECK_NOTHROW(generate_deployment(5, 20, 1));
}

TEST_CASE("n = 2 has one connected edge set per gateway") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Deployment d = generate_deployment(2, 1, seed);
        REQUIRE(d.num_edges() == 1);
        CHECK(d.edge(0).head == d.gateway());
        CHECK(d.edge(0).tail == 1 - d.gateway());
    }
}

TEST_CASE("generated deployments satisfy the structural invariants") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const int n = 5 + static_cast<int>(seed % 20);
        const int e = std::min(n * (n - 1), 2 * n + static_cast<int>(seed));
        const Deployment d = generate_deployment(n, e, seed, 2);
        CHECK(d.num_edges() == e);
        CHECK(d.seed() == seed);
        std::set<std::pair<int, int>> pairs;
        std::size_t in_total = 0, out_total = 0;
        for (int v = 0; v < n; ++v) {
            in_total += d.in_edges(v).size();
            out_total += d.out_edges(v).size();
        }
        CHECK(in_total == static_cast<std::size_t>(e));
        CHECK(out_total == static_cast<std::size_t>(e));
        for (int i = 0; i < e; ++i) {
            const Edge& ed = d.edge(i);
            CHECK(ed.tail != ed.head);
            CHECK(ed.capacity == 2);
            pairs.insert({ed.tail, ed.head});
            if (i > 0) {
                const Edge& prev = d.edge(i - 1);
                CHECK(std::make_pair(prev.tail, prev.head) < std::make_pair(ed.tail, ed.head));
            }
        }
        CHECK(pairs.size() == static_cast<std::size_t>(e));
        CHECK(all_reach_gateway(n, d.edges(), d.gateway()));
    }
}

TEST_CASE("generation is deterministic in the seed") {
    const Deployment a = generate_deployment(30, 120, 99);
    const Deployment b = generate_deployment(30, 120, 99);
    const Deployment c = generate_deployment(30, 120, 100);
    REQUIRE(a.num_edges() == b.num_edges());
    bool same_ab = a.gateway() == b.gateway(), same_ac = a.gateway() == c.gateway();
    for (int i = 0; i < a.num_edges(); ++i) {
        same_ab = same_ab && a.edge(i).tail == b.edge(i).tail && a.edge(i).head == b.edge(i).head;
        same_ac = same_ac && a.edge(i).tail == c.edge(i).tail && a.edge(i).head == c.edge(i).head;
    }
    CHECK(same_ab);
    CHECK_FALSE(same_ac);
}

TEST_CASE("gateway selector picks incoming edges and has orthonormal rows") {
    const Deployment d = generate_deployment(20, 80, 5);
    const auto b = build_gateway_selector(d);
    const auto in = d.in_edges(d.gateway());
    REQUIRE(b.rows() == static_cast<long>(in.size()));
    REQUIRE(b.cols() == d.num_edges());
    const Eigen::MatrixXd bd(b);
    CHECK((bd * bd.transpose() - Eigen::MatrixXd::Identity(b.rows(), b.rows())).norm() == 0.0);
    for (std::size_t r = 0; r < in.size(); ++r) CHECK(bd(static_cast<long>(r), in[r]) == 1.0);
    CHECK(bd.sum() == doctest::Approx(static_cast<double>(in.size())));
}
