#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qnc/error.hpp"
#include "qnc/experiment.hpp"
#include "qnc/forwarding.hpp"
#include "qnc/io.hpp"

using namespace qnc;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.n = 16;
    cfg.edge_counts = {70};
    cfg.L_values = {6};
    cfg.sparsity_factors = {0.125};
    cfg.eps_k_ratios = {0.0};
    cfg.trials = 1;
    cfg.t_max = 6;
    cfg.seed = 3;
    return cfg;
}

ExperimentRecord rec(Scenario s, int L, int trial, int t, double err) {
    ExperimentRecord r;
    r.scenario = s;
    r.n = 10;
    r.edges = 30;
    r.L = L;
    r.k_over_n = 0.1;
    r.trial = trial;
    r.t = t;
    r.delay = static_cast<long long>(t - 1) * L;
    r.m = t;
    r.err_db = err;
    return r;
}

}  // namespace

TEST_CASE("single cell record counts and fields") {
    const ExperimentConfig cfg = small_config();
    const auto records = run_sweep(cfg);
    int qnc = 0, pf = 0;
    for (const auto& r : records) {
        CHECK(r.delay == static_cast<long long>(r.t - 1) * r.L);
        CHECK(r.n == 16);
        CHECK(r.edges == 70);
        if (r.scenario == Scenario::qnc) {
            ++qnc;
            CHECK(r.t >= 2);
            CHECK(r.eps_rec > 0.0);
        } else {
            ++pf;
            CHECK(r.t >= 1);
            CHECK(std::isnan(r.eps_rec));
        }
    }
    CHECK(qnc == cfg.t_max - 1);
    CHECK(pf == cfg.t_max);

    const Deployment d = generate_deployment(cfg.n, 70, deployment_seed(cfg.seed, 70, 0));
    const int in = static_cast<int>(d.in_edges(d.gateway()).size());
    for (const auto& r : records)
        if (r.scenario == Scenario::qnc) CHECK(r.m == (r.t - 1) * in);
}

TEST_CASE("sweep size scales with every list") {
    ExperimentConfig cfg = small_config();
    cfg.L_values = {3, 8};
    cfg.eps_k_ratios = {0.0, 0.2};
    cfg.trials = 2;
    const auto records = run_sweep(cfg);
    CHECK(records.size() == static_cast<std::size_t>(2 * 2 * 2 * (cfg.t_max - 1 + cfg.t_max)));
}

TEST_CASE("sweep output is reproducible and independent of execution mode") {
    ExperimentConfig cfg = small_config();
    cfg.trials = 3;
    cfg.L_values = {4, 10};
    std::ostringstream a, b, c;
    write_records_csv(a, run_sweep(cfg, Execution::parallel));
    write_records_csv(b, run_sweep(cfg, Execution::parallel));
    write_records_csv(c, run_sweep(cfg, Execution::serial));
    CHECK(a.str() == b.str());
    CHECK(a.str() == c.str());
    cfg.seed = 4;
    std::ostringstream d;
    write_records_csv(d, run_sweep(cfg));
    CHECK(a.str() != d.str());
}

TEST_CASE("pf records never get worse with t") {
    ExperimentConfig cfg = small_config();
    cfg.trials = 3;
    cfg.t_max = 0;
    const auto records = run_sweep(cfg);
    double prev = 0.0;
    int prev_trial = -1;
    for (const auto& r : records) {
        if (r.scenario != Scenario::pf) continue;
        if (r.trial == prev_trial) CHECK(r.err_db <= prev + 1e-12);
        prev = r.err_db;
        prev_trial = r.trial;
    }
}

TEST_CASE("auto horizon covers full rank and pf completion") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Deployment d = generate_deployment(30, 150, s);
        const int t = auto_horizon(d);
        const auto in = static_cast<int>(d.in_edges(d.gateway()).size());
        CHECK((t - 1) * in >= 45);
        CHECK(t >= pf_completion_slot(d));
    }
}

TEST_CASE("seeds and sparsity helpers") {
    CHECK(sparsity_for(100, 0.05) == 5);
    CHECK(sparsity_for(100, 0.001) == 1);
    CHECK(sparsity_for(10, 0.25) == 3);
    CHECK(deployment_seed(1, 100, 0) != deployment_seed(1, 100, 1));
    CHECK(deployment_seed(1, 100, 0) != schedule_seed(1, 100, 0));
    CHECK(message_seed(1, 0, 5) != message_seed(1, 0, 6));
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(ExperimentConfig{}.validate());
    ExperimentConfig cfg;
    CHECK(cfg.L_values.size() == 40);
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
    cfg = {};
    cfg.edge_counts = {};
    CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
    cfg = {};
    cfg.edge_counts = {100 * 99 + 1};
    CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
    cfg = {};
    cfg.L_values = {53};
    CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
    cfg = {};
    cfg.t_max = 1;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
    cfg = {};
    cfg.sparsity_factors = {0.0};
    CHECK_THROWS_AS(cfg.validate(), InvalidParameters);
    CHECK_THROWS_AS(run_sweep(cfg), InvalidParameters);
}

TEST_CASE("aggregate arithmetic") {
    std::vector<ExperimentRecord> rs{rec(Scenario::qnc, 5, 0, 2, -20.0), rec(Scenario::qnc, 5, 1, 2, -40.0),
                                     rec(Scenario::qnc, 5, 0, 3, -30.0), rec(Scenario::pf, 5, 0, 2, -6.0)};
    const auto rows = aggregate(rs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].scenario == Scenario::qnc);
    CHECK(rows[0].t == 2);
    CHECK(rows[0].trials == 2);
    CHECK(rows[0].mean_err_db == doctest::Approx(-30.0));
    CHECK(rows[0].mean_err_linear == doctest::Approx((0.1 + 0.01) / 2));
    CHECK(rows[0].mean_m == doctest::Approx(2.0));
    CHECK(rows[1].mean_err_db == -30.0);
    CHECK(rows[1].trials == 1);
    CHECK(rows[2].scenario == Scenario::pf);

    std::vector<ExperimentRecord> same{rec(Scenario::qnc, 5, 0, 2, -17.0), rec(Scenario::qnc, 5, 1, 2, -17.0)};
    CHECK(aggregate(same)[0].mean_err_db == doctest::Approx(-17.0));
}

TEST_CASE("envelope") {
    CHECK_THROWS_AS(l_optimized_envelope(std::vector<ExperimentRecord>{}), EmptyInput);

    // single L: the envelope is the curve itself
    std::vector<ExperimentRecord> one;
    const double errs[] = {-5, -10, -12, -20};
    for (int t = 2; t <= 5; ++t) one.push_back(rec(Scenario::qnc, 3, 0, t, errs[t - 2]));
    auto env = l_optimized_envelope(one);
    REQUIRE(env.size() == 1);
    REQUIRE(env[0].points.size() == 4);
    for (int t = 2; t <= 5; ++t) {
        CHECK(env[0].points[static_cast<std::size_t>(t - 2)].delay == 3 * (t - 1));
        CHECK(env[0].points[static_cast<std::size_t>(t - 2)].err_db == errs[t - 2]);
    }
    CHECK(env[0].delay_for(-11.0) == 9);
    CHECK(env[0].delay_for(-50.0) == -1);
    CHECK(env[0].error_at(2) == std::numeric_limits<double>::infinity());
    CHECK(env[0].error_at(7) == -10.0);
    CHECK(env[0].best_error() == -20.0);

    // L = 2 dominates L = 4 at every quality level
    std::vector<ExperimentRecord> two;
    for (int t = 2; t <= 6; ++t) {
        two.push_back(rec(Scenario::qnc, 2, 0, t, -10.0 * (t - 1)));
        two.push_back(rec(Scenario::qnc, 4, 0, t, -4.0 * (t - 1)));
    }
    env = l_optimized_envelope(two);
    REQUIRE(env.size() == 1);
    CHECK(env[0].points.size() == 5);
    for (const auto& p : env[0].points) CHECK(p.L == 2);

    // scenarios get separate curves
    two.push_back(rec(Scenario::pf, 2, 0, 1, 0.0));
    CHECK(l_optimized_envelope(two).size() == 2);
}

TEST_CASE("qnc psi source draws differ only in alpha") {
    const Deployment d = generate_deployment(12, 50, 2);
    const auto src = qnc_psi_source(d, 4);
    const Eigen::MatrixXd a = src(1), b = src(2), a2 = src(1);
    CHECK(a.rows() == 3 * static_cast<long>(d.in_edges(d.gateway()).size()));
    CHECK(a.cols() == 12);
    CHECK((a - a2).norm() == 0.0);
    CHECK((a - b).norm() > 0.0);
}
