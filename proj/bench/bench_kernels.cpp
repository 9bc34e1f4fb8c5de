// Serial vs OpenMP timings for the parallel kernels. Each pair is also
// checked for identical output.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "qnc/coding.hpp"
#include "qnc/experiment.hpp"
#include "qnc/parallel.hpp"
#include "qnc/rip.hpp"

using namespace qnc;

namespace {

template <class Fn>
double best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-14s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  outputs %s\n", name, serial, parallel,
                serial / parallel, same ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("threads: %d\n", max_threads());
    bool all_same = true;

    {
        const Deployment d = generate_deployment(100, 1800, 1);
        const auto c = design_coefficients(d, 2);
        std::vector<Eigen::MatrixXd> s, p;
        const double ts = best_of(reps, [&] { s = marginal_psi(d, c, 30, Execution::serial); });
        const double tp = best_of(reps, [&] { p = marginal_psi(d, c, 30, Execution::parallel); });
        bool same = s.size() == p.size();
        for (std::size_t i = 0; same && i < s.size(); ++i) same = (s[i] - p[i]).norm() == 0.0;
        report("marginal_psi", ts, tp, same);
        all_same = all_same && same;
    }
    {
        const Deployment d = generate_deployment(100, 1400, 3);
        const int t_max = auto_horizon(d);
        const auto in = static_cast<int>(d.in_edges(d.gateway()).size());
        TailQuery q;
        for (int t = 2; t <= t_max; ++t) q.row_counts.push_back((t - 1) * in);
        q.epsilons = {0.1, 0.2};
        q.num_matrix_draws = 100;
        q.num_vector_draws = 8;
        q.num_pilot_draws = 50;
        q.normalization = TailNormalization::empirical_columns;
        q.seed = 4;
        std::vector<TailProbEstimate> s, p;
        const MatrixSource src = qnc_psi_source(d, t_max);
        const double ts = best_of(reps, [&] { s = estimate_tail_probability(src, q, Execution::serial); });
        const double tp = best_of(reps, [&] { p = estimate_tail_probability(src, q, Execution::parallel); });
        bool same = s.size() == p.size();
        for (std::size_t i = 0; same && i < s.size(); ++i) same = s[i].prob == p[i].prob;
        report("tail_estimate", ts, tp, same);
        all_same = all_same && same;
    }
    {
        ExperimentConfig cfg;
        cfg.n = 40;
        cfg.edge_counts = {200, 300};
        cfg.L_values = {4, 12};
        cfg.sparsity_factors = {0.1};
        cfg.eps_k_ratios = {0.0};
        cfg.trials = 4;
        std::vector<ExperimentRecord> s, p;
        const double ts = best_of(reps, [&] { s = run_sweep(cfg, Execution::serial); });
        const double tp = best_of(reps, [&] { p = run_sweep(cfg, Execution::parallel); });
        bool same = s.size() == p.size();
        for (std::size_t i = 0; same && i < s.size(); ++i) same = s[i].err_db == p[i].err_db && s[i].t == p[i].t;
        report("run_sweep", ts, tp, same);
        all_same = all_same && same;
    }
    return all_same ? 0 : 1;
}
