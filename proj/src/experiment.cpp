#include "qnc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "qnc/error.hpp"
#include "qnc/forwarding.hpp"
#include "qnc/quantizer.hpp"
#include "qnc/rng.hpp"

namespace qnc {

std::vector<int> ExperimentConfig::default_block_lengths() {
    std::vector<int> out(40);
    std::iota(out.begin(), out.end(), 1);
    return out;
}

void ExperimentConfig::validate() const {
    if (n < 2) throw InvalidParameters("n must be at least 2");
    if (edge_counts.empty() || L_values.empty() || sparsity_factors.empty() || eps_k_ratios.empty())
        throw InvalidParameters("parameter lists must be non-empty");
    if (trials < 1) throw InvalidParameters("trials must be at least 1");
    if (t_max != 0 && t_max < 2) throw InvalidParameters("t_max must be 0 (auto) or at least 2");
    if (!(q_max > 0.0)) throw InvalidParameters("q_max must be positive");
    if (capacity < 1) throw InvalidParameters("capacity must be positive");
    if (!(alpha_variance > 0.0)) throw InvalidParameters("alpha_variance must be positive");
    if (!(decoder.rel_gap > 0.0) || !(decoder.feas_tol >= 0.0) || decoder.max_iterations < 1)
        throw InvalidParameters("decoder tolerances must be positive");
    for (int e : edge_counts)
        if (e < 1 || static_cast<long long>(e) > static_cast<long long>(n) * (n - 1))
            throw InvalidParameters("edge count " + std::to_string(e) + " is not in [1, n(n-1)]");
    for (int L : L_values)
        if (L < 1 || L * capacity > QuantizerSpec::kMaxBitsPerBlock)
            throw InvalidParameters("block length " + std::to_string(L) + " out of range");
    for (double f : sparsity_factors)
        if (!(f > 0.0 && f <= 1.0)) throw InvalidParameters("sparsity factors must lie in (0, 1]");
    for (double r : eps_k_ratios)
        if (!(r >= 0.0)) throw InvalidParameters("eps_k ratios must be non-negative");
}

std::string_view to_string(Scenario s) { return s == Scenario::qnc ? "qnc" : "pf"; }

Scenario scenario_from_string(std::string_view s) {
    if (s == "qnc") return Scenario::qnc;
    if (s == "pf") return Scenario::pf;
    throw InvalidParameters("unknown scenario '" + std::string(s) + "'");
}

int auto_horizon(const Deployment& d) {
    const auto in = static_cast<int>(d.in_edges(d.gateway()).size());
    const int full_rank = 1 + (3 * d.num_nodes() + 2 * in - 1) / (2 * in);  // 1 + ceil(1.5 n / |In(v0)|)
    return std::max({2, full_rank, pf_completion_slot(d)});
}

int sparsity_for(int n, double k_over_n) {
    return std::clamp(static_cast<int>(std::lround(k_over_n * n)), 1, n);
}

namespace {

constexpr std::uint64_t kDeploymentTag = 0xde;
constexpr std::uint64_t kScheduleTag = 0x5c;
constexpr std::uint64_t kMessageTag = 0x3e;

}  // namespace

std::uint64_t deployment_seed(std::uint64_t base, int edges, int trial) {
    return derive_seed(base, {kDeploymentTag, static_cast<std::uint64_t>(edges), static_cast<std::uint64_t>(trial)});
}

std::uint64_t schedule_seed(std::uint64_t base, int edges, int trial) {
    return derive_seed(base, {kScheduleTag, static_cast<std::uint64_t>(edges), static_cast<std::uint64_t>(trial)});
}

std::uint64_t message_seed(std::uint64_t base, int trial, int k) {
    return derive_seed(base, {kMessageTag, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(k)});
}

std::vector<ExperimentRecord> qnc_records(const Deployment& d, const CoefficientSchedule& c,
                                          const std::vector<Eigen::MatrixXd>& blocks, const MessageEnsemble& ens,
                                          int block_length, int t_max, const RecordContext& ctx,
                                          const DecoderOptions& opts) {
    const QuantizerSpec q(d, block_length, ens.q_max);
    const QncTrace trace = run_qnc(d, c, q, ens.x, t_max);
    const auto eps = eps_rec_profile(d, c, q.steps(), t_max);
    const Eigen::MatrixXd theta_full = stack_psi(blocks, t_max) * ens.phi;
    const Eigen::Index per_block = blocks.front().rows();

    std::vector<ExperimentRecord> out;
    out.reserve(static_cast<std::size_t>(t_max - 1));
    for (int t = 2; t <= t_max; ++t) {
        const Eigen::Index m = per_block * (t - 1);
        const double radius = eps[static_cast<std::size_t>(t - 2)];
        DecodeResult res = l1_minimize(theta_full.topRows(m), trace.z_tot(t), radius, opts);
        if (res.status == DecodeStatus::infeasible)
            throw Error("QNC decode infeasible at t=" + std::to_string(t) + " (trial " + std::to_string(ctx.trial) +
                        ", edges " + std::to_string(ctx.edges) + ")");
        const Eigen::VectorXd x_hat = ens.phi * res.s_hat;
        ExperimentRecord r;
        r.scenario = Scenario::qnc;
        r.n = ctx.n;
        r.edges = ctx.edges;
        r.L = block_length;
        r.k_over_n = ctx.k_over_n;
        r.eps_k_ratio = ctx.eps_k_ratio;
        r.trial = ctx.trial;
        r.t = t;
        r.delay = static_cast<long long>(t - 1) * block_length;
        r.m = static_cast<int>(m);
        r.err_db = error_db(ens.x, x_hat);
        r.eps_rec = radius;
        out.push_back(r);
    }
    return out;
}

std::vector<ExperimentRecord> pf_records(const Deployment& d, const MessageEnsemble& ens, int block_length, int t_max,
                                         const RecordContext& ctx) {
    const PfTrace trace = run_pf(d, ens.x, block_length, ens.q_max, t_max);
    std::vector<ExperimentRecord> out;
    out.reserve(static_cast<std::size_t>(t_max));
    for (int t = 1; t <= t_max; ++t) {
        ExperimentRecord r;
        r.scenario = Scenario::pf;
        r.n = ctx.n;
        r.edges = ctx.edges;
        r.L = block_length;
        r.k_over_n = ctx.k_over_n;
        r.eps_k_ratio = ctx.eps_k_ratio;
        r.trial = ctx.trial;
        r.t = t;
        r.delay = static_cast<long long>(t - 1) * block_length;
        r.m = static_cast<int>(std::count_if(trace.delivered_at.begin(), trace.delivered_at.end(),
                                             [t](int at) { return at > 0 && at <= t; }));
        r.err_db = error_db(ens.x, trace.x_hat[static_cast<std::size_t>(t - 1)]);
        out.push_back(r);
    }
    return out;
}

namespace {

auto record_key(const ExperimentRecord& r) {
    return std::make_tuple(static_cast<int>(r.scenario), r.n, r.edges, r.L, r.k_over_n, r.eps_k_ratio, r.trial, r.t);
}

// All records for one (edges, trial) unit.
std::vector<ExperimentRecord> run_unit(const ExperimentConfig& cfg, int edges, int trial) {
    const Deployment d = generate_deployment(cfg.n, edges, deployment_seed(cfg.seed, edges, trial), cfg.capacity);
    const CoefficientSchedule c = design_coefficients(d, schedule_seed(cfg.seed, edges, trial), cfg.alpha_variance);
    const int t_max = cfg.t_max > 0 ? cfg.t_max : auto_horizon(d);
    const auto blocks = marginal_psi(d, c, t_max, Execution::serial);

    std::vector<ExperimentRecord> out;
    for (double k_over_n : cfg.sparsity_factors) {
        const int k = sparsity_for(cfg.n, k_over_n);
        for (double ratio : cfg.eps_k_ratios) {
            const MessageEnsemble ens = generate_messages(cfg.n, k, ratio, cfg.q_max, message_seed(cfg.seed, trial, k));
            const RecordContext ctx{cfg.n, edges, k_over_n, ratio, trial};
            for (int L : cfg.L_values) {
                auto q = qnc_records(d, c, blocks, ens, L, t_max, ctx, cfg.decoder);
                auto p = pf_records(d, ens, L, t_max, ctx);
                out.insert(out.end(), q.begin(), q.end());
                out.insert(out.end(), p.begin(), p.end());
            }
        }
    }
    return out;
}

}  // namespace

void sort_records(std::vector<ExperimentRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const ExperimentRecord& a, const ExperimentRecord& b) { return record_key(a) < record_key(b); });
}

std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& cfg, Execution exec) {
    cfg.validate();
    std::vector<std::pair<int, int>> units;
    for (int edges : cfg.edge_counts)
        for (int trial = 0; trial < cfg.trials; ++trial) units.emplace_back(edges, trial);

    std::vector<std::vector<ExperimentRecord>> results(units.size());
    std::vector<std::string> failures(units.size());
    auto work = [&](std::size_t i) {
        try {
            results[i] = run_unit(cfg, units[i].first, units[i].second);
        } catch (const std::exception& ex) {
            failures[i] = "edges=" + std::to_string(units[i].first) + " trial=" + std::to_string(units[i].second) +
                          ": " + ex.what();
        }
    };
    const auto count = static_cast<long long>(units.size());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < count; ++i) work(static_cast<std::size_t>(i));
    } else {
        for (long long i = 0; i < count; ++i) work(static_cast<std::size_t>(i));
    }
    for (const auto& f : failures)
        if (!f.empty()) throw Error("sweep failed at " + f);

    std::vector<ExperimentRecord> out;
    for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
    sort_records(out);
    return out;
}

std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records) {
    using Key = std::tuple<int, int, int, int, double, double, int>;
    std::map<Key, AggregateRow> groups;
    for (const auto& r : records) {
        const Key key{static_cast<int>(r.scenario), r.n, r.edges, r.L, r.k_over_n, r.eps_k_ratio, r.t};
        auto [it, inserted] = groups.try_emplace(key);
        AggregateRow& row = it->second;
        if (inserted) {
            row.scenario = r.scenario;
            row.n = r.n;
            row.edges = r.edges;
            row.L = r.L;
            row.k_over_n = r.k_over_n;
            row.eps_k_ratio = r.eps_k_ratio;
            row.t = r.t;
            row.delay = r.delay;
        }
        ++row.trials;
        row.mean_err_db += r.err_db;
        row.mean_err_linear += std::pow(10.0, r.err_db / 20.0);
        row.mean_m += r.m;
    }
    std::vector<AggregateRow> out;
    out.reserve(groups.size());
    for (auto& [key, row] : groups) {
        row.mean_err_db /= row.trials;
        row.mean_err_linear /= row.trials;
        row.mean_m /= row.trials;
        out.push_back(row);
    }
    return out;
}

long long EnvelopeCurve::delay_for(double level_db) const {
    for (const auto& p : points)
        if (p.err_db <= level_db) return p.delay;
    return -1;
}

double EnvelopeCurve::error_at(long long delay) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        if (p.delay > delay) break;
        best = p.err_db;
    }
    return best;
}

double EnvelopeCurve::best_error() const {
    return points.empty() ? std::numeric_limits<double>::infinity() : points.back().err_db;
}

std::vector<EnvelopeCurve> l_optimized_envelope(const std::vector<AggregateRow>& rows) {
    if (rows.empty()) throw EmptyInput("envelope: no records");
    using Key = std::tuple<int, int, int, double, double>;
    std::map<Key, std::vector<const AggregateRow*>> groups;
    for (const auto& r : rows)
        groups[{static_cast<int>(r.scenario), r.n, r.edges, r.k_over_n, r.eps_k_ratio}].push_back(&r);

    std::vector<EnvelopeCurve> out;
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(), [](const AggregateRow* a, const AggregateRow* b) {
            return std::tie(a->delay, a->mean_err_db, a->L) < std::tie(b->delay, b->mean_err_db, b->L);
        });
        EnvelopeCurve curve;
        curve.scenario = members.front()->scenario;
        curve.n = members.front()->n;
        curve.edges = members.front()->edges;
        curve.k_over_n = members.front()->k_over_n;
        curve.eps_k_ratio = members.front()->eps_k_ratio;
        double best = std::numeric_limits<double>::infinity();
        for (const AggregateRow* r : members) {
            if (r->mean_err_db < best) {
                best = r->mean_err_db;
                curve.points.push_back({r->delay, r->mean_err_db, r->L, r->t});
            }
        }
        out.push_back(std::move(curve));
    }
    return out;
}

std::vector<EnvelopeCurve> l_optimized_envelope(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) throw EmptyInput("envelope: no records");
    return l_optimized_envelope(aggregate(records));
}

MatrixSource qnc_psi_source(const Deployment& d, int t_max, double alpha_variance,
                            CoefficientNormalization normalization) {
    return [d, t_max, alpha_variance, normalization](std::uint64_t seed) {
        const CoefficientSchedule c = design_coefficients(d, seed, alpha_variance, normalization);
        return build_psi_tot(d, c, t_max, Execution::serial);
    };
}

}  // namespace qnc
