#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qnc/coding.hpp"
#include "qnc/decoder.hpp"
#include "qnc/network.hpp"
#include "qnc/parallel.hpp"
#include "qnc/rip.hpp"
#include "qnc/source.hpp"

namespace qnc {

struct ExperimentConfig {
    int n = 100;
    std::vector<int> edge_counts{1100, 1400, 1800};
    std::vector<int> L_values = default_block_lengths();
    std::vector<double> sparsity_factors{0.05, 0.15, 0.25};
    std::vector<double> eps_k_ratios{0.0, 0.002, 0.02, 0.2};
    double q_max = 10.0;
    int trials = 20;
    int t_max = 0;  // 0: per deployment, enough for m >= 1.5 n and for PF to finish
    std::uint64_t seed = 1;
    std::string output_path = "records.csv";
    int capacity = 1;
    double alpha_variance = 1.0;
    DecoderOptions decoder{};

    static std::vector<int> default_block_lengths();
    /// Throws InvalidParameters on empty lists or out-of-range values.
    void validate() const;
};

enum class Scenario { qnc, pf };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);

struct ExperimentRecord {
    Scenario scenario = Scenario::qnc;
    int n = 0;
    int edges = 0;
    int L = 0;
    double k_over_n = 0.0;
    double eps_k_ratio = 0.0;
    int trial = 0;
    int t = 0;
    long long delay = 0;  // (t - 1) L
    int m = 0;            // qnc: (t - 1) |In(v0)|; pf: messages known at the gateway
    double err_db = 0.0;
    double eps_rec = std::numeric_limits<double>::quiet_NaN();  // qnc only
};

/// Identifies one (edges, k/n, eps_k ratio, trial) cell for a record batch.
struct RecordContext {
    int n = 0;
    int edges = 0;
    double k_over_n = 0.0;
    double eps_k_ratio = 0.0;
    int trial = 0;
};

/// Horizon used when the config leaves t_max at 0.
int auto_horizon(const Deployment& d);

/// Sparsity k for a sparsity factor: round(k_over_n * n), at least 1.
int sparsity_for(int n, double k_over_n);

/// Seeds for one trial. The deployment and coefficient seeds depend on
/// (edges, trial); the message seed on (trial, k). Block length and eps_k
/// ratio do not enter, so curves for different L or eps_k share networks
/// and message supports.
std::uint64_t deployment_seed(std::uint64_t base, int edges, int trial);
std::uint64_t schedule_seed(std::uint64_t base, int edges, int trial);
std::uint64_t message_seed(std::uint64_t base, int trial, int k);

/// QNC decode at every t in 2..t_max for one block length.
std::vector<ExperimentRecord> qnc_records(const Deployment& d, const CoefficientSchedule& c,
                                          const std::vector<Eigen::MatrixXd>& blocks, const MessageEnsemble& ens,
                                          int block_length, int t_max, const RecordContext& ctx,
                                          const DecoderOptions& opts = {});

/// PF estimates at every t in 1..t_max for one block length.
std::vector<ExperimentRecord> pf_records(const Deployment& d, const MessageEnsemble& ens, int block_length, int t_max,
                                         const RecordContext& ctx);

/// Canonical record order: scenario, edges, L, k/n, eps_k ratio, trial, t.
void sort_records(std::vector<ExperimentRecord>& records);

/// Full sweep. Work is split over (edges, trial) units; output is sorted
/// canonically, so it does not depend on the execution mode or thread count.
std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& cfg, Execution exec = Execution::parallel);

struct AggregateRow {
    Scenario scenario = Scenario::qnc;
    int n = 0;
    int edges = 0;
    int L = 0;
    double k_over_n = 0.0;
    double eps_k_ratio = 0.0;
    int t = 0;
    long long delay = 0;
    int trials = 0;
    double mean_err_db = 0.0;
    double mean_err_linear = 0.0;  // mean of ||x - x_hat||
    double mean_m = 0.0;
};

/// Mean over trials per (scenario, cell, L, t), in canonical order.
std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& records);

struct EnvelopePoint {
    long long delay = 0;
    double err_db = 0.0;
    int L = 0;
    int t = 0;
};

struct EnvelopeCurve {
    Scenario scenario = Scenario::qnc;
    int n = 0;
    int edges = 0;
    double k_over_n = 0.0;
    double eps_k_ratio = 0.0;
    std::vector<EnvelopePoint> points;  // increasing delay, strictly decreasing error

    /// Smallest delay whose averaged error is <= level; -1 if never reached.
    long long delay_for(double level_db) const;
    /// Best averaged error achievable within `delay`; +inf before the first point.
    double error_at(long long delay) const;
    double best_error() const;
};

/// Lower envelope over block lengths of the averaged delay-distortion
/// points, one curve per (scenario, n, edges, k/n, eps_k ratio).
/// Throws EmptyInput on an empty record set.
std::vector<EnvelopeCurve> l_optimized_envelope(const std::vector<ExperimentRecord>& records);
std::vector<EnvelopeCurve> l_optimized_envelope(const std::vector<AggregateRow>& rows);

/// Psi_tot(t_max) draws over fresh alpha coefficients on a fixed deployment.
/// The default skips the per-edge normalization, which is only needed to
/// keep quantizer inputs in range.
MatrixSource qnc_psi_source(const Deployment& d, int t_max, double alpha_variance = 1.0,
                            CoefficientNormalization normalization = CoefficientNormalization::none);

}  // namespace qnc
