// qnc_cli: deployments, single QNC/PF runs, sweeps, tail probabilities and envelopes.
//
// Exit status: 0 success, 1 invalid configuration or arguments, 2 runtime failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qnc/coding.hpp"
#include "qnc/error.hpp"
#include "qnc/experiment.hpp"
#include "qnc/forwarding.hpp"
#include "qnc/io.hpp"
#include "qnc/rip.hpp"
#include "qnc/rng.hpp"

using namespace qnc;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

// Writes to `path`, or stdout for "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    fn(out);
    if (!out) throw Error("write failed: " + path);
}

struct NetworkArgs {
    std::string deployment_path;
    int n = 100;
    int edges = 1400;
    int capacity = 1;
    std::uint64_t seed = 1;

    void add(CLI::App* app) {
        app->add_option("--deployment", deployment_path, "Deployment JSON; otherwise one is generated from --n, --edges, --seed");
        app->add_option("--n", n, "Node count");
        app->add_option("--edges", edges, "Edge count");
        app->add_option("--capacity", capacity, "Bits per channel use on every edge");
        app->add_option("--seed", seed, "Base seed");
    }

    Deployment load() const {
        if (!deployment_path.empty()) return deployment_from_json(read_json_file(deployment_path));
        return generate_deployment(n, edges, deployment_seed(seed, edges, 0), capacity);
    }
};

struct MessageArgs {
    double k_over_n = 0.05;
    double eps_k_ratio = 0.0;
    double q_max = 10.0;
    int L = 20;
    int t_max = 0;

    void add(CLI::App* app) {
        app->add_option("--k-over-n", k_over_n, "Sparsity factor k/n");
        app->add_option("--eps-k-ratio", eps_k_ratio, "l1 tail of the messages relative to ||s_k||_1");
        app->add_option("--q-max", q_max, "Message and quantizer range");
        app->add_option("--L", L, "Block length");
        app->add_option("--t-max", t_max, "Last time slot (0: automatic)");
    }
};

int run_deploy(const NetworkArgs& net, const std::string& out) {
    const Deployment d = net.load();
    if (out == "-")
        std::cout << to_json(d).dump(2) << '\n';
    else
        write_json_file(out, to_json(d));
    std::cerr << "deployment: n=" << d.num_nodes() << " edges=" << d.num_edges() << " gateway=" << d.gateway() + 1
              << " |In(v0)|=" << d.in_edges(d.gateway()).size() << '\n';
    return 0;
}

int run_single(Scenario scenario, const NetworkArgs& net, const MessageArgs& msg, const std::string& out,
               const std::string& messages_out) {
    const Deployment d = net.load();
    const int n = d.num_nodes();
    const int k = sparsity_for(n, msg.k_over_n);
    const MessageEnsemble ens = generate_messages(n, k, msg.eps_k_ratio, msg.q_max, message_seed(net.seed, 0, k));
    const int t_max = msg.t_max > 0 ? msg.t_max : auto_horizon(d);
    if (t_max < 2) throw InvalidParameters("t_max must be at least 2");
    const RecordContext ctx{n, d.num_edges(), msg.k_over_n, msg.eps_k_ratio, 0};

    std::vector<ExperimentRecord> records;
    if (scenario == Scenario::qnc) {
        const auto c = design_coefficients(d, schedule_seed(net.seed, d.num_edges(), 0));
        records = qnc_records(d, c, marginal_psi(d, c, t_max), ens, msg.L, t_max, ctx);
    } else {
        records = pf_records(d, ens, msg.L, t_max, ctx);
    }
    with_output(out, [&](std::ostream& os) { write_records_csv(os, records); });
    if (!messages_out.empty()) write_json_file(messages_out, to_json(ens));
    return 0;
}

struct SweepArgs {
    std::string config_path;
    ExperimentConfig cfg;
    std::string aggregate_path;
    std::string envelope_path;
    bool serial = false;

    void add(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config; its fields override the flags");
        app->add_option("--n", cfg.n, "Node count");
        app->add_option("--edge-counts", cfg.edge_counts, "Edge counts")->delimiter(',');
        app->add_option("--L-values", cfg.L_values, "Block lengths")->delimiter(',');
        app->add_option("--sparsity-factors", cfg.sparsity_factors, "k/n values")->delimiter(',');
        app->add_option("--eps-k-ratios", cfg.eps_k_ratios, "eps_k ratios")->delimiter(',');
        app->add_option("--q-max", cfg.q_max, "Message and quantizer range");
        app->add_option("--trials", cfg.trials, "Trials per cell");
        app->add_option("--t-max", cfg.t_max, "Last time slot (0: automatic per deployment)");
        app->add_option("--seed", cfg.seed, "Base seed");
        app->add_option("--output-path,-o", cfg.output_path, "Records CSV");
        app->add_option("--capacity", cfg.capacity, "Bits per channel use on every edge");
        app->add_option("--alpha-variance", cfg.alpha_variance, "Variance of the alpha coefficients");
        app->add_option("--aggregate", aggregate_path, "Also write per-t means to this CSV");
        app->add_option("--envelope", envelope_path, "Also write the L-optimized envelope to this CSV");
        app->add_flag("--serial", serial, "Run trials on one thread");
    }
};

int run_sweep_cmd(SweepArgs& args) {
    ExperimentConfig cfg = args.cfg;
    if (!args.config_path.empty()) cfg = config_from_json(read_json_file(args.config_path), cfg);
    cfg.validate();
    const auto records = run_sweep(cfg, args.serial ? Execution::serial : Execution::parallel);
    with_output(cfg.output_path, [&](std::ostream& os) { write_records_csv(os, records); });
    if (!args.aggregate_path.empty() || !args.envelope_path.empty()) {
        const auto rows = aggregate(records);
        if (!args.aggregate_path.empty())
            with_output(args.aggregate_path, [&](std::ostream& os) { write_aggregate_csv(os, rows); });
        if (!args.envelope_path.empty())
            with_output(args.envelope_path,
                        [&](std::ostream& os) { write_envelope_csv(os, l_optimized_envelope(rows)); });
    }
    std::cerr << records.size() << " records from " << cfg.trials << " trials per cell\n";
    return 0;
}

struct RipArgs {
    int n = 100;
    std::vector<int> edge_counts{1100, 1400, 1800};
    std::vector<double> deltas{0.1, 0.2, 0.3, 0.4};
    int draws = 1000;
    int vector_draws = 32;
    int pilot_draws = 200;
    int t_max = 0;
    std::uint64_t seed = 1;
    std::string out = "-";

    void add(CLI::App* app) {
        app->add_option("--n", n, "Node count");
        app->add_option("--edge-counts", edge_counts, "Edge counts")->delimiter(',');
        app->add_option("--deltas", deltas, "RIP constants; epsilon = delta / sqrt 2")->delimiter(',');
        app->add_option("--draws", draws, "Matrix draws per estimate");
        app->add_option("--vector-draws", vector_draws, "Random dense and 2-sparse candidates");
        app->add_option("--pilot-draws", pilot_draws, "Draws used to normalize QNC columns");
        app->add_option("--t-max", t_max, "Last time slot (0: automatic)");
        app->add_option("--seed", seed, "Base seed");
        app->add_option("--output,-o", out, "Tail CSV");
    }
};

int run_rip(const RipArgs& a) {
    if (a.draws < 1 || a.vector_draws < 0 || a.pilot_draws < 1) throw InvalidParameters("draw counts must be positive");
    std::vector<double> epsilons;
    for (double d : a.deltas) {
        if (!(d > 0.0 && d < 1.0)) throw InvalidParameters("deltas must lie in (0, 1)");
        epsilons.push_back(d / std::sqrt(2.0));
    }
    std::vector<TailRow> rows;
    for (int edges : a.edge_counts) {
        const Deployment d = generate_deployment(a.n, edges, deployment_seed(a.seed, edges, 0));
        const int t_max = a.t_max > 0 ? a.t_max : auto_horizon(d);
        const auto in = static_cast<int>(d.in_edges(d.gateway()).size());
        TailQuery q;
        for (int t = 2; t <= t_max; ++t) q.row_counts.push_back((t - 1) * in);
        q.epsilons = epsilons;
        q.num_matrix_draws = a.draws;
        q.num_vector_draws = a.vector_draws;
        q.num_pilot_draws = a.pilot_draws;
        q.normalization = TailNormalization::empirical_columns;
        q.seed = derive_seed(a.seed, {7, static_cast<std::uint64_t>(edges)});
        for (const auto& e : estimate_tail_probability(qnc_psi_source(d, t_max), q))
            rows.push_back({"qnc", a.n, edges, e});

        TailQuery g = q;
        g.normalization = TailNormalization::rows;
        g.seed = derive_seed(q.seed, {1});
        for (const auto& e : estimate_tail_probability(gaussian_source(q.row_counts.back(), a.n), g))
            rows.push_back({"gaussian", a.n, edges, e});
        for (int m : q.row_counts)
            for (double eps : epsilons) {
                TailProbEstimate exact;
                exact.epsilon = eps;
                exact.m = m;
                exact.prob = gaussian_tail_probability(m, eps);
                exact.estimator = "chi-square";
                rows.push_back({"gaussian-exact", a.n, edges, exact});
            }
    }
    with_output(a.out, [&](std::ostream& os) { write_tail_csv(os, rows); });
    return 0;
}

int run_envelope(const std::string& in_path, const std::string& out, const std::string& aggregate_path) {
    std::ifstream in(in_path);
    if (!in) throw InvalidParameters("cannot open " + in_path);
    const auto records = read_records_csv(in);
    const auto rows = aggregate(records);
    if (!aggregate_path.empty()) with_output(aggregate_path, [&](std::ostream& os) { write_aggregate_csv(os, rows); });
    with_output(out, [&](std::ostream& os) { write_envelope_csv(os, l_optimized_envelope(rows)); });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantized network coding simulator"};
    app.require_subcommand(1);

    auto* deploy = app.add_subcommand("deploy", "Generate a random deployment");
    NetworkArgs deploy_net;
    deploy_net.add(deploy);
    std::string deploy_out = "-";
    deploy->add_option("--output,-o", deploy_out, "Deployment JSON");

    auto* qnc_cmd = app.add_subcommand("qnc-run", "Run and decode QNC for one deployment and message set");
    NetworkArgs qnc_net;
    MessageArgs qnc_msg;
    qnc_net.add(qnc_cmd);
    qnc_msg.add(qnc_cmd);
    std::string qnc_out = "-", qnc_messages;
    qnc_cmd->add_option("--output,-o", qnc_out, "Records CSV");
    qnc_cmd->add_option("--messages", qnc_messages, "Also write the message ensemble JSON");

    auto* pf_cmd = app.add_subcommand("pf-run", "Run packet forwarding for one deployment and message set");
    NetworkArgs pf_net;
    MessageArgs pf_msg;
    pf_net.add(pf_cmd);
    pf_msg.add(pf_cmd);
    std::string pf_out = "-", pf_messages;
    pf_cmd->add_option("--output,-o", pf_out, "Records CSV");
    pf_cmd->add_option("--messages", pf_messages, "Also write the message ensemble JSON");

    auto* sweep = app.add_subcommand("sweep", "Full parameter sweep");
    SweepArgs sweep_args;
    sweep_args.add(sweep);

    auto* rip = app.add_subcommand("rip", "Tail probabilities of Psi_tot against Gaussian matrices");
    RipArgs rip_args;
    rip_args.add(rip);

    auto* envelope = app.add_subcommand("envelope", "Aggregate records and build the L-optimized envelope");
    std::string env_in, env_out = "-", env_agg;
    envelope->add_option("--input,-i", env_in, "Records CSV")->required();
    envelope->add_option("--output,-o", env_out, "Envelope CSV");
    envelope->add_option("--aggregate", env_agg, "Also write per-t means to this CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*deploy) return run_deploy(deploy_net, deploy_out);
        if (*qnc_cmd) return run_single(Scenario::qnc, qnc_net, qnc_msg, qnc_out, qnc_messages);
        if (*pf_cmd) return run_single(Scenario::pf, pf_net, pf_msg, pf_out, pf_messages);
        if (*sweep) return run_sweep_cmd(sweep_args);
        if (*rip) return run_rip(rip_args);
        if (*envelope) return run_envelope(env_in, env_out, env_agg);
    } catch (const InvalidParameters& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const EmptyInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
