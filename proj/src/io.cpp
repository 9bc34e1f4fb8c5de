#include "qnc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>

#include "qnc/error.hpp"

namespace qnc {

using nlohmann::json;

json to_json(const Deployment& d) {
    json edges = json::array();
    for (const Edge& e : d.edges()) edges.push_back({e.tail + 1, e.head + 1, e.capacity});
    return json{{"n", d.num_nodes()}, {"gateway", d.gateway() + 1}, {"seed", d.seed()}, {"edges", edges}};
}

Deployment deployment_from_json(const json& j) {
    try {
        const int n = j.at("n").get<int>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3)
                throw InvalidParameters("edge entries must be [tail, head] or [tail, head, capacity]");
            edges.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1, e.size() == 3 ? e[2].get<int>() : 1});
        }
        return Deployment(n, std::move(edges), j.at("gateway").get<int>() - 1, j.value("seed", std::uint64_t{0}));
    } catch (const json::exception& ex) {
        throw InvalidParameters(std::string("malformed deployment: ") + ex.what());
    }
}

namespace {

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const json& j, Eigen::Index expected, const char* name) {
    auto values = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(values.size()) != expected)
        throw InvalidParameters(std::string("ensemble field '") + name + "' has the wrong length");
    return Eigen::Map<Eigen::VectorXd>(values.data(), expected);
}

}  // namespace

json to_json(const MessageEnsemble& e) {
    const Eigen::Index n = e.x.size();
    std::vector<double> phi;
    phi.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) phi.push_back(e.phi(i, j));
    return json{{"n", n},           {"k", e.k},       {"eps_k", e.eps_k},         {"eps_k_rel", e.eps_k_rel},
                {"eps_k_l2", e.eps_k_l2}, {"q_max", e.q_max}, {"seed", e.seed}, {"phi", phi},               {"s_k", vector_json(e.s_k)},
                {"s", vector_json(e.s)}, {"x", vector_json(e.x)}};
}

MessageEnsemble ensemble_from_json(const json& j) {
    try {
        MessageEnsemble e;
        const auto n = j.at("n").get<Eigen::Index>();
        e.k = j.at("k").get<int>();
        e.eps_k = j.at("eps_k").get<double>();
        e.eps_k_rel = j.value("eps_k_rel", 0.0);
        e.eps_k_l2 = j.value("eps_k_l2", 0.0);
        e.q_max = j.at("q_max").get<double>();
        e.seed = j.value("seed", std::uint64_t{0});
        const auto phi = j.at("phi").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(phi.size()) != n * n) throw InvalidParameters("ensemble phi must be n*n");
        e.phi.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index c = 0; c < n; ++c) e.phi(i, c) = phi[static_cast<std::size_t>(i * n + c)];
        e.s_k = vector_from(j.at("s_k"), n, "s_k");
        e.s = vector_from(j.at("s"), n, "s");
        e.x = vector_from(j.at("x"), n, "x");
        return e;
    } catch (const json::exception& ex) {
        throw InvalidParameters(std::string("malformed ensemble: ") + ex.what());
    }
}

json to_json(const ExperimentConfig& c) {
    return json{{"n", c.n},
                {"edge_counts", c.edge_counts},
                {"L_values", c.L_values},
                {"sparsity_factors", c.sparsity_factors},
                {"eps_k_ratios", c.eps_k_ratios},
                {"q_max", c.q_max},
                {"trials", c.trials},
                {"t_max", c.t_max},
                {"seed", c.seed},
                {"output_path", c.output_path},
                {"capacity", c.capacity},
                {"alpha_variance", c.alpha_variance},
                {"decoder", {{"rel_gap", c.decoder.rel_gap},
                             {"feas_tol", c.decoder.feas_tol},
                             {"max_iterations", c.decoder.max_iterations}}}};
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
    if (!j.is_object()) throw InvalidParameters("config must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "n") c.n = value.get<int>();
            else if (key == "edge_counts") c.edge_counts = value.get<std::vector<int>>();
            else if (key == "L_values") c.L_values = value.get<std::vector<int>>();
            else if (key == "sparsity_factors") c.sparsity_factors = value.get<std::vector<double>>();
            else if (key == "eps_k_ratios") c.eps_k_ratios = value.get<std::vector<double>>();
            else if (key == "q_max") c.q_max = value.get<double>();
            else if (key == "trials") c.trials = value.get<int>();
            else if (key == "t_max") c.t_max = value.get<int>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "output_path") c.output_path = value.get<std::string>();
            else if (key == "capacity") c.capacity = value.get<int>();
            else if (key == "alpha_variance") c.alpha_variance = value.get<double>();
            else if (key == "decoder") {
                if (!value.is_object()) throw InvalidParameters("decoder must be an object");
                for (const auto& [dk, dv] : value.items()) {
                    if (dk == "rel_gap") c.decoder.rel_gap = dv.get<double>();
                    else if (dk == "feas_tol") c.decoder.feas_tol = dv.get<double>();
                    else if (dk == "max_iterations") c.decoder.max_iterations = dv.get<int>();
                    else throw InvalidParameters("unknown decoder key '" + dk + "'");
                }
            }
            else throw InvalidParameters("unknown config key '" + key + "'");
        }
    } catch (const json::exception& ex) {
        throw InvalidParameters(std::string("malformed config: ") + ex.what());
    }
    c.validate();
    return c;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameters("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& ex) {
        throw InvalidParameters(path + ": " + ex.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
    os << kRecordHeader << '\n';
    for (const auto& r : records) {
        os << to_string(r.scenario) << ',' << r.n << ',' << r.edges << ',' << r.L << ',' << format_number(r.k_over_n)
           << ',' << format_number(r.eps_k_ratio) << ',' << r.trial << ',' << r.t << ',' << r.delay << ',' << r.m
           << ',' << format_number(r.err_db) << ',';
        if (r.scenario == Scenario::qnc) os << format_number(r.eps_rec);
        os << '\n';
    }
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view s) {
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InvalidParameters("bad number '" + std::string(s) + "'");
    return v;
}

template <typename Int>
Int parse_int(std::string_view s) {
    Int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InvalidParameters("bad integer '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kRecordHeader) throw InvalidParameters("record CSV header mismatch");
    std::vector<ExperimentRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 12) throw InvalidParameters("record CSV row has " + std::to_string(f.size()) + " fields");
        ExperimentRecord r;
        r.scenario = scenario_from_string(f[0]);
        r.n = parse_int<int>(f[1]);
        r.edges = parse_int<int>(f[2]);
        r.L = parse_int<int>(f[3]);
        r.k_over_n = parse_double(f[4]);
        r.eps_k_ratio = parse_double(f[5]);
        r.trial = parse_int<int>(f[6]);
        r.t = parse_int<int>(f[7]);
        r.delay = parse_int<long long>(f[8]);
        r.m = parse_int<int>(f[9]);
        r.err_db = parse_double(f[10]);
        r.eps_rec = parse_double(f[11]);
        out.push_back(r);
    }
    return out;
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << "scenario,n,edges,L,k_over_n,eps_k_ratio,t,delay,trials,mean_err_db,mean_err_linear,mean_m\n";
    for (const auto& r : rows)
        os << to_string(r.scenario) << ',' << r.n << ',' << r.edges << ',' << r.L << ',' << format_number(r.k_over_n)
           << ',' << format_number(r.eps_k_ratio) << ',' << r.t << ',' << r.delay << ',' << r.trials << ','
           << format_number(r.mean_err_db) << ',' << format_number(r.mean_err_linear) << ','
           << format_number(r.mean_m) << '\n';
}

void write_envelope_csv(std::ostream& os, const std::vector<EnvelopeCurve>& curves) {
    os << "scenario,n,edges,k_over_n,eps_k_ratio,delay,err_db,L,t\n";
    for (const auto& c : curves)
        for (const auto& p : c.points)
            os << to_string(c.scenario) << ',' << c.n << ',' << c.edges << ',' << format_number(c.k_over_n) << ','
               << format_number(c.eps_k_ratio) << ',' << p.delay << ',' << format_number(p.err_db) << ',' << p.L
               << ',' << p.t << '\n';
}

void write_tail_csv(std::ostream& os, const std::vector<TailRow>& rows) {
    os << kTailHeader << '\n';
    for (const auto& r : rows)
        os << r.matrix_kind << ',' << r.n << ',' << r.edges << ',' << r.estimate.m << ','
           << format_number(r.estimate.epsilon) << ',' << format_number(r.estimate.prob) << ','
           << r.estimate.num_matrix_draws << '\n';
}

}  // namespace qnc
