#include "qnc/coding.hpp"

#include <cmath>
#include <string>

#include <omp.h>

#include "qnc/error.hpp"
#include "qnc/rng.hpp"
#include "qnc/source.hpp"

namespace qnc {

int max_threads() { return omp_get_max_threads(); }

Eigen::SparseMatrix<double> CoefficientSchedule::a(const Deployment& d, int t) const {
    Eigen::SparseMatrix<double> out(d.num_edges(), d.num_nodes());
    if (t != 2) return out;
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(d.num_edges()));
    for (EdgeId e = 0; e < d.num_edges(); ++e) entries.emplace_back(e, d.edge(e).tail, alpha(e));
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

CoefficientSchedule design_coefficients(const Deployment& d, std::uint64_t seed, double alpha_variance,
                                        CoefficientNormalization normalization) {
    if (!(alpha_variance > 0.0)) throw InvalidParameters("alpha_variance must be positive");
    const int num_edges = d.num_edges();

    CoefficientSchedule c;
    c.seed = seed;
    c.alpha.resize(num_edges);
    Rng alpha_rng(derive_seed(seed, {stream::kAlpha}));
    std::normal_distribution<double> alpha_dist(0.0, std::sqrt(alpha_variance));
    for (EdgeId e = 0; e < num_edges; ++e) c.alpha(e) = alpha_dist(alpha_rng);

    std::vector<Eigen::Triplet<double>> entries;
    Rng beta_rng(derive_seed(d.seed(), {stream::kBeta}));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (NodeId v = 0; v < d.num_nodes(); ++v) {
        auto in = d.in_edges(v);
        auto out = d.out_edges(v);
        const auto n_in = static_cast<int>(in.size());
        const auto n_out = static_cast<int>(out.size());
        if (n_in == 0 || n_out == 0) continue;
        Eigen::MatrixXd block(n_out, n_in);
        const int orthonormal_rows = std::min(n_out, n_in);
        block.topRows(orthonormal_rows) =
            random_orthonormal(n_in, beta_rng()).topRows(orthonormal_rows);
        for (int r = orthonormal_rows; r < n_out; ++r) {
            for (int j = 0; j < n_in; ++j) block(r, j) = normal(beta_rng);
            block.row(r).normalize();
        }
        for (int r = 0; r < n_out; ++r)
            for (int j = 0; j < n_in; ++j) entries.emplace_back(out[r], in[j], block(r, j));
    }
    c.f.resize(num_edges, num_edges);
    c.f.setFromTriplets(entries.begin(), entries.end());
    c.f.makeCompressed();

    if (normalization == CoefficientNormalization::none) return c;
    // sum |beta| + |alpha| <= 1 per outgoing edge.
    for (EdgeId e = 0; e < num_edges; ++e) {
        double total = std::abs(c.alpha(e));
        for (SparseRowMatrix::InnerIterator it(c.f, e); it; ++it) total += std::abs(it.value());
        if (total > 1.0) {
            const double scale = 1.0 / total;
            c.alpha(e) *= scale;
            for (SparseRowMatrix::InnerIterator it(c.f, e); it; ++it) it.valueRef() *= scale;
        }
    }
    return c;
}

double max_normalization_sum(const CoefficientSchedule& c) {
    double worst = 0.0;
    for (Eigen::Index e = 0; e < c.f.rows(); ++e) {
        double total = std::abs(c.alpha(e));
        for (SparseRowMatrix::InnerIterator it(c.f, e); it; ++it) total += std::abs(it.value());
        worst = std::max(worst, total);
    }
    return worst;
}

Eigen::VectorXd QncTrace::z_tot(int t) const {
    if (t < 2 || t > t_max()) throw InvalidParameters("z_tot: horizon out of range");
    Eigen::Index rows = 0;
    for (int tau = 2; tau <= t; ++tau) rows += z[static_cast<std::size_t>(tau - 2)].size();
    Eigen::VectorXd out(rows);
    Eigen::Index at = 0;
    for (int tau = 2; tau <= t; ++tau) {
        const auto& block = z[static_cast<std::size_t>(tau - 2)];
        out.segment(at, block.size()) = block;
        at += block.size();
    }
    return out;
}

QncTrace run_qnc(const Deployment& d, const CoefficientSchedule& c, const QuantizerSpec& q,
                 const Eigen::VectorXd& x, int t_max, bool bypass_quantizer) {
    if (t_max < 2) throw InvalidParameters("run_qnc: t_max must be at least 2");
    if (x.size() != d.num_nodes()) throw InvalidParameters("run_qnc: message length mismatch");
    const double q_max = q.q_max();
    const double limit = q_max * (1.0 + 1e-12);
    if (x.cwiseAbs().maxCoeff() > limit) throw InvalidParameters("run_qnc: |x_v| exceeds q_max");

    const auto selector = build_gateway_selector(d);
    QncTrace trace;
    trace.y.reserve(static_cast<std::size_t>(t_max));
    trace.y.push_back(Eigen::VectorXd::Zero(d.num_edges()));
    for (int t = 2; t <= t_max; ++t) {
        Eigen::VectorXd pre = c.f * trace.y.back();
        if (t == 2)
            for (EdgeId e = 0; e < d.num_edges(); ++e) pre(e) += c.alpha(e) * x(d.edge(e).tail);
        Eigen::VectorXd y(d.num_edges());
        for (EdgeId e = 0; e < d.num_edges(); ++e) {
            if (std::abs(pre(e)) > limit)
                throw OverflowViolation("edge " + std::to_string(e + 1) + " at t=" + std::to_string(t) +
                                        " carries " + std::to_string(pre(e)) + " outside the quantizer range");
            y(e) = bypass_quantizer ? pre(e) : q.quantize(e, pre(e));
        }
        trace.z.push_back(selector * y);
        trace.y.push_back(std::move(y));
    }
    return trace;
}

namespace {

// out = F * m + a, row by row. F is row-major sparse, m and out are row-major dense.
void propagate(const SparseRowMatrix& f, const RowMatrix& m, RowMatrix& out, Execution exec) {
    const Eigen::Index rows = f.rows();
    auto row_kernel = [&](Eigen::Index e) {
        out.row(e).setZero();
        for (SparseRowMatrix::InnerIterator it(f, e); it; ++it) out.row(e) += it.value() * m.row(it.col());
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index e = 0; e < rows; ++e) row_kernel(e);
    } else {
        for (Eigen::Index e = 0; e < rows; ++e) row_kernel(e);
    }
}

Eigen::MatrixXd select_rows(const Deployment& d, const RowMatrix& m) {
    auto in = d.in_edges(d.gateway());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(in.size()), m.cols());
    for (std::size_t i = 0; i < in.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(in[i]);
    return out;
}

}  // namespace

std::vector<Eigen::MatrixXd> marginal_psi(const Deployment& d, const CoefficientSchedule& c, int t_max,
                                          Execution exec) {
    if (t_max < 2) throw InvalidParameters("marginal_psi: t_max must be at least 2");
    RowMatrix m = RowMatrix::Zero(d.num_edges(), d.num_nodes());
    for (EdgeId e = 0; e < d.num_edges(); ++e) m(e, d.edge(e).tail) = c.alpha(e);
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(static_cast<std::size_t>(t_max - 1));
    blocks.push_back(select_rows(d, m));
    RowMatrix next(m.rows(), m.cols());
    for (int t = 3; t <= t_max; ++t) {
        propagate(c.f, m, next, exec);  // A(t) = 0 for t > 2
        std::swap(m, next);
        blocks.push_back(select_rows(d, m));
    }
    return blocks;
}

Eigen::MatrixXd stack_psi(const std::vector<Eigen::MatrixXd>& blocks, int t) {
    if (t < 2 || t - 1 > static_cast<int>(blocks.size())) throw InvalidParameters("stack_psi: horizon out of range");
    const Eigen::Index per = blocks.front().rows();
    Eigen::MatrixXd out(per * (t - 1), blocks.front().cols());
    for (int tau = 2; tau <= t; ++tau) out.middleRows(per * (tau - 2), per) = blocks[static_cast<std::size_t>(tau - 2)];
    return out;
}

Eigen::MatrixXd build_psi_tot(const Deployment& d, const CoefficientSchedule& c, int t, Execution exec) {
    return stack_psi(marginal_psi(d, c, t, exec), t);
}

std::vector<double> eps_rec_profile(const Deployment& d, const CoefficientSchedule& c, const Eigen::VectorXd& steps,
                                    int t_max) {
    if (t_max < 2) throw InvalidParameters("eps_rec_profile: t_max must be at least 2");
    if (steps.size() != d.num_edges()) throw InvalidParameters("eps_rec_profile: step vector length mismatch");
    // rows = B F^j, advanced one power per time step. |B F^j| Delta is the
    // per-step contribution to B u(t').
    RowMatrix rows = RowMatrix::Zero(static_cast<Eigen::Index>(d.in_edges(d.gateway()).size()), d.num_edges());
    {
        auto in = d.in_edges(d.gateway());
        for (std::size_t i = 0; i < in.size(); ++i) rows(static_cast<Eigen::Index>(i), in[i]) = 1.0;
    }
    Eigen::VectorXd bu = Eigen::VectorXd::Zero(rows.rows());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(t_max - 1));
    double sum_sq = 0.0;
    for (int t = 2; t <= t_max; ++t) {
        if (t > 2) rows = (rows * c.f).eval();
        bu += rows.cwiseAbs() * steps;
        sum_sq += bu.squaredNorm();
        out.push_back(0.5 * std::sqrt(sum_sq));
    }
    return out;
}

double compute_eps_rec(const Deployment& d, const CoefficientSchedule& c, const QuantizerSpec& q, int t) {
    return eps_rec_profile(d, c, q.steps(), t).back();
}

MeasurementSystem measurement_system(const std::vector<Eigen::MatrixXd>& blocks, const QncTrace& trace,
                                     const std::vector<double>& eps_rec, int t) {
    MeasurementSystem sys;
    sys.t = t;
    sys.psi_tot = stack_psi(blocks, t);
    sys.z_tot = trace.z_tot(t);
    sys.eps_rec = eps_rec.at(static_cast<std::size_t>(t - 2));
    return sys;
}

}  // namespace qnc
