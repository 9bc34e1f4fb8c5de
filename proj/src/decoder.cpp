#include "qnc/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qnc/error.hpp"

namespace qnc {

std::string_view to_string(DecodeStatus s) {
    switch (s) {
        case DecodeStatus::converged: return "converged";
        case DecodeStatus::max_iter: return "max-iter";
        case DecodeStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kRankTol = 1e-12;
constexpr double kAlpha = 0.01;  // Armijo constant
constexpr double kBeta = 0.5;    // backtracking factor
constexpr double kMu = 10.0;     // barrier / centrality growth

// Row-space reduction of ||theta s - z|| <= eps:
//   ||theta s - z||^2 = ||a s - b||^2 + perp^2,  a = diag(sigma) V^T.
struct Reduced {
    MatrixXd a;
    VectorXd b;
    MatrixXd v;
    VectorXd sigma;
    double perp = 0.0;
    int rank() const { return static_cast<int>(sigma.size()); }
    VectorXd min_norm_solution() const { return v * b.cwiseQuotient(sigma); }
};

Reduced reduce(const MatrixXd& theta, const VectorXd& z) {
    Eigen::BDCSVD<MatrixXd> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    int r = 0;
    const double cutoff = sv.size() > 0 ? sv(0) * kRankTol : 0.0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    Reduced red;
    red.sigma = sv.head(r);
    red.v = svd.matrixV().leftCols(r);
    red.b = svd.matrixU().leftCols(r).transpose() * z;
    red.a = red.sigma.asDiagonal() * red.v.transpose();
    red.perp = (z - svd.matrixU().leftCols(r) * red.b).norm();
    return red;
}

struct SolveOutcome {
    VectorXd x;
    double gap = 0.0;
    int iterations = 0;
    bool converged = false;
};

// min 1'u  s.t.  a x = b,  -u <= x <= u.  Primal-dual interior point.
SolveOutcome solve_equality(const MatrixXd& a, const VectorXd& b, const VectorXd& x0, const DecoderOptions& opts) {
    const Eigen::Index n = x0.size();
    VectorXd x = x0;
    VectorXd u = 0.95 * x.cwiseAbs() + VectorXd::Constant(n, 0.10 * x.cwiseAbs().maxCoeff());
    VectorXd fu1 = x - u, fu2 = -x - u;
    VectorXd lam1 = -fu1.cwiseInverse(), lam2 = -fu2.cwiseInverse();
    VectorXd v = -a * (lam1 - lam2);
    VectorXd atv = a.transpose() * v;
    VectorXd rpri = a * x - b;
    double sdg = -(fu1.dot(lam1) + fu2.dot(lam2));
    double tau = kMu * 2.0 * static_cast<double>(n) / sdg;

    auto residual_norm = [&](const VectorXd& l1, const VectorXd& l2, const VectorXd& f1, const VectorXd& f2,
                             const VectorXd& atv_, const VectorXd& rp, double tau_) {
        const VectorXd rd_x = l1 - l2 + atv_;
        const VectorXd rd_u = VectorXd::Ones(n) - l1 - l2;
        const VectorXd rc1 = -l1.cwiseProduct(f1) - VectorXd::Constant(n, 1.0 / tau_);
        const VectorXd rc2 = -l2.cwiseProduct(f2) - VectorXd::Constant(n, 1.0 / tau_);
        return std::sqrt(rd_x.squaredNorm() + rd_u.squaredNorm() + rc1.squaredNorm() + rc2.squaredNorm() +
                         rp.squaredNorm());
    };
    double resnorm = residual_norm(lam1, lam2, fu1, fu2, atv, rpri, tau);

    SolveOutcome out;
    while (out.iterations < opts.max_iterations) {
        if (sdg <= opts.rel_gap * std::max(x.lpNorm<1>(), std::numeric_limits<double>::min())) {
            out.converged = true;
            break;
        }
        ++out.iterations;
        const VectorXd inv1 = fu1.cwiseInverse(), inv2 = fu2.cwiseInverse();
        const VectorXd w1 = -(1.0 / tau) * (-inv1 + inv2) - atv;
        const VectorXd w2 = VectorXd::Constant(n, -1.0) - (1.0 / tau) * (inv1 + inv2);
        const VectorXd w3 = -rpri;
        const VectorXd sig1 = -lam1.cwiseProduct(inv1) - lam2.cwiseProduct(inv2);
        const VectorXd sig2 = lam1.cwiseProduct(inv1) - lam2.cwiseProduct(inv2);
        const VectorXd sigx = sig1 - sig2.cwiseAbs2().cwiseQuotient(sig1);
        const VectorXd w1p =
            -(w3 - a * (w1.cwiseQuotient(sigx) - w2.cwiseProduct(sig2).cwiseQuotient(sigx.cwiseProduct(sig1))));
        const MatrixXd h = a * sigx.cwiseInverse().asDiagonal() * a.transpose();
        Eigen::LDLT<MatrixXd> ldlt(h);
        const VectorXd dv = ldlt.solve(w1p);
        if (!dv.allFinite()) break;
        const VectorXd dx = (w1 - w2.cwiseProduct(sig2).cwiseQuotient(sig1) - a.transpose() * dv).cwiseQuotient(sigx);
        const VectorXd adx = a * dx;
        const VectorXd atdv = a.transpose() * dv;
        const VectorXd du = (w2 - sig2.cwiseProduct(dx)).cwiseQuotient(sig1);
        const VectorXd dlam1 = lam1.cwiseProduct(inv1).cwiseProduct(-dx + du) - lam1 - (1.0 / tau) * inv1;
        const VectorXd dlam2 = lam2.cwiseProduct(inv2).cwiseProduct(dx + du) - lam2 - (1.0 / tau) * inv2;

        double s = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dlam1(i) < 0) s = std::min(s, -lam1(i) / dlam1(i));
            if (dlam2(i) < 0) s = std::min(s, -lam2(i) / dlam2(i));
            if (dx(i) - du(i) > 0) s = std::min(s, -fu1(i) / (dx(i) - du(i)));
            if (-dx(i) - du(i) > 0) s = std::min(s, -fu2(i) / (-dx(i) - du(i)));
        }
        s *= 0.99;

        bool accepted = false;
        VectorXd xp, up, vp, atvp, lam1p, lam2p, fu1p, fu2p, rpp;
        for (int back = 0; back < 32; ++back) {
            xp = x + s * dx;
            up = u + s * du;
            vp = v + s * dv;
            atvp = atv + s * atdv;
            lam1p = lam1 + s * dlam1;
            lam2p = lam2 + s * dlam2;
            fu1p = xp - up;
            fu2p = -xp - up;
            rpp = rpri + s * adx;
            if (residual_norm(lam1p, lam2p, fu1p, fu2p, atvp, rpp, tau) <= (1.0 - kAlpha * s) * resnorm) {
                accepted = true;
                break;
            }
            s *= kBeta;
        }
        if (!accepted) break;

        x = xp;
        u = up;
        v = vp;
        atv = atvp;
        lam1 = lam1p;
        lam2 = lam2p;
        fu1 = fu1p;
        fu2 = fu2p;
        sdg = -(fu1.dot(lam1) + fu2.dot(lam2));
        tau = kMu * 2.0 * static_cast<double>(n) / sdg;
        rpri = a * x - b;
        resnorm = residual_norm(lam1, lam2, fu1, fu2, atv, rpri, tau);
    }
    if (!out.converged && sdg <= opts.rel_gap * std::max(x.lpNorm<1>(), std::numeric_limits<double>::min()))
        out.converged = true;
    out.x = x;
    out.gap = sdg;
    return out;
}

// min 1'u  s.t.  ||a x - b|| <= eps,  -u <= x <= u.  Log-barrier method.
SolveOutcome solve_ball(const MatrixXd& a, const VectorXd& b, double eps, const VectorXd& x0,
                        const DecoderOptions& opts) {
    const Eigen::Index n = x0.size();
    const double num_constraints = 2.0 * static_cast<double>(n) + 1.0;
    const MatrixXd ata = a.transpose() * a;
    VectorXd x = x0;
    VectorXd u = 0.95 * x.cwiseAbs() + VectorXd::Constant(n, 0.10 * x.cwiseAbs().maxCoeff());
    double tau = std::max(num_constraints / x.lpNorm<1>(), 1.0);
    const double eps2 = eps * eps;

    auto barrier = [&](const VectorXd& xx, const VectorXd& uu, const VectorXd& r) {
        const VectorXd f1 = xx - uu, f2 = -xx - uu;
        const double fe = 0.5 * (r.squaredNorm() - eps2);
        if ((f1.array() >= 0).any() || (f2.array() >= 0).any() || fe >= 0)
            return std::numeric_limits<double>::infinity();
        return uu.sum() - (1.0 / tau) * ((-f1).array().log().sum() + (-f2).array().log().sum() + std::log(-fe));
    };

    SolveOutcome out;
    while (out.iterations < opts.max_iterations) {
        const double newton_tol = 1e-3 * opts.rel_gap * std::max(u.sum(), std::numeric_limits<double>::min());
        for (int newton = 0; newton < 60 && out.iterations < opts.max_iterations; ++newton) {
            ++out.iterations;
            const VectorXd r = a * x - b;
            const VectorXd fu1 = x - u, fu2 = -x - u;
            const double fe = 0.5 * (r.squaredNorm() - eps2);
            const double f = barrier(x, u, r);
            const VectorXd atr = a.transpose() * r;
            const VectorXd inv1 = fu1.cwiseInverse(), inv2 = fu2.cwiseInverse();
            const VectorXd ntgz = inv1 - inv2 + atr / fe;
            const VectorXd ntgu = VectorXd::Constant(n, -tau) - inv1 - inv2;
            const VectorXd sig11 = inv1.cwiseAbs2() + inv2.cwiseAbs2();
            const VectorXd sig12 = -inv1.cwiseAbs2() + inv2.cwiseAbs2();
            const VectorXd sigx = sig11 - sig12.cwiseAbs2().cwiseQuotient(sig11);
            const VectorXd w1p = ntgz - sig12.cwiseQuotient(sig11).cwiseProduct(ntgu);
            MatrixXd h = -(1.0 / fe) * ata + (1.0 / (fe * fe)) * atr * atr.transpose();
            h.diagonal() += sigx;
            Eigen::LLT<MatrixXd> llt(h);
            VectorXd dx = llt.info() == Eigen::Success ? VectorXd(llt.solve(w1p)) : VectorXd(h.ldlt().solve(w1p));
            if (!dx.allFinite()) break;
            const VectorXd adx = a * dx;
            const VectorXd du = ntgu.cwiseQuotient(sig11) - sig12.cwiseQuotient(sig11).cwiseProduct(dx);

            double smax = 1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (dx(i) - du(i) > 0) smax = std::min(smax, -fu1(i) / (dx(i) - du(i)));
                if (-dx(i) - du(i) > 0) smax = std::min(smax, -fu2(i) / (-dx(i) - du(i)));
            }
            const double aqe = adx.squaredNorm(), bqe = 2.0 * r.dot(adx), cqe = r.squaredNorm() - eps2;
            if (aqe > 0) smax = std::min(smax, (-bqe + std::sqrt(bqe * bqe - 4.0 * aqe * cqe)) / (2.0 * aqe));

            // gradf' [dx; du] with gradf = -(1/tau) [ntgz; ntgu]
            const double slope = -(1.0 / tau) * (ntgz.dot(dx) + ntgu.dot(du));
            double s = 0.99 * smax;
            bool accepted = false;
            VectorXd xp, up;
            for (int back = 0; back < 40; ++back) {
                xp = x + s * dx;
                up = u + s * du;
                if (barrier(xp, up, r + s * adx) <= f + kAlpha * s * slope) {
                    accepted = true;
                    break;
                }
                s *= kBeta;
            }
            if (!accepted) break;
            x = xp;
            u = up;
            if (-slope / 2.0 < newton_tol) break;
        }
        out.gap = num_constraints / tau;
        if (out.gap <= opts.rel_gap * std::max(x.lpNorm<1>(), std::numeric_limits<double>::min())) {
            out.converged = true;
            break;
        }
        tau *= kMu;
    }
    out.x = x;
    return out;
}

// Refit on the detected support; keep it only if it stays feasible and is no worse in l1.
void polish_equality(const MatrixXd& a, const VectorXd& b, VectorXd& x) {
    const double peak = x.cwiseAbs().maxCoeff();
    if (peak == 0.0) return;
    std::vector<int> support;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x(i)) > 1e-6 * peak) support.push_back(static_cast<int>(i));
    if (support.empty() || static_cast<Eigen::Index>(support.size()) > a.rows()) return;
    MatrixXd sub(a.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(support[j]);
    const VectorXd coef = sub.colPivHouseholderQr().solve(b);
    VectorXd candidate = VectorXd::Zero(x.size());
    for (std::size_t j = 0; j < support.size(); ++j) candidate(support[j]) = coef(static_cast<Eigen::Index>(j));
    const double tol = 1e-10 * std::max(1.0, b.norm());
    if ((a * candidate - b).norm() <= tol && candidate.lpNorm<1>() <= x.lpNorm<1>() * (1.0 + 1e-9)) x = candidate;
}

}  // namespace

DecodeResult l1_minimize(const MatrixXd& theta, const VectorXd& z, double eps, const DecoderOptions& opts) {
    if (!(eps >= 0.0)) throw InvalidParameters("l1_minimize: eps must be non-negative");
    if (theta.rows() < 1) throw InvalidParameters("l1_minimize: need at least one measurement");
    if (theta.rows() != z.size()) throw InvalidParameters("l1_minimize: dimension mismatch");
    const Eigen::Index n = theta.cols();

    DecodeResult res;
    auto finish = [&](VectorXd s, DecodeStatus status) {
        res.s_hat = std::move(s);
        res.status = status;
        res.objective = res.s_hat.lpNorm<1>();
        res.residual_norm = (z - theta * res.s_hat).norm();
        return res;
    };

    if (z.norm() <= eps) return finish(VectorXd::Zero(n), DecodeStatus::converged);

    // Scale so the largest column has unit norm; the minimizer is unchanged.
    const double col_max = theta.colwise().norm().maxCoeff();
    if (col_max == 0.0) return finish(VectorXd::Zero(n), DecodeStatus::infeasible);
    const double scale = 1.0 / col_max;
    const Reduced red = reduce(scale * theta, scale * z);
    const double eps_s = scale * eps;

    const VectorXd x0 = red.min_norm_solution();
    if (red.perp > eps_s * (1.0 + opts.feas_tol) && red.perp > 1e-12 * scale * z.norm())
        return finish(x0, DecodeStatus::infeasible);

    const double slack2 = eps_s * eps_s - red.perp * red.perp;
    const double eps_red = slack2 > 0 ? std::sqrt(slack2) : 0.0;
    const bool equality = eps_red <= 1e-10 * red.b.norm();
    // Full column rank with an empty ball: the system has exactly one solution.
    if (equality && red.rank() == n) return finish(x0, DecodeStatus::converged);

    SolveOutcome outcome;
    if (equality) {
        outcome = solve_equality(red.a, red.b, x0, opts);
        if (outcome.converged) polish_equality(red.a, red.b, outcome.x);
    } else {
        outcome = solve_ball(red.a, red.b, eps_red, x0, opts);
    }
    res.iterations = outcome.iterations;
    res.gap = outcome.gap;
    return finish(outcome.x, outcome.converged ? DecodeStatus::converged : DecodeStatus::max_iter);
}

DecodeResult l1_decode(const MatrixXd& psi_tot, const MatrixXd& phi, const VectorXd& z_tot, double eps_rec,
                       const DecoderOptions& opts) {
    if (psi_tot.cols() != phi.rows()) throw InvalidParameters("l1_decode: psi/phi dimension mismatch");
    DecodeResult res = l1_minimize(psi_tot * phi, z_tot, eps_rec, opts);
    res.x_hat = phi * res.s_hat;
    return res;
}

namespace {

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<long long>(std::llround(r));
}

// Visit all k-subsets of {0..n-1} in lexicographic order; stop when fn returns true.
template <typename Fn>
bool for_each_subset(int n, int k, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    if (k > n) return false;
    while (true) {
        if (fn(idx)) return true;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return false;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace

SparseSolution l0_oracle(const MatrixXd& psi, const VectorXd& z, int k_max, double tol) {
    if (psi.rows() != z.size()) throw InvalidParameters("l0_oracle: dimension mismatch");
    const int n = static_cast<int>(psi.cols());
    long long work = 0;
    for (int k = 0; k <= k_max; ++k) work += binomial(n, k);
    if (k_max < 0 || work > kL0SupportBudget) throw BudgetExceeded("l0_oracle: too many supports to enumerate");

    const double threshold = tol * std::max(1.0, z.norm());
    SparseSolution sol;
    if (z.norm() <= threshold) {
        sol.found = true;
        sol.s = VectorXd::Zero(n);
        sol.residual_norm = z.norm();
        return sol;
    }
    for (int k = 1; k <= k_max && !sol.found; ++k) {
        for_each_subset(n, k, [&](const std::vector<int>& support) {
            MatrixXd sub(psi.rows(), k);
            for (int j = 0; j < k; ++j) sub.col(j) = psi.col(support[static_cast<std::size_t>(j)]);
            const VectorXd coef = sub.colPivHouseholderQr().solve(z);
            const double resid = (z - sub * coef).norm();
            if (resid > threshold) return false;
            sol.found = true;
            sol.support = support;
            sol.s = VectorXd::Zero(n);
            for (int j = 0; j < k; ++j) sol.s(support[static_cast<std::size_t>(j)]) = coef(j);
            sol.residual_norm = resid;
            return true;
        });
    }
    return sol;
}

std::pair<double, double> error_bound_constants(double delta_2k) {
    const double root2 = std::sqrt(2.0);
    if (!(delta_2k >= 0.0) || delta_2k >= root2 - 1.0)
        throw HypothesisViolated("error bound needs 0 <= delta_2k < sqrt(2) - 1");
    const double denom = 1.0 - (1.0 + root2) * delta_2k;
    const double c1 = 4.0 * std::sqrt(1.0 + delta_2k) / denom;
    const double c2 = 2.0 * (1.0 - (1.0 - root2) * delta_2k) / denom;
    return {c1, c2};
}

double error_bound(double eps_rec, double eps_k, double delta_2k) {
    const auto [c1, c2] = error_bound_constants(delta_2k);
    return c1 * eps_rec + c2 / std::sqrt(2.0) * eps_k;
}

}  // namespace qnc
