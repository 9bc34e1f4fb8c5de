#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qnc {

struct DecoderOptions {
    double rel_gap = 1e-6;       // certified relative optimality gap
    double feas_tol = 1e-8;      // relative slack on the residual ball
    int max_iterations = 100000; // Newton / primal-dual steps over the whole solve
};

enum class DecodeStatus { converged, max_iter, infeasible };

std::string_view to_string(DecodeStatus s);

struct DecodeResult {
    Eigen::VectorXd x_hat;
    Eigen::VectorXd s_hat;
    double residual_norm = 0.0;  // ||z - Psi phi s_hat||_2
    double objective = 0.0;      // ||s_hat||_1
    double gap = 0.0;            // certified absolute duality gap at exit
    int iterations = 0;
    DecodeStatus status = DecodeStatus::converged;
};

/// min ||s||_1  subject to  ||z - theta s||_2 <= eps.
///
/// The system is first reduced to its row space with a thin SVD. Equality
/// constrained problems (eps == 0, or an empty ball after reduction) use a
/// primal-dual interior point method for the equivalent LP; the ball
/// constrained case uses a log-barrier method. Both report a duality gap.
DecodeResult l1_minimize(const Eigen::MatrixXd& theta, const Eigen::VectorXd& z, double eps,
                         const DecoderOptions& opts = {});

/// Gateway decoder: x_hat = phi * argmin ||s||_1 s.t. ||z_tot - psi_tot phi s|| <= eps_rec.
DecodeResult l1_decode(const Eigen::MatrixXd& psi_tot, const Eigen::MatrixXd& phi, const Eigen::VectorXd& z_tot,
                       double eps_rec, const DecoderOptions& opts = {});

struct SparseSolution {
    bool found = false;
    std::vector<int> support;  // sorted column indices
    Eigen::VectorXd s;
    double residual_norm = 0.0;
};

/// Number of least-squares fits l0_oracle may perform.
inline constexpr long long kL0SupportBudget = 50000;

/// Sparsest s with ||z - psi s|| <= tol * max(1, ||z||), by enumerating
/// supports in order of size. Throws BudgetExceeded when the number of
/// supports up to k_max is above kL0SupportBudget.
SparseSolution l0_oracle(const Eigen::MatrixXd& psi, const Eigen::VectorXd& z, int k_max, double tol = 1e-9);

/// Recovery error bound c1 * eps_rec + (c2 / sqrt 2) * eps_k for an l1
/// decoder whose effective matrix has RIP constant delta_2k < sqrt(2) - 1.
/// Throws HypothesisViolated otherwise.
double error_bound(double eps_rec, double eps_k, double delta_2k);

/// c1 and c2 of the bound above.
std::pair<double, double> error_bound_constants(double delta_2k);

}  // namespace qnc
