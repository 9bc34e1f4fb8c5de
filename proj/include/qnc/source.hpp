#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Dense>

namespace qnc {

/// Correlated messages x = phi * s with s near-sparse.
struct MessageEnsemble {
    Eigen::MatrixXd phi;      // n x n orthonormal
    Eigen::VectorXd s_k;      // exactly k-sparse
    Eigen::VectorXd s;        // near-sparse, ||s - s_k||_1 == eps_k
    Eigen::VectorXd x;        // messages, max |x_v| == q_max
    int k = 0;
    double eps_k = 0.0;       // l1 distance between s and s_k, in message units
    double eps_k_rel = 0.0;   // eps_k / ||s_k||_1
    double eps_k_l2 = 0.0;    // ||s - s_k||_2, diagnostics only
    double q_max = 0.0;
    std::uint64_t seed = 0;

    int size() const { return static_cast<int>(x.size()); }
};

/// Haar-distributed orthonormal matrix via QR of a standard normal matrix.
Eigen::MatrixXd random_orthonormal(int n, std::uint64_t seed);

/// Synthesize one message ensemble.
///
/// s_k gets k uniformly placed nonzeros drawn from U(-1/2, 1/2). A
/// zero-mean uniform perturbation on all n entries is scaled so that
/// ||s - s_k||_1 = eps_k_rel * ||s_k||_1 exactly. x = phi * s is then scaled
/// by one positive scalar so that max |x_v| = q_max; s and s_k are scaled by
/// the same factor.
MessageEnsemble generate_messages(int n, int k, double eps_k_rel, double q_max, std::uint64_t seed);

inline constexpr double kExactRecoveryDb = -std::numeric_limits<double>::infinity();

/// 20 log10 ||x - x_hat||_2, or -inf when the two vectors are identical.
double error_db(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat);

}  // namespace qnc
