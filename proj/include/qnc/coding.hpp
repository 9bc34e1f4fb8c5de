#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qnc/network.hpp"
#include "qnc/parallel.hpp"
#include "qnc/quantizer.hpp"

namespace qnc {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Local network coding coefficients.
///
/// beta is time invariant, so F(t) = f for every t. alpha_{e,tail(e)} is
/// nonzero only at t = 2; A(t) = 0 for t != 2.
struct CoefficientSchedule {
    SparseRowMatrix f;       // |E| x |E|, f(e, e') = beta_{e,e'}, nonzero only if tail(e) == head(e')
    Eigen::VectorXd alpha;   // alpha_{e,tail(e)}(2), indexed by edge
    std::uint64_t seed = 0;

    /// A(t) as an |E| x n sparse matrix.
    Eigen::SparseMatrix<double> a(const Deployment& d, int t) const;
};

/// Whether design_coefficients enforces sum |beta| + |alpha| <= 1 per outgoing edge.
enum class CoefficientNormalization { per_edge, none };

/// Coefficient design for QNC.
///
/// For every node the |Out(v)| x |In(v)| beta block has orthonormal rows
/// (rows of a Haar orthogonal matrix) when |Out(v)| <= |In(v)|; rows beyond
/// |In(v)| are independent unit-norm Gaussian directions. beta depends only
/// on the deployment seed. alpha_{e,v}(2) ~ N(0, alpha_variance) is drawn
/// from `seed`. Any outgoing edge whose sum |beta| + |alpha| exceeds 1 has
/// its row and alpha scaled by the reciprocal of that sum. With
/// CoefficientNormalization::none that step is skipped and beta is fully
/// deterministic given the deployment.
CoefficientSchedule design_coefficients(const Deployment& d, std::uint64_t seed, double alpha_variance = 1.0,
                                        CoefficientNormalization normalization = CoefficientNormalization::per_edge);

/// Largest per-edge value of sum_{e'} |beta_{e,e'}| + |alpha_{e,tail(e)}|.
double max_normalization_sum(const CoefficientSchedule& c);

struct QncTrace {
    std::vector<Eigen::VectorXd> y;  // y[t - 1] = Y(t), t = 1..t_max
    std::vector<Eigen::VectorXd> z;  // z[t - 2] = Z(t) = B Y(t), t = 2..t_max

    int t_max() const { return static_cast<int>(y.size()); }
    /// [Z(2); ...; Z(t)].
    Eigen::VectorXd z_tot(int t) const;
};

/// Time-stepped QNC: Y(1) = 0, Y(t) = Q(F Y(t-1) + A(t) x).
/// With bypass_quantizer the quantizer is the identity.
/// Throws OverflowViolation if a pre-quantization value leaves [-q_max, q_max].
QncTrace run_qnc(const Deployment& d, const CoefficientSchedule& c, const QuantizerSpec& q,
                 const Eigen::VectorXd& x, int t_max, bool bypass_quantizer = false);

/// Marginal measurement matrices Psi(2), ..., Psi(t_max), each |In(v0)| x n,
/// via M(t) = F M(t-1) + A(t), Psi(t) = B M(t).
std::vector<Eigen::MatrixXd> marginal_psi(const Deployment& d, const CoefficientSchedule& c, int t_max,
                                          Execution exec = Execution::parallel);

/// Stack the first t-1 marginal blocks into Psi_tot(t).
Eigen::MatrixXd stack_psi(const std::vector<Eigen::MatrixXd>& blocks, int t);

/// Psi_tot(t), m x n with m = (t-1) |In(v0)|.
Eigen::MatrixXd build_psi_tot(const Deployment& d, const CoefficientSchedule& c, int t,
                              Execution exec = Execution::parallel);

/// eps_rec(t) for t = 2..t_max (element t-2), the bound on the l2 norm of the
/// accumulated quantization noise seen at the gateway.
std::vector<double> eps_rec_profile(const Deployment& d, const CoefficientSchedule& c, const Eigen::VectorXd& steps,
                                    int t_max);

double compute_eps_rec(const Deployment& d, const CoefficientSchedule& c, const QuantizerSpec& q, int t);

/// Everything the gateway decoder consumes at horizon t.
struct MeasurementSystem {
    Eigen::MatrixXd psi_tot;
    Eigen::VectorXd z_tot;
    double eps_rec = 0.0;
    int t = 0;

    int m() const { return static_cast<int>(psi_tot.rows()); }
};

MeasurementSystem measurement_system(const std::vector<Eigen::MatrixXd>& blocks, const QncTrace& trace,
                                     const std::vector<double>& eps_rec, int t);

}  // namespace qnc
