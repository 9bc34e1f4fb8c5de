#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnc/parallel.hpp"

namespace qnc {

/// Produces one random matrix per draw seed. All draws from one source have the same shape.
using MatrixSource = std::function<Eigen::MatrixXd(std::uint64_t draw_seed)>;

/// How each draw is scaled before ||Psi x'||^2 is compared with 1.
enum class TailNormalization {
    none,               // use the matrix as produced
    rows,               // divide by sqrt(m) for the first m rows (standard normal sources)
    empirical_columns,  // scale column v to unit expected energy, estimated from pilot draws
};

struct TailProbEstimate {
    double epsilon = 0.0;
    double prob = 0.0;            // max over candidates; a lower bound on the true worst case
    double candidate_mean = 0.0;  // average of the per-candidate estimates
    int num_matrix_draws = 0;
    int num_vector_draws = 0;
    int num_candidates = 0;
    int m = 0;
    std::string estimator = "max-over-sampled-vectors";
};

/// Unit-norm candidate directions: `num_random` normalized Gaussian vectors,
/// all n standard basis vectors, and `num_random` random (+-e_i +- e_j)/sqrt 2.
std::vector<Eigen::VectorXd> tail_candidates(int n, int num_random, std::uint64_t seed);

struct TailQuery {
    std::vector<int> row_counts;   // evaluate on the first m rows for each m
    std::vector<double> epsilons;
    int num_matrix_draws = 1000;
    int num_vector_draws = 32;
    int num_pilot_draws = 200;     // only for empirical_columns
    TailNormalization normalization = TailNormalization::none;
    std::uint64_t seed = 0;
};

/// Monte-Carlo estimate of max_{||x'||=1} P(| ||Psi x'||^2 - 1 | > eps) over a
/// finite candidate set, for each (row count, epsilon) pair. Output is
/// ordered row-count major. Deterministic given the query regardless of the
/// thread count.
std::vector<TailProbEstimate> estimate_tail_probability(const MatrixSource& source, const TailQuery& query,
                                                        Execution exec = Execution::parallel);

/// Single (m = all rows, epsilon) convenience form.
TailProbEstimate estimate_tail_probability(const MatrixSource& source, double epsilon, int num_matrix_draws,
                                           int num_vector_draws, std::uint64_t seed,
                                           TailNormalization normalization = TailNormalization::none);

/// Standard normal entries; pair with TailNormalization::rows for the variance 1/m reference.
MatrixSource gaussian_source(int rows, int cols);

/// P(| chi2_m / m - 1 | > eps): the exact tail of an i.i.d. N(0, 1/m) matrix for any unit vector.
double gaussian_tail_probability(int m, double epsilon);

/// Smallest m such that gaussian_tail_probability(m', eps) <= level for every
/// m' in [m, m_cap]; 0 if even m_cap misses the level.
int gaussian_rows_for_tail(double level, double epsilon, int m_cap = 100000);

/// Same rule applied to an estimated curve: the smallest row count from which
/// every estimate at this epsilon stays <= level; 0 if none.
int rows_for_tail_level(std::span<const TailProbEstimate> curve, double epsilon, double level);

/// Lower bound on the probability that Psi_tot phi satisfies RIP of order k
/// with constant delta_k: max(0, 1 - C(n,k) (42/delta_k)^k p_tail), evaluated in log space.
double rip_success_lower_bound(int n, int k, double delta_k, double tail_prob);

/// ceil(kappa2 k log(n/k)).
int gaussian_sample_complexity(int n, int k, double kappa2);

inline constexpr long long kRipSupportBudget = 200000;

/// Restricted isometry constant of order k by enumerating all supports:
/// max over supports of max(sigma_max^2 - 1, 1 - sigma_min^2).
/// Throws BudgetExceeded if C(n, k) > kRipSupportBudget.
double exhaustive_rip_constant(const Eigen::MatrixXd& theta, int k);

struct ScaledRip {
    double delta = 0.0;
    double scale = 1.0;  // multiply theta by this to attain delta
};

/// Best RIP constant over positive rescalings c * theta. l1 decoding is
/// invariant to scaling theta, z and eps together, so this is the constant
/// that governs the recovery bound.
ScaledRip best_scaled_rip_constant(const Eigen::MatrixXd& theta, int k);

}  // namespace qnc
