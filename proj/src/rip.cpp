#include "qnc/rip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "qnc/error.hpp"
#include "qnc/rng.hpp"

namespace qnc {

namespace {

constexpr std::uint64_t kCandidateStream = 0x7a11;
constexpr std::uint64_t kPilotStream = 0x9170;
constexpr std::uint64_t kDrawStream = 0xd7a3;

}  // namespace

std::vector<Eigen::VectorXd> tail_candidates(int n, int num_random, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(n + 2 * num_random));
    for (int i = 0; i < num_random; ++i) {
        Eigen::VectorXd v(n);
        for (auto& value : v) value = normal(rng);
        out.push_back(v.normalized());
    }
    for (int i = 0; i < n; ++i) out.push_back(Eigen::VectorXd::Unit(n, i));
    if (n >= 2) {
        std::uniform_int_distribution<int> pick(0, n - 1);
        std::bernoulli_distribution coin(0.5);
        for (int c = 0; c < num_random; ++c) {
            const int i = pick(rng);
            int j = pick(rng);
            while (j == i) j = pick(rng);
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            v(i) = (coin(rng) ? 1.0 : -1.0) / std::sqrt(2.0);
            v(j) = (coin(rng) ? 1.0 : -1.0) / std::sqrt(2.0);
            out.push_back(v);
        }
    }
    return out;
}

std::vector<TailProbEstimate> estimate_tail_probability(const MatrixSource& source, const TailQuery& query,
                                                        Execution exec) {
    if (query.num_matrix_draws < 1 || query.num_vector_draws < 0)
        throw InvalidParameters("tail probability: draw counts must be positive");
    if (query.row_counts.empty() || query.epsilons.empty())
        throw InvalidParameters("tail probability: need at least one row count and one epsilon");

    const Eigen::MatrixXd probe = source(derive_seed(query.seed, {kDrawStream, 0}));
    const Eigen::Index n = probe.cols();
    for (int m : query.row_counts)
        if (m < 1 || m > probe.rows()) throw InvalidParameters("tail probability: row count out of range");

    const auto candidates = tail_candidates(static_cast<int>(n), query.num_vector_draws,
                                            derive_seed(query.seed, {kCandidateStream}));
    Eigen::MatrixXd cand(n, static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t c = 0; c < candidates.size(); ++c) cand.col(static_cast<Eigen::Index>(c)) = candidates[c];
    const Eigen::Index num_cand = cand.cols();
    const std::size_t num_rows = query.row_counts.size();
    const std::size_t num_eps = query.epsilons.size();

    // Per-row-count column scale.
    std::vector<Eigen::VectorXd> scale(num_rows, Eigen::VectorXd::Ones(n));
    if (query.normalization == TailNormalization::rows) {
        for (std::size_t p = 0; p < num_rows; ++p) scale[p].setConstant(1.0 / std::sqrt(query.row_counts[p]));
    } else if (query.normalization == TailNormalization::empirical_columns) {
        const int pilots = std::max(1, query.num_pilot_draws);
        std::vector<std::vector<Eigen::VectorXd>> energy(static_cast<std::size_t>(pilots));
        auto pilot = [&](int j) {
            const Eigen::MatrixXd psi = source(derive_seed(query.seed, {kPilotStream, static_cast<std::uint64_t>(j)}));
            auto& out = energy[static_cast<std::size_t>(j)];
            out.reserve(num_rows);
            for (int m : query.row_counts) out.push_back(psi.topRows(m).colwise().squaredNorm().transpose());
        };
        if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
            for (int j = 0; j < pilots; ++j) pilot(j);
        } else {
            for (int j = 0; j < pilots; ++j) pilot(j);
        }
        for (std::size_t p = 0; p < num_rows; ++p) {
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
            for (const auto& e : energy) mean += e[p];
            mean /= pilots;
            for (Eigen::Index v = 0; v < n; ++v) scale[p](v) = mean(v) > 0 ? 1.0 / std::sqrt(mean(v)) : 0.0;
        }
    }

    // hits[(p * num_eps + e) * num_cand + c]
    const std::size_t cells = num_rows * num_eps * static_cast<std::size_t>(num_cand);
    std::vector<long long> hits(cells, 0);
    auto accumulate = [&](int draw, std::vector<long long>& local) {
        const Eigen::MatrixXd psi = source(derive_seed(query.seed, {kDrawStream, static_cast<std::uint64_t>(draw)}));
        for (std::size_t p = 0; p < num_rows; ++p) {
            const Eigen::MatrixXd proj = psi.topRows(query.row_counts[p]) * (scale[p].asDiagonal() * cand);
            const Eigen::RowVectorXd energies = proj.colwise().squaredNorm();
            for (std::size_t e = 0; e < num_eps; ++e) {
                long long* row = &local[(p * num_eps + e) * static_cast<std::size_t>(num_cand)];
                for (Eigen::Index c = 0; c < num_cand; ++c)
                    if (std::abs(energies(c) - 1.0) > query.epsilons[e]) ++row[c];
            }
        }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel
        {
            std::vector<long long> local(cells, 0);
#pragma omp for schedule(dynamic) nowait
            for (int draw = 0; draw < query.num_matrix_draws; ++draw) accumulate(draw, local);
#pragma omp critical
            for (std::size_t i = 0; i < cells; ++i) hits[i] += local[i];
        }
    } else {
        for (int draw = 0; draw < query.num_matrix_draws; ++draw) accumulate(draw, hits);
    }

    std::vector<TailProbEstimate> out;
    out.reserve(num_rows * num_eps);
    const double draws = query.num_matrix_draws;
    for (std::size_t p = 0; p < num_rows; ++p) {
        for (std::size_t e = 0; e < num_eps; ++e) {
            const long long* row = &hits[(p * num_eps + e) * static_cast<std::size_t>(num_cand)];
            TailProbEstimate est;
            est.epsilon = query.epsilons[e];
            est.m = query.row_counts[p];
            est.num_matrix_draws = query.num_matrix_draws;
            est.num_vector_draws = query.num_vector_draws;
            est.num_candidates = static_cast<int>(num_cand);
            est.prob = static_cast<double>(*std::max_element(row, row + num_cand)) / draws;
            est.candidate_mean =
                static_cast<double>(std::accumulate(row, row + num_cand, 0LL)) / (draws * static_cast<double>(num_cand));
            out.push_back(est);
        }
    }
    return out;
}

TailProbEstimate estimate_tail_probability(const MatrixSource& source, double epsilon, int num_matrix_draws,
                                           int num_vector_draws, std::uint64_t seed,
                                           TailNormalization normalization) {
    const auto rows = static_cast<int>(source(derive_seed(seed, {kDrawStream, 0})).rows());
    TailQuery query;
    query.row_counts = {rows};
    query.epsilons = {epsilon};
    query.num_matrix_draws = num_matrix_draws;
    query.num_vector_draws = num_vector_draws;
    query.normalization = normalization;
    query.seed = seed;
    return estimate_tail_probability(source, query).front();
}

MatrixSource gaussian_source(int rows, int cols) {
    return [rows, cols](std::uint64_t seed) {
        Rng rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXd g(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
        return g;
    };
}

double gaussian_tail_probability(int m, double epsilon) {
    if (m < 1) throw InvalidParameters("gaussian_tail_probability: m must be positive");
    if (!(epsilon >= 0.0)) throw InvalidParameters("gaussian_tail_probability: epsilon must be non-negative");
    const boost::math::chi_squared chi(m);
    const double upper = boost::math::cdf(boost::math::complement(chi, m * (1.0 + epsilon)));
    const double lower = epsilon < 1.0 ? boost::math::cdf(chi, m * (1.0 - epsilon)) : 0.0;
    return upper + lower;
}

int gaussian_rows_for_tail(double level, double epsilon, int m_cap) {
    // The tail is not monotone for small m, so walk down from the cap.
    int best = 0;
    for (int m = m_cap; m >= 1; --m) {
        if (gaussian_tail_probability(m, epsilon) > level) break;
        best = m;
    }
    return best;
}

int rows_for_tail_level(std::span<const TailProbEstimate> curve, double epsilon, double level) {
    std::vector<const TailProbEstimate*> pts;
    for (const auto& e : curve)
        if (e.epsilon == epsilon) pts.push_back(&e);
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->m < b->m; });
    int best = 0;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        if ((*it)->prob > level) break;
        best = (*it)->m;
    }
    return best;
}

double rip_success_lower_bound(int n, int k, double delta_k, double tail_prob) {
    if (!(delta_k > 0.0 && delta_k < 1.0)) throw InvalidParameters("rip bound: delta_k must lie in (0, 1)");
    if (k < 1 || k > n) throw InvalidParameters("rip bound: need 1 <= k <= n");
    if (!(tail_prob >= 0.0)) throw InvalidParameters("rip bound: tail probability must be non-negative");
    if (tail_prob == 0.0) return 1.0;
    const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    const double log_failure = log_binom + k * std::log(42.0 / delta_k) + std::log(tail_prob);
    return std::max(0.0, 1.0 - std::exp(log_failure));
}

int gaussian_sample_complexity(int n, int k, double kappa2) {
    if (k < 1 || k > n) throw InvalidParameters("sample complexity: need 1 <= k <= n");
    return static_cast<int>(std::ceil(kappa2 * k * std::log(static_cast<double>(n) / k)));
}

namespace {

long long choose(int n, int k) {
    if (k < 0 || k > n) return 0;
    long double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<long long>(std::llround(r));
}

// Extreme eigenvalues of the Gram matrices of all k-column submatrices.
std::pair<double, double> gram_extremes(const Eigen::MatrixXd& theta, int k) {
    const int n = static_cast<int>(theta.cols());
    if (k < 1 || k > n) throw InvalidParameters("rip constant: need 1 <= k <= n");
    if (choose(n, k) > kRipSupportBudget) throw BudgetExceeded("rip constant: too many supports to enumerate");
    const Eigen::MatrixXd gram = theta.transpose() * theta;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    Eigen::MatrixXd sub(k, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    while (true) {
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) sub(a, b) = gram(idx[a], idx[b]);
        eig.compute(sub, Eigen::EigenvaluesOnly);
        lo = std::min(lo, eig.eigenvalues()(0));
        hi = std::max(hi, eig.eigenvalues()(k - 1));
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return {std::max(lo, 0.0), hi};
}

}  // namespace

double exhaustive_rip_constant(const Eigen::MatrixXd& theta, int k) {
    const auto [lo, hi] = gram_extremes(theta, k);
    return std::max(hi - 1.0, 1.0 - lo);
}

ScaledRip best_scaled_rip_constant(const Eigen::MatrixXd& theta, int k) {
    const auto [lo, hi] = gram_extremes(theta, k);
    ScaledRip out;
    if (hi <= 0.0) {
        out.delta = 1.0;
        return out;
    }
    // delta(c) = max(c^2 hi - 1, 1 - c^2 lo) is minimized where both terms agree.
    const double c2 = 2.0 / (hi + lo);
    out.scale = std::sqrt(c2);
    out.delta = (hi - lo) / (hi + lo);
    return out;
}

}  // namespace qnc
