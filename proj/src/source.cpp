#include "qnc/source.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qnc/error.hpp"
#include "qnc/rng.hpp"

namespace qnc {

Eigen::MatrixXd random_orthonormal(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Sign fix on diag(R) makes the distribution Haar rather than QR-biased.
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

MessageEnsemble generate_messages(int n, int k, double eps_k_rel, double q_max, std::uint64_t seed) {
    if (n < 1 || k < 1 || k > n) throw InvalidParameters("sparsity must satisfy 1 <= k <= n");
    if (!(eps_k_rel >= 0.0)) throw InvalidParameters("eps_k_rel must be non-negative");
    if (!(q_max > 0.0)) throw InvalidParameters("q_max must be positive");

    MessageEnsemble ens;
    ens.k = k;
    ens.eps_k_rel = eps_k_rel;
    ens.q_max = q_max;
    ens.seed = seed;

    Rng support_rng(derive_seed(seed, {stream::kSupport}));
    std::uniform_real_distribution<double> half(-0.5, 0.5);
    std::vector<int> idx(static_cast<std::size_t>(n));
    ens.s_k = Eigen::VectorXd::Zero(n);
    // Resample until every support value is nonzero (degenerate draws have probability zero).
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), support_rng);
        ens.s_k.setZero();
        bool degenerate = false;
        for (int i = 0; i < k; ++i) {
            double v = half(support_rng);
            if (v == 0.0) degenerate = true;
            ens.s_k(idx[static_cast<std::size_t>(i)]) = v;
        }
        if (!degenerate) break;
    }
    if (ens.s_k.lpNorm<1>() == 0.0) throw NonConvergence("degenerate sparse coefficients");

    ens.s = ens.s_k;
    if (eps_k_rel > 0.0) {
        Rng noise_rng(derive_seed(seed, {stream::kPerturbation}));
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) w(i) = half(noise_rng);
        w *= eps_k_rel * ens.s_k.lpNorm<1>() / w.lpNorm<1>();
        ens.s += w;
    }

    ens.phi = random_orthonormal(n, derive_seed(seed, {stream::kTransform}));
    ens.x = ens.phi * ens.s;
    const double scale = q_max / ens.x.cwiseAbs().maxCoeff();
    ens.x *= scale;
    ens.s *= scale;
    ens.s_k *= scale;
    ens.eps_k = (ens.s - ens.s_k).lpNorm<1>();
    ens.eps_k_l2 = (ens.s - ens.s_k).norm();
    return ens;
}

double error_db(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat) {
    if (x.size() != x_hat.size()) throw InvalidParameters("error_db: length mismatch");
    const double norm = (x - x_hat).norm();
    if (norm == 0.0) return kExactRecoveryDb;
    return 20.0 * std::log10(norm);
}

}  // namespace qnc
