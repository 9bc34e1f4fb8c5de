#include <doctest.h>

#include <cmath>

#include "qnc/error.hpp"
#include "qnc/source.hpp"

using namespace qnc;

TEST_CASE("random_orthonormal is orthonormal and seeded") {
    for (int n : {1, 2, 7, 50}) {
        const Eigen::MatrixXd q = random_orthonormal(n, 11);
        CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((q * q.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK((random_orthonormal(10, 3) - random_orthonormal(10, 3)).norm() == 0.0);
    CHECK((random_orthonormal(10, 3) - random_orthonormal(10, 4)).norm() > 0.1);
}

TEST_CASE("message ensemble structure") {
    for (double rel : {0.0, 0.002, 0.02, 0.2}) {
        const MessageEnsemble e = generate_messages(40, 6, rel, 10.0, 8);
        CHECK(e.size() == 40);
        CHECK(e.k == 6);
        int nnz = 0;
        for (int i = 0; i < 40; ++i) nnz += e.s_k(i) != 0.0;
        CHECK(nnz == 6);
        CHECK(e.x.cwiseAbs().maxCoeff() == doctest::Approx(10.0).epsilon(1e-14));
        CHECK((e.phi * e.s - e.x).norm() < 1e-12 * e.x.norm());
        CHECK((e.phi.transpose() * e.x - e.s).norm() < 1e-12 * e.x.norm());
        const double l1 = (e.s - e.s_k).lpNorm<1>();
        CHECK(std::abs(l1 - e.eps_k) <= 1e-12 * std::max(1.0, e.s_k.lpNorm<1>()));
        CHECK(std::abs(e.eps_k - rel * e.s_k.lpNorm<1>()) <= 1e-12 * e.s_k.lpNorm<1>());
        CHECK(e.eps_k_rel == rel);
        CHECK(e.eps_k_l2 == doctest::Approx((e.s - e.s_k).norm()));
        CHECK(e.eps_k_l2 <= e.eps_k + 1e-15);
    }
}

TEST_CASE("message generation rejects bad parameters") {
    CHECK_THROWS_AS(generate_messages(0, 1, 0.0, 10.0, 1), InvalidParameters);
    CHECK_THROWS_AS(generate_messages(10, 0, 0.0, 10.0, 1), InvalidParameters);
    CHECK_THROWS_AS(generate_messages(10, 11, 0.0, 10.0, 1), InvalidParameters);
    CHECK_THROWS_AS(generate_messages(10, 2, -0.1, 10.0, 1), InvalidParameters);
    CHECK_THROWS_AS(generate_messages(10, 2, 0.0, 0.0, 1), InvalidParameters);
}

TEST_CASE("error_db") {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd y = x;
    CHECK(error_db(x, y) == kExactRecoveryDb);
    y(2) = 0.1;
    CHECK(error_db(x, y) == doctest::Approx(-20.0));
    y(2) = 10.0;
    CHECK(error_db(x, y) == doctest::Approx(20.0));
}

TEST_CASE("message energy concentrates") {
    // ||x||^2 over seeds: k uniform entries scaled so that the peak of x is q_max.
    double mean_db = 0.0;
    const int seeds = 120;
    for (int s = 0; s < seeds; ++s) {
        const MessageEnsemble e = generate_messages(100, 5, 0.0, 10.0, static_cast<std::uint64_t>(s));
        mean_db += 20.0 * std::log10(e.x.norm());
    }
    mean_db /= seeds;
    CHECK(mean_db > 30.0);
    CHECK(mean_db < 44.0);
}
