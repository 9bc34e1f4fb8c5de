#include <doctest.h>

#include <cmath>
#include <random>

#include "qnc/error.hpp"
#include "qnc/quantizer.hpp"

using namespace qnc;

TEST_CASE("one bit quantizer") {
    const QuantizerSpec q({1}, 1, 5.0);
    CHECK(q.levels(0) == 2);
    CHECK(q.step(0) == 5.0);
    CHECK(q.quantize(0, 3.0) == 2.5);
    CHECK(q.quantize(0, -0.1) == -2.5);
    CHECK(q.quantize(0, 0.0) == 2.5);  // boundary goes up
    CHECK(q.quantize(0, 5.0) == 2.5);
    CHECK(q.quantize(0, 40.0) == 2.5);
    CHECK(q.quantize(0, -40.0) == -2.5);
}

TEST_CASE("q_max = 10 with two cells") {
    const QuantizerSpec q({1}, 1, 10.0);
    CHECK(q.quantize(0, 3.0) == 5.0);
    CHECK(q.quantize(0, -10.0) == -5.0);
}

TEST_CASE("step at L = 20") {
    const QuantizerSpec q({20}, 20, 10.0);
    const double step = 20.0 / 1048576.0;
    CHECK(q.step(0) == doctest::Approx(1.9073e-5).epsilon(1e-4));
    CHECK(q.step(0) == step);
    CHECK(q.quantize(0, -10.0) == doctest::Approx(-10.0 + step / 2).epsilon(1e-15));
    CHECK(q.quantize(0, 10.0) == doctest::Approx(10.0 - step / 2).epsilon(1e-15));
    CHECK(quantizer_step(20, 10.0) == step);
}

TEST_CASE("quantization error is at most half a step inside the range") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int bits : {1, 2, 3, 7, 13, 30, 52}) {
        const QuantizerSpec q({bits}, 1, 10.0);
        for (int i = 0; i < 2000; ++i) {
            const double v = u(rng);
            const double r = q.quantize(0, v);
            CHECK(std::abs(r - v) <= q.step(0) / 2 + 1e-14);
            CHECK(std::abs(r) <= 10.0);
        }
    }
}

TEST_CASE("quantizer is idempotent and monotone") {
    const QuantizerSpec q({6}, 1, 1.0);
    double prev = -2.0;
    for (double v = -1.2; v <= 1.2; v += 0.001) {
        const double r = q.quantize(0, v);
        CHECK(q.quantize(0, r) == r);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("per-edge resolution follows capacity") {
    Deployment d(3, {{1, 0, 1}, {2, 0, 3}, {2, 1, 2}}, 0);
    const QuantizerSpec q(d, 4, 10.0);
    REQUIRE(q.num_quantizers() == 3);
    CHECK(q.levels(0) == 16);
    CHECK(q.levels(1) == (1ULL << 12));
    CHECK(q.levels(2) == 256);
    CHECK(q.steps()(2) == 20.0 / 256);
}

TEST_CASE("quantizer parameter validation") {
    CHECK_THROWS_AS(QuantizerSpec({1}, 0, 10.0), InvalidParameters);
    CHECK_THROWS_AS(QuantizerSpec({1}, 1, 0.0), InvalidParameters);
    CHECK_THROWS_AS(QuantizerSpec({53}, 1, 10.0), InvalidParameters);
}
