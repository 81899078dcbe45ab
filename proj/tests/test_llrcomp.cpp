#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/llrcomp.hpp"
#include "linksim/rng.hpp"

using namespace linksim;
using doctest::Approx;

TEST_CASE("worked example: alpha=4, beta=1, gamma=3") {
    std::vector<double> in{4.0, -3.0, 1.0, -0.5};
    CompensationResult info;
    std::vector<double> out = compensate(in, 2, &info);
    CHECK(info.alpha == Approx(4.0));
    CHECK(info.beta == Approx(1.0));
    CHECK(info.gamma == Approx(3.0));
    CHECK(info.applied);
    CHECK(out[0] == Approx(4.0));
    CHECK(out[1] == Approx(-3.0));
    CHECK(out[2] == Approx(4.0));    // 1 + 3
    CHECK(out[3] == Approx(-3.5));   // -(0.5 + 3)
}

TEST_CASE("zero shift when parity already matches the systematic maximum") {
    std::vector<double> in{2.0, -1.0, 2.0, -0.3};
    CompensationResult info;
    std::vector<double> out = compensate(in, 2, &info);
    CHECK(info.gamma == Approx(0.0));
    CHECK(out == std::vector<double>{2.0, -1.0, 2.0, -0.3});
}

TEST_CASE("all-zero parity maps to +gamma under sign(0) = +1") {
    std::vector<double> in{5.0, -2.0, 0.0, 0.0};
    std::vector<double> out = compensate(in, 2);
    CHECK(out[2] == Approx(5.0));
    CHECK(out[3] == Approx(5.0));
}

TEST_CASE("negative gamma passes through and is counted") {
    std::vector<double> in{0.5, -0.2, 3.0, -1.0};
    CompensationResult info;
    std::vector<double> out = compensate(in, 2, &info);
    CHECK(info.gamma_negative);
    CHECK_FALSE(info.applied);
    CHECK(out == in);
}

TEST_CASE("wcnc variant: parity becomes sign * alpha") {
    std::vector<double> in{4.0, -3.0, 1.0, -0.5};
    CompensationResult info;
    std::vector<double> out = compensate_wcnc(in, 2, &info);
    CHECK(info.gamma == Approx(4.0));
    CHECK(out[2] == Approx(4.0));
    CHECK(out[3] == Approx(-4.0));

    std::vector<double> zeros{0.0, 0.0, 1.0, -2.0};
    std::vector<double> z = compensate_wcnc(zeros, 2);
    CHECK(z[2] == Approx(0.0));
    CHECK(z[3] == Approx(-0.0));
    CHECK(z[3] == 0.0);
}

TEST_CASE("partition errors") {
    std::vector<double> v{1.0, 2.0};
    CHECK_THROWS_AS(compensate(v, 2), std::invalid_argument);
    CHECK_THROWS_AS(compensate(v, 0), std::invalid_argument);
    CHECK_THROWS_AS(compensate_wcnc(v, 5), std::invalid_argument);
}

TEST_CASE("invariants on random vectors") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 16 + rng.uniform_int(48);
        const int k = 1 + rng.uniform_int(n - 1);
        std::vector<double> in(n);
        for (auto& x : in) x = 10.0 * (rng.uniform() - 0.5);
        // bias so systematic magnitudes dominate in most trials
        for (int j = 0; j < k; ++j) in[j] *= 2.0;

        CompensationResult info;
        std::vector<double> out = compensate(in, k, &info);

        // systematic invariance
        for (int j = 0; j < k; ++j) CHECK(out[j] == in[j]);
        // sign preservation: identical hard decisions wherever input is nonzero
        for (int j = 0; j < n; ++j)
            if (in[j] != 0.0) CHECK(std::signbit(out[j]) == std::signbit(in[j]));
        if (info.applied) {
            // magnitude floor gamma on the parity side
            double min_par = 1e300, max_par = 0.0;
            for (int j = k; j < n; ++j) {
                min_par = std::min(min_par, std::abs(out[j]));
                max_par = std::max(max_par, std::abs(out[j]));
            }
            CHECK(min_par >= info.gamma - 1e-12);
            // max parity magnitude lands exactly on alpha
            CHECK(max_par == Approx(info.alpha).epsilon(1e-12));
        } else {
            CHECK(out == in);
        }

        // wcnc: every parity magnitude equals alpha (signs kept)
        std::vector<double> w = compensate_wcnc(in, k, &info);
        for (int j = k; j < n; ++j) CHECK(std::abs(w[j]) == Approx(info.alpha));
    }
}

TEST_CASE("mask interface matches contiguous interface") {
    std::vector<double> in{1.0, -4.0, 2.0, 0.25, -0.5, 3.0};
    std::vector<double> a = compensate(in, 3);
    std::vector<double> b(in);
    std::vector<int> sys{0, 1, 2}, par{3, 4, 5};
    compensate(std::span<double>(b), sys, par);
    CHECK(a == b);
}
