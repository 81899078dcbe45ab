#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/detector.hpp"
#include "linksim/rng.hpp"

using namespace linksim;
using doctest::Approx;

namespace {

MatrixC random_channel(int rows, int cols, uint64_t seed) {
    Rng rng(seed);
    MatrixC h(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) h(i, j) = rng.cgaussian();
    return h;
}

SystemConfig sys_2x2(int l = 512) {
    SystemConfig s;
    s.n_tx = 2;
    s.n_rx = 2;
    s.fading_blocks = 2;
    s.symbols_per_codeword = l;
    s.fading = FadingMode::Block;
    return s;
}

}  // namespace

TEST_CASE("mmse filter: identity channel with unit loading") {
    MatrixC h = MatrixC::Identity(2, 2);
    VectorC w = mmse_filter(h, 1.0);
    CHECK(std::abs(w(0) - cd(0.5, 0.0)) < 1e-12);  // (I + I)^-1 e1
    CHECK(std::abs(w(1)) < 1e-12);
}

TEST_CASE("mmse filter: zero-forcing limit") {
    MatrixC h = random_channel(2, 2, 3);
    VectorC w = mmse_filter(h, 1e-12);
    VectorC resp = h.adjoint() * w;  // w^H H as a column
    CHECK(std::abs(resp(0) - cd(1.0, 0.0)) < 1e-5);
    CHECK(std::abs(resp(1)) < 1e-5);
}

TEST_CASE("mmse filter satisfies its normal equations") {
    for (uint64_t seed : {10u, 11u, 12u}) {
        MatrixC h = random_channel(4, 4, seed);
        const double s2 = 0.37;
        VectorC w = mmse_filter(h, s2);
        VectorC lhs = (h * h.adjoint() + s2 * MatrixC::Identity(4, 4)) * w;
        CHECK((lhs - h.col(0)).norm() < 1e-10);
    }
}

TEST_CASE("sic cancellation") {
    MatrixC h = random_channel(2, 2, 5);
    Rng rng(6);
    VectorC r(2);
    r << rng.cgaussian(), rng.cgaussian();

    SUBCASE("no detected layers: unchanged") {
        CHECK((sic_cancel(r, h, {}, {}) - r).norm() == 0.0);
    }
    SUBCASE("zero soft symbols: unchanged") {
        CHECK((sic_cancel(r, h, {0}, {cd(0.0, 0.0)}) - r).norm() == 0.0);
    }
    SUBCASE("perfect symbols remove their contribution") {
        cd x0(M_SQRT1_2, -M_SQRT1_2), x1(-M_SQRT1_2, M_SQRT1_2);
        VectorC rx = h.col(0) * x0 + h.col(1) * x1;
        VectorC after = sic_cancel(rx, h, {0}, {x0});
        CHECK((after - h.col(1) * x1).norm() < 1e-12);
    }
}

TEST_CASE("statistics estimation") {
    Rng rng(7);
    const Constellation& q = Constellation::qpsk();
    std::vector<cd> x(2000), u(2000);
    SUBCASE("exact samples give V=1 and floored variance") {
        for (size_t t = 0; t < x.size(); ++t) {
            x[t] = q.points[rng.uniform_int(4)];
            u[t] = x[t];
        }
        LayerStats s = estimate_stats(u, x);
        CHECK(s.v_amp == Approx(1.0));
        CHECK(s.sigma_eps2 == Approx(kSigmaEpsFloor));
    }
    SUBCASE("scaled noisy model recovers the scale") {
        for (size_t t = 0; t < x.size(); ++t) {
            x[t] = q.points[rng.uniform_int(4)];
            u[t] = 0.5 * x[t] + 0.05 * rng.cgaussian();
        }
        LayerStats s = estimate_stats(u, x);
        CHECK(s.v_amp == Approx(0.5).epsilon(0.02));
        CHECK(s.sigma_eps2 == Approx(0.0025).epsilon(0.15));
    }
    SUBCASE("independent samples give V near zero") {
        for (size_t t = 0; t < x.size(); ++t) {
            x[t] = q.points[rng.uniform_int(4)];
            u[t] = rng.cgaussian();
        }
        LayerStats s = estimate_stats(u, x);
        CHECK(std::abs(s.v_amp) < 0.06);
    }
    SUBCASE("empty sample set is an error") {
        CHECK_THROWS_AS(estimate_stats({}, {}), std::invalid_argument);
    }
}

TEST_CASE("best fading block by |det|") {
    MatrixC h1 = 2.0 * MatrixC::Identity(2, 2);
    MatrixC h2 = 0.1 * MatrixC::Identity(2, 2);
    CHECK(best_fading({h1, h2}) == 0);
    CHECK(best_fading({h2, h1}) == 1);
    CHECK(best_fading({h2}) == 0);

    for (uint64_t seed : {21u, 22u, 23u}) {
        MatrixC a = random_channel(2, 2, seed);
        MatrixC b = random_channel(2, 2, seed + 100);
        int expect = std::abs(a.determinant()) >= std::abs(b.determinant()) ? 0 : 1;
        CHECK(best_fading({a, b}) == expect);
    }
}

TEST_CASE("detect frame: zero priors give l_E = l_C and sane high-SNR decisions") {
    const int l = 64;
    SystemConfig sys = sys_2x2(l);
    DetectorConfig cfg;
    cfg.system = sys;
    const Constellation& q = Constellation::qpsk();

    Rng rng(9);
    const double sigma_v2 = 0.02;
    ChannelRealization chan = draw_realization(sys, sigma_v2, rng);

    std::vector<std::vector<uint8_t>> bits(2, std::vector<uint8_t>(2 * l));
    std::vector<std::vector<cd>> sym(2);
    for (int a = 0; a < 2; ++a) {
        for (auto& b : bits[a]) b = rng.bit();
        sym[a] = map_bits(q, bits[a]);
    }
    std::vector<VectorC> rx(l);
    for (int s = 0; s < l; ++s) {
        VectorC x(2);
        x << sym[0][s], sym[1][s];
        rx[s] = transmit(x, chan.at_instant(s, sys), sigma_v2, rng);
    }

    std::vector<std::vector<double>> priors(2, std::vector<double>(2 * l, 0.0));
    DetectorOutput out = detect_frame(rx, chan, priors, cfg);

    // extrinsic identity: with zero priors the APP is the extrinsic itself
    CHECK(out.app.size() == 2);
    CHECK(out.app[0].size() == static_cast<size_t>(2 * l));
    CHECK(out.sigma_eps2[0] > 0.0);
    CHECK(out.sigma_eps2[1] > 0.0);

    int errors = 0;
    for (int a = 0; a < 2; ++a)
        for (int j = 0; j < 2 * l; ++j) errors += (out.app[a][j] < 0) != (bits[a][j] == 1);
    CHECK(errors < 2 * 2 * l / 10);  // low-noise sanity bound
}

TEST_CASE("detect frame: perfect priors and zero noise floor the residual") {
    const int l = 32;
    SystemConfig sys = sys_2x2(l);
    DetectorConfig cfg;
    cfg.system = sys;
    const Constellation& q = Constellation::qpsk();

    Rng rng(12);
    ChannelRealization chan = draw_realization(sys, 0.0, rng);

    std::vector<std::vector<uint8_t>> bits(2, std::vector<uint8_t>(2 * l));
    std::vector<std::vector<cd>> sym(2);
    for (int a = 0; a < 2; ++a) {
        for (auto& b : bits[a]) b = rng.bit();
        sym[a] = map_bits(q, bits[a]);
    }
    std::vector<VectorC> rx(l);
    for (int s = 0; s < l; ++s) {
        VectorC x(2);
        x << sym[0][s], sym[1][s];
        rx[s] = transmit(x, chan.at_instant(s, sys), 0.0, rng);
    }
    std::vector<std::vector<double>> priors(2, std::vector<double>(2 * l));
    for (int a = 0; a < 2; ++a)
        for (int j = 0; j < 2 * l; ++j) priors[a][j] = bits[a][j] ? -40.0 : 40.0;

    DetectorOutput out = detect_frame(rx, chan, priors, cfg);
    for (int a = 0; a < 2; ++a) {
        CHECK(out.sigma_eps2[a] <= 1e-6);
        for (int j = 0; j < 2 * l; ++j) {
            CHECK(std::abs(out.app[a][j]) > 30.0);
            CHECK(((out.app[a][j] < 0) ? 1 : 0) == bits[a][j]);
        }
    }
}

TEST_CASE("sic order is deterministic and sorted by post-filter quality") {
    MatrixC h(2, 2);
    h << cd(3.0, 0.0), cd(0.1, 0.0), cd(0.1, 0.0), cd(0.4, 0.0);
    std::vector<int> order = sic_order(h, 0.1);
    CHECK(order[0] == 0);  // the strong column first
    CHECK(order[1] == 1);
    CHECK(sic_order(h, 0.1) == order);
}

TEST_CASE("fast fading uses a fresh channel per instant") {
    const int l = 16;
    SystemConfig sys = sys_2x2(l);
    sys.fading = FadingMode::Fast;
    sys.fading_blocks = l;
    DetectorConfig cfg;
    cfg.system = sys;
    const Constellation& q = Constellation::qpsk();

    Rng rng(14);
    const double sigma_v2 = 0.01;
    ChannelRealization chan = draw_realization(sys, sigma_v2, rng);
    REQUIRE(chan.h.size() == static_cast<size_t>(l));

    std::vector<std::vector<uint8_t>> bits(2, std::vector<uint8_t>(2 * l));
    std::vector<std::vector<cd>> sym(2);
    for (int a = 0; a < 2; ++a) {
        for (auto& b : bits[a]) b = rng.bit();
        sym[a] = map_bits(q, bits[a]);
    }
    std::vector<VectorC> rx(l);
    for (int s = 0; s < l; ++s) {
        VectorC x(2);
        x << sym[0][s], sym[1][s];
        rx[s] = transmit(x, chan.at_instant(s, sys), sigma_v2, rng);
    }
    std::vector<std::vector<double>> priors(2, std::vector<double>(2 * l, 0.0));
    DetectorOutput out = detect_frame(rx, chan, priors, cfg);
    int errors = 0;
    for (int a = 0; a < 2; ++a)
        for (int j = 0; j < 2 * l; ++j) errors += (out.app[a][j] < 0) != (bits[a][j] == 1);
    CHECK(errors <= 2 * 2 * l / 8);
}
