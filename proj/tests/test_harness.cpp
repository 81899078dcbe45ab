#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linksim/harness.hpp"

using namespace linksim;
using doctest::Approx;

namespace {

Scenario scenario_2x2(int n, CodeKind kind, Schedule sched, Compensation comp) {
    Scenario sc;
    sc.code.n = n;
    sc.code.k = n / 2;
    sc.code.f = 2;
    sc.code.kind = kind;
    sc.idd.turbo_iters = 3;
    sc.idd.inner_iters = 10;
    sc.idd.schedule = sched;
    sc.idd.comp = comp;
    sc.idd.detector.system.n_tx = 2;
    sc.idd.detector.system.n_rx = 2;
    sc.idd.detector.system.fading = FadingMode::Block;
    sc.idd.detector.system.fading_blocks = 2;
    sc.idd.detector.system.symbols_per_codeword = n / 2;
    sc.seed = 5;
    return sc;
}

}  // namespace

TEST_CASE("csv emission: header, rows, formatting") {
    CHECK(emit_csv({}) ==
          "snr_db,ber,fer,frames,bit_errors,mean_inner_iters,mean_outer_iters,complex_mults,wall_time_s,"
          "gamma_neg_events\n");

    SimRecord r;
    r.snr_db = 0.0;
    r.ber = 1e-3;
    r.fer = 2e-2;
    r.frames = 100;
    r.bit_errors = 51;
    r.mean_inner_iters = 3.25;
    r.mean_outer_iters = 1.5;
    r.complex_mults = 123456.0;
    r.wall_time_s = 0.125;
    r.gamma_neg_events = 2;
    std::string csv = emit_csv({r});
    CHECK(csv ==
          "snr_db,ber,fer,frames,bit_errors,mean_inner_iters,mean_outer_iters,complex_mults,wall_time_s,"
          "gamma_neg_events\n"
          "0.00000e+00,1.00000e-03,2.00000e-02,100,51,3.25000e+00,1.50000e+00,1.23456e+05,1.25000e-01,2\n");
}

TEST_CASE("csv rows sort ascending and round-trip") {
    SimRecord a, b;
    a.snr_db = 4.0;
    a.ber = 1e-4;
    a.frames = 10;
    b.snr_db = 2.0;
    b.ber = 1e-2;
    b.frames = 20;
    std::string csv = emit_csv({a, b});
    std::vector<SimRecord> back = parse_csv(csv);
    REQUIRE(back.size() == 2);
    CHECK(back[0].snr_db == 2.0);
    CHECK(back[1].snr_db == 4.0);
    CHECK(emit_csv(back) == csv);  // reproduces to emitted precision
}

TEST_CASE("snr range parsing") {
    std::vector<double> r = parse_snr_range("0:2:6");
    REQUIRE(r.size() == 4);
    CHECK(r[3] == Approx(6.0));
    CHECK_THROWS(parse_snr_range("6:0:0"));
    CHECK_THROWS(parse_snr_range("nonsense"));
}

TEST_CASE("noiseless point: zero errors, zero fer") {
    Scenario sc = scenario_2x2(256, CodeKind::RootCheck, Schedule::ROLBP, Compensation::On);
    TannerGraph g = build_scenario_graph(sc);
    StopRule stop;
    stop.fixed_frames = 4;
    SimRecord r = run_point(sc, g, 300.0, stop);
    CHECK(r.ber == 0.0);
    CHECK(r.fer == 0.0);
    CHECK(r.bit_errors == 0);
    CHECK(r.mean_inner_iters == Approx(1.0));
}

TEST_CASE("identical invocation reproduces the CSV except wall time") {
    Scenario sc = scenario_2x2(256, CodeKind::RootCheck, Schedule::ROLBP, Compensation::On);
    TannerGraph g = build_scenario_graph(sc);
    StopRule stop;
    stop.fixed_frames = 24;
    SimRecord r1 = run_point(sc, g, 4.0, stop);
    SimRecord r2 = run_point(sc, g, 4.0, stop);
    r1.wall_time_s = r2.wall_time_s = 0.0;
    CHECK(emit_csv({r1}) == emit_csv({r2}));
}

TEST_CASE("worker count does not change the counts") {
    Scenario sc = scenario_2x2(256, CodeKind::RootCheck, Schedule::ROLBP, Compensation::On);
    TannerGraph g = build_scenario_graph(sc);
    StopRule stop;
    stop.fixed_frames = 24;
    SimRecord r1 = run_point(sc, g, 4.0, stop, 1);
    SimRecord r3 = run_point(sc, g, 4.0, stop, 3);
    CHECK(r1.bit_errors == r3.bit_errors);
    CHECK(r1.frames == r3.frames);
    CHECK(r1.frame_errors == r3.frame_errors);
    CHECK(r1.total_inner_iters == r3.total_inner_iters);
}

TEST_CASE("doubling the fixed frame count roughly doubles the error count") {
    Scenario sc = scenario_2x2(256, CodeKind::Standard, Schedule::BP, Compensation::Off);
    TannerGraph g = build_scenario_graph(sc);
    StopRule stop;
    stop.fixed_frames = 60;
    SimRecord half = run_point(sc, g, 3.0, stop);
    stop.fixed_frames = 120;
    SimRecord full = run_point(sc, g, 3.0, stop);
    REQUIRE(half.bit_errors > 50);  // enough statistics at this SNR
    double ratio = static_cast<double>(full.bit_errors) / half.bit_errors;
    CHECK(ratio > 1.4);
    CHECK(ratio < 2.6);
}

TEST_CASE("target-error stop rule halts once enough errors are seen") {
    Scenario sc = scenario_2x2(256, CodeKind::Standard, Schedule::BP, Compensation::Off);
    TannerGraph g = build_scenario_graph(sc);
    StopRule stop;
    stop.target_bit_errors = 50;
    stop.max_frames = 4000;
    SimRecord r = run_point(sc, g, 2.0, stop);
    CHECK(r.bit_errors >= 50);
    CHECK(r.frames < 4000);
}

TEST_CASE("ber is monotone nonincreasing across a sweep, within 3 sigma") {
    Scenario sc = scenario_2x2(256, CodeKind::RootCheck, Schedule::BP, Compensation::On);
    StopRule stop;
    stop.fixed_frames = 150;
    std::vector<SimRecord> recs = run_sweep(sc, {2.0, 5.0, 8.0}, stop);
    const double bits_per_frame = 2.0 * sc.code.k;
    for (size_t i = 1; i < recs.size(); ++i) {
        double p = recs[i - 1].ber;
        double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / (stop.fixed_frames * bits_per_frame));
        CHECK(recs[i].ber <= recs[i - 1].ber + 3.0 * sigma);
    }
}

TEST_CASE("complexity ordering in measured complex multiplications per iteration") {
    StopRule stop;
    stop.fixed_frames = 6;
    std::map<Schedule, double> per_iter;
    for (Schedule s : {Schedule::BP, Schedule::LBP, Schedule::ROLBP, Schedule::RLBP, Schedule::NWBP}) {
        Scenario sc = scenario_2x2(128, CodeKind::RootCheck, s, Compensation::On);
        TannerGraph g = build_scenario_graph(sc);
        SimRecord r = run_point(sc, g, 5.0, stop);
        REQUIRE(r.decoder_iterations > 0);
        per_iter[s] = static_cast<double>(r.decoder_messages) / 4.0 / r.decoder_iterations;
    }
    CHECK(per_iter[Schedule::NWBP] > per_iter[Schedule::RLBP]);
    CHECK(per_iter[Schedule::RLBP] > per_iter[Schedule::ROLBP]);
    CHECK(per_iter[Schedule::ROLBP] > per_iter[Schedule::BP]);
    CHECK(per_iter[Schedule::BP] == Approx(per_iter[Schedule::LBP]).epsilon(0.02));
}

TEST_CASE("invalid configurations are rejected") {
    Scenario sc = scenario_2x2(256, CodeKind::RootCheck, Schedule::BP, Compensation::On);
    sc.code.k = 100;  // rate != 1/F
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);

    Scenario sc2 = scenario_2x2(256, CodeKind::Standard, Schedule::BP, Compensation::On);
    CHECK_THROWS_AS(sc2.validate(), std::invalid_argument);  // compensation on a standard code

    Scenario sc3 = scenario_2x2(256, CodeKind::Standard, Schedule::BP, Compensation::Off);
    sc3.idd.detector.system.symbols_per_codeword = 100;  // L*m != N
    CHECK_THROWS_AS(sc3.validate(), std::invalid_argument);
}
