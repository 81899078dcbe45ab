#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "linksim/harness.hpp"

namespace {

struct CliOptions {
    int ntx = 2;
    int nrx = 2;
    std::string code = "rootcheck";
    std::string rate = "1/2";
    int n = 1024;
    std::string fading = "block:2";
    std::string schedule = "rolbp";
    std::string comp = "on";
    int outer = 5;
    int inner = 20;
    std::string snr = "0:1:10";
    uint64_t seed = 1;
    uint64_t frames = 0;
    uint64_t target_errors = 200;
    uint64_t max_frames = 100000;
    std::string out_path;
    int workers = 1;
    int fig = 0;
    bool fading_index_ntx = false;
    bool persist_messages = false;
    bool max_log = false;
    bool delta_f_stats = false;
    std::string comp_placement = "prior";
    std::string export_alist;
};

double parse_rate(const std::string& s) {
    if (s == "1/2") return 0.5;
    if (s == "1/4") return 0.25;
    throw std::invalid_argument("unsupported rate (use 1/2 or 1/4): " + s);
}

void apply_fig_preset(CliOptions& o, const CLI::App& app) {
    auto unset = [&](const char* name) { return app.get_option(name)->count() == 0; };
    switch (o.fig) {
        case 1:
            if (unset("--ntx")) o.ntx = 2;
            if (unset("--nrx")) o.nrx = 2;
            if (unset("--rate")) o.rate = "1/2";
            if (unset("--fading")) o.fading = "block:2";
            if (unset("--snr")) o.snr = "0:1:14";
            break;
        case 2:
            if (unset("--ntx")) o.ntx = 4;
            if (unset("--nrx")) o.nrx = 4;
            if (unset("--rate")) o.rate = "1/4";
            if (unset("--fading")) o.fading = "block:2";
            if (unset("--snr")) o.snr = "-2:1:12";
            break;
        case 3:
            if (unset("--ntx")) o.ntx = 2;
            if (unset("--nrx")) o.nrx = 2;
            if (unset("--rate")) o.rate = "1/2";
            if (unset("--fading")) o.fading = "fast";
            if (unset("--snr")) o.snr = "0:1:10";
            break;
        default: break;
    }
}

linksim::Scenario build_scenario(const CliOptions& o) {
    using namespace linksim;
    Scenario sc;
    const double rate = parse_rate(o.rate);
    sc.code.n = o.n;
    sc.code.k = static_cast<int>(std::lround(o.n * rate));
    sc.code.kind = o.code == "standard" ? CodeKind::Standard
                   : o.code == "rootcheck"
                       ? CodeKind::RootCheck
                       : throw std::invalid_argument("unknown code kind: " + o.code);
    sc.standard_var_degree = 3;

    SystemConfig& sys = sc.idd.detector.system;
    sys.n_tx = o.ntx;
    sys.n_rx = o.nrx;
    sys.symbols_per_codeword = o.n / Constellation::qpsk().bits_per_symbol;
    sys.fading_index_ntx = o.fading_index_ntx;
    if (o.fading == "fast") {
        sys.fading = FadingMode::Fast;
        sys.fading_blocks = sys.symbols_per_codeword;
        sc.code.f = 2;  // Root-Check design blocks for fast fading
    } else if (o.fading.rfind("block:", 0) == 0) {
        sys.fading = FadingMode::Block;
        sys.fading_blocks = std::stoi(o.fading.substr(6));
        sc.code.f = sys.fading_blocks;
    } else {
        throw std::invalid_argument("bad fading spec (block:F or fast): " + o.fading);
    }
    if (sc.code.kind == CodeKind::RootCheck) {
        // the code's design blocks follow its rate (rate * F_code = 1)
        sc.code.f = static_cast<int>(std::lround(1.0 / rate));
    } else if (sys.fading == FadingMode::Fast) {
        sc.code.f = 1;
    }

    sc.idd.turbo_iters = o.outer;
    sc.idd.inner_iters = o.inner;
    sc.idd.schedule = schedule_from_string(o.schedule);
    sc.idd.comp = compensation_from_string(o.comp);
    if (sc.code.kind == CodeKind::Standard && sc.idd.comp != Compensation::Off) {
        std::cerr << "note: compensation applies to rootcheck codes only; forcing --comp off\n";
        sc.idd.comp = Compensation::Off;
    }
    sc.idd.persist_messages = o.persist_messages;
    sc.idd.comp_placement = o.comp_placement == "app" ? CompPlacement::DecoderInput : CompPlacement::DetectorPrior;
    sc.idd.detector.max_log = o.max_log;
    sc.idd.detector.delta_f_stats_only = o.delta_f_stats;
    sc.seed = o.seed;
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linksim: LDPC-coded MIMO link simulator (iterative detection and decoding)"};
    CliOptions o;

    app.add_option("--ntx", o.ntx, "transmit antennas");
    app.add_option("--nrx", o.nrx, "receive antennas");
    app.add_option("--code", o.code, "standard|rootcheck")->check(CLI::IsMember({"standard", "rootcheck"}));
    app.add_option("--rate", o.rate, "1/2|1/4");
    app.add_option("--n", o.n, "codeword length in bits");
    app.add_option("--fading", o.fading, "block:F or fast");
    app.add_option("--schedule", o.schedule, "bp|lbp|rbp|nwbp|rlbp|rolbp")
        ->check(CLI::IsMember({"bp", "lbp", "rbp", "nwbp", "rlbp", "rolbp"}));
    app.add_option("--comp", o.comp, "on|off|wcnc")->check(CLI::IsMember({"on", "off", "wcnc"}));
    app.add_option("--outer", o.outer, "outer (turbo) iterations");
    app.add_option("--inner", o.inner, "decoder iterations per activation");
    app.add_option("--snr", o.snr, "SNR sweep start:step:stop [dB]");
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--frames", o.frames, "fixed frame count (overrides target errors)");
    app.add_option("--target-errors", o.target_errors, "stop after this many bit errors");
    app.add_option("--max-frames", o.max_frames, "frame cap for the target-error rule");
    app.add_option("--out", o.out_path, "CSV output path (default stdout)");
    app.add_option("--workers", o.workers, "worker threads");
    app.add_option("--fig", o.fig, "scenario preset 1|2|3")->check(CLI::Range(1, 3));
    app.add_flag("--fading-index-ntx", o.fading_index_ntx, "use n_tx in the fading-index formula");
    app.add_flag("--persist-messages", o.persist_messages, "keep decoder messages across outer iterations");
    app.add_flag("--max-log", o.max_log, "max-log demapping");
    app.add_flag("--delta-f-stats", o.delta_f_stats, "demap all blocks with the best-block statistics");
    app.add_option("--comp-placement", o.comp_placement, "prior|app: where the parity shift is applied")
        ->check(CLI::IsMember({"prior", "app"}));
    app.add_option("--export-alist", o.export_alist, "write the parity-check matrix (alist) and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        apply_fig_preset(o, app);
        linksim::Scenario sc = build_scenario(o);
        sc.validate();

        if (!o.export_alist.empty()) {
            linksim::TannerGraph g = linksim::build_scenario_graph(sc);
            linksim::write_alist_file(g, o.export_alist);
            std::cerr << "wrote " << o.export_alist << " (" << g.num_vars << " x " << g.num_checks << ")\n";
            return 0;
        }

        linksim::StopRule stop;
        stop.fixed_frames = o.frames;
        stop.target_bit_errors = o.target_errors;
        stop.max_frames = o.max_frames;

        std::vector<double> snrs = linksim::parse_snr_range(o.snr);
        linksim::TannerGraph graph = linksim::build_scenario_graph(sc);
        std::vector<linksim::SimRecord> records;
        for (double snr : snrs) {
            linksim::SimRecord r = linksim::run_point(sc, graph, snr, stop, o.workers);
            std::fprintf(stderr, "snr %6.2f dB  ber %.3e  fer %.3e  frames %llu  errors %llu\n", r.snr_db, r.ber,
                         r.fer, static_cast<unsigned long long>(r.frames),
                         static_cast<unsigned long long>(r.bit_errors));
            records.push_back(r);
        }
        std::string csv = linksim::emit_csv(records);
        if (o.out_path.empty()) {
            std::cout << csv;
        } else {
            std::ofstream f(o.out_path);
            if (!f) throw std::runtime_error("cannot open output file: " + o.out_path);
            f << csv;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
