// Command-line front end for the CV-QKD carrier-phase simulation toolkit.
//
// Subcommands:
//   run       one (pilot SNR, repetition) cell, prints the records
//   sweep     pilot-SNR sweep with repetitions, writes a CSV/JSON table
//   calibrate prints the shot-noise-unit scale for the configured chain
//   selftest  fast invariant battery
//
// Exit codes: 0 success, 1 invalid config, 2 runtime failure, 3 selftest failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvqkd/harness.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    bool have_seed = false;
    std::uint64_t seed = 0;
    bool have_pilot_bw = false;
    double pilot_bw = 0.0;
    std::string method;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    cmd->add_option("--set", opts.overrides, "config override key=value (repeatable)");
    cmd->add_option("--seed", opts.seed, "master RNG seed")->each([&](const std::string&) {
        opts.have_seed = true;
    });
    cmd->add_option("--pilot-bw", opts.pilot_bw, "pilot band-pass bandwidth in Hz")
        ->each([&](const std::string&) { opts.have_pilot_bw = true; });
    cmd->add_option("--method", opts.method, "CPE method: argument|ukf|both");
}

cvqkd::ExperimentConfig build_config(const CommonOptions& opts) {
    cvqkd::ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = cvqkd::load_config_file(opts.config_path, cfg);
    for (const auto& kv : opts.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        cfg.apply_key_value(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.have_seed) cfg.rng_seed = opts.seed;
    if (opts.have_pilot_bw) cfg.pilot_filter_bandwidth_hz = opts.pilot_bw;
    if (!opts.method.empty()) {
        auto m = cvqkd::parse_cpe_method(opts.method);
        if (!m) throw std::invalid_argument("unknown method '" + opts.method + "'");
        cfg.cpe_method = *m;
    }
    cfg.validate();
    return cfg;
}

// "10,12,14" or "10:30:2" or a single value.
std::vector<double> parse_snr_list(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 1;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw std::invalid_argument("bad SNR range '" + text + "', expected lo:hi:step");
        for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
        return out;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        out.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int cmd_run(const CommonOptions& opts, double snr, bool have_snr, std::size_t repetition,
            const std::string& format) {
    auto cfg = build_config(opts);
    if (have_snr) cfg.pilot_snr_db = snr;
    auto result = cvqkd::run_single(cfg, repetition);

    if (format == "json") {
        std::printf("{\n  \"pilot_snr_db\": %.9g,\n  \"repetition\": %zu,\n  \"methods\": [\n",
                    cfg.pilot_snr_db, repetition);
        for (std::size_t i = 0; i < result.methods.size(); ++i) {
            const auto& mr = result.methods[i];
            std::printf("    {\"method\": \"%s\", \"failed\": %s, \"x\": %.9g, \"y\": %.9g, "
                        "\"z\": %.9g, \"T\": %.9g, \"xi_snu\": %.9g, \"phase_mse_rad2\": %.9g}%s\n",
                        cvqkd::to_string(mr.estimator).c_str(), mr.failed ? "true" : "false",
                        mr.record.x, mr.record.y, mr.record.z, mr.record.transmittance_t,
                        mr.record.excess_noise_xi, mr.phase_mse_rad2,
                        i + 1 < result.methods.size() ? "," : "");
        }
        std::printf("  ]\n}\n");
        return 0;
    }

    std::printf("pilot_snr_db=%.9g repetition=%zu seed=%llu\n", cfg.pilot_snr_db, repetition,
                static_cast<unsigned long long>(cfg.rng_seed));
    for (const auto& mr : result.methods) {
        if (mr.failed) {
            std::printf("%-8s FAILED: %s\n", cvqkd::to_string(mr.estimator).c_str(),
                        mr.error.c_str());
            continue;
        }
        std::printf("%-8s x=%.6f y=%.6f z=%.6f T=%.6f xi=%.6g SNU phase_mse=%.6g rad^2\n",
                    cvqkd::to_string(mr.estimator).c_str(), mr.record.x, mr.record.y, mr.record.z,
                    mr.record.transmittance_t, mr.record.excess_noise_xi, mr.phase_mse_rad2);
    }
    return 0;
}

int cmd_sweep(const CommonOptions& opts, const std::string& snr_text, std::size_t reps,
              bool have_reps, const std::string& out_path, const std::string& format_text,
              std::size_t parallel) {
    auto cfg = build_config(opts);

    cvqkd::SweepSpec spec;
    spec.base_config = cfg;
    spec.pilot_snr_db_values = parse_snr_list(snr_text);
    spec.repetitions = have_reps ? reps : cfg.repetitions;
    switch (cfg.cpe_method) {
        case cvqkd::CpeMethod::argument: spec.methods = {cvqkd::Estimator::argument}; break;
        case cvqkd::CpeMethod::ukf: spec.methods = {cvqkd::Estimator::ukf}; break;
        case cvqkd::CpeMethod::both: break;  // default pair
    }

    auto format = cvqkd::parse_output_format(format_text);
    if (!format) throw std::invalid_argument("unknown format '" + format_text + "'");

    const std::size_t workers = parallel == 0 ? cvqkd::default_parallelism() : parallel;
    auto table = cvqkd::run_sweep(spec, workers);
    cvqkd::emit_results(table, out_path, *format);
    std::printf("wrote %zu rows to %s\n", table.rows.size(), out_path.c_str());
    return 0;
}

int cmd_calibrate(const CommonOptions& opts) {
    auto cfg = build_config(opts);
    const auto cal = cvqkd::snu_calibrate(cfg);
    std::printf("measured_variance=%.9g\nvariance_scale=%.9g\namplitude_scale=%.9g\n"
                "noise_floor_snu=%.9g\n",
                cal.measured_variance, cal.variance_scale, cal.amplitude_scale,
                cal.noise_floor_snu);
    return 0;
}

int cmd_selftest() {
    const auto report = cvqkd::selftest();
    for (const auto& check : report.checks) {
        std::printf("%-34s %s (%.1f ms)%s%s\n", check.name.c_str(),
                    check.passed ? "PASS" : "FAIL", check.wall_ms,
                    check.detail.empty() ? "" : " - ", check.detail.c_str());
    }
    return report.all_passed() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CV-QKD pilot-tone carrier-phase simulation"};
    app.require_subcommand(1);

    CommonOptions run_opts, sweep_opts, cal_opts;

    auto* run = app.add_subcommand("run", "run one repetition and print its records");
    add_common(run, run_opts);
    double run_snr = 0.0;
    bool run_have_snr = false;
    std::size_t run_rep = 0;
    std::string run_format = "text";
    run->add_option("--snr", run_snr, "pilot SNR in dB")->each([&](const std::string&) {
        run_have_snr = true;
    });
    run->add_option("--rep", run_rep, "repetition index");
    run->add_option("--format", run_format, "text|json");

    auto* sweep = app.add_subcommand("sweep", "pilot SNR sweep, results to a file");
    add_common(sweep, sweep_opts);
    std::string sweep_snr, sweep_out = "results.csv", sweep_format = "csv";
    std::size_t sweep_reps = 0, sweep_parallel = 0;
    bool sweep_have_reps = false;
    sweep->add_option("--snr", sweep_snr, "SNR list 'a,b,c' or range 'lo:hi:step' in dB");
    sweep->add_option("--reps", sweep_reps, "repetitions per SNR")->each([&](const std::string&) {
        sweep_have_reps = true;
    });
    sweep->add_option("--out", sweep_out, "output path");
    sweep->add_option("--format", sweep_format, "csv|json");
    sweep->add_option("--parallel", sweep_parallel,
                      "worker threads (default: CVQKD_PARALLEL or hardware)");

    auto* calibrate = app.add_subcommand("calibrate", "print the shot-noise-unit scale");
    add_common(calibrate, cal_opts);

    app.add_subcommand("selftest", "run the invariant battery");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_opts, run_snr, run_have_snr, run_rep, run_format);
        if (sweep->parsed())
            return cmd_sweep(sweep_opts, sweep_snr, sweep_reps, sweep_have_reps, sweep_out,
                             sweep_format, sweep_parallel);
        if (calibrate->parsed()) return cmd_calibrate(cal_opts);
        return cmd_selftest();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
