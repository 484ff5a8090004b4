#include "cvqkd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cvqkd/channel_model.hpp"
#include "cvqkd/cpe.hpp"
#include "cvqkd/random.hpp"
#include "cvqkd/rx_dsp.hpp"
#include "cvqkd/tx_frontend.hpp"
#include "json.hpp"

namespace cvqkd {

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::vector<Estimator> estimators_from_method(CpeMethod m) {
    switch (m) {
        case CpeMethod::argument: return {Estimator::argument};
        case CpeMethod::ukf: return {Estimator::ukf};
        case CpeMethod::both: return {Estimator::argument, Estimator::ukf};
    }
    return {};
}

struct Stats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

Stats mean_stderr(const std::vector<double>& values) {
    Stats s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - s.mean) * (v - s.mean);
        const double var = acc / static_cast<double>(values.size() - 1);
        s.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
    }
    return s;
}

}  // namespace

std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::argument: return "argument";
        case Estimator::ukf: return "ukf";
        case Estimator::perfect: return "perfect";
    }
    return "?";
}

std::optional<Estimator> parse_estimator(const std::string& s) {
    if (s == "argument") return Estimator::argument;
    if (s == "ukf") return Estimator::ukf;
    if (s == "perfect") return Estimator::perfect;
    return std::nullopt;
}

SingleRunResult run_single(const ExperimentConfig& config, std::size_t repetition_index,
                           const std::vector<Estimator>& estimators) {
    const std::size_t sps = config.samples_per_symbol();
    const std::size_t n_samples = config.n_samples();
    const Calibration cal = snu_calibrate(config);

    // Transmit side.
    SymbolFrame alice = generate_symbols(derive_seed(config.rng_seed, repetition_index, "symbols"),
                                         config.n_symbols, config.modulation_variance_snu,
                                         config.symbol_rate_hz);
    ComplexFrame wave = upsample(alice, sps);
    wave = rrc_filter(wave, config.rrc_rolloff, sps);
    wave = upconvert(wave, config.carrier_hz);
    const PilotSpec pilot{config.pilot_freq_hz(), config.pilot_amplitude()};
    wave = add_pilot(wave, pilot);

    // Channel.
    const PhaseTrajectory truth = wiener_phase(
        derive_seed(config.rng_seed, repetition_index, "phase"), n_samples, config.linewidth_hz,
        config.sample_rate_hz);
    wave = apply_phase(wave, truth);
    wave = apply_loss(wave, config.channel_transmittance);
    wave = add_shot_noise(derive_seed(config.rng_seed, repetition_index, "shot"), wave,
                          config.shot_noise_variance);

    // Pilot extraction (shared by both estimators).
    bool needs_pilot = false;
    for (auto e : estimators)
        if (e != Estimator::perfect) needs_pilot = true;
    ComplexFrame pilot_band;
    if (needs_pilot)
        pilot_band = bandpass_pilot(wave, pilot.frequency_hz, config.pilot_filter_bandwidth_hz);

    // Alice's guard-trimmed reference symbols.
    SymbolFrame alice_ref;
    alice_ref.symbol_rate_hz = alice.symbol_rate_hz;
    alice_ref.i.assign(alice.i.begin() + config.guard_symbols, alice.i.end() - config.guard_symbols);
    alice_ref.q.assign(alice.q.begin() + config.guard_symbols, alice.q.end() - config.guard_symbols);

    SingleRunResult result;
    for (Estimator estimator : estimators) {
        MethodResult mr;
        mr.estimator = estimator;
        try {
            PhaseEstimate estimate;
            switch (estimator) {
                case Estimator::argument:
                    estimate = argument_cpe(pilot_band, pilot.frequency_hz);
                    break;
                case Estimator::ukf:
                    estimate = ukf_cpe(pilot_band, pilot.frequency_hz, config.resolved_ukf(),
                                       pilot.amplitude);
                    break;
                case Estimator::perfect:
                    estimate.theta_hat = truth.theta;
                    estimate.method = Estimator::perfect;
                    break;
            }

            SymbolFrame bob = receive(wave, config, estimate, cal.amplitude_scale);
            auto [x, y, z] = second_moments(alice_ref, bob);
            auto [t, xi] = excess_noise(x, y, z, cal.noise_floor_snu);

            mr.record = ExcessNoiseRecord{x,  y,
                                          z,  t,
                                          xi, config.pilot_snr_db,
                                          estimator, config.rng_seed,
                                          repetition_index};
            mr.phase_mse_rad2 = phase_mse(truth, estimate, config.guard_symbols * sps);
        } catch (const EstimatorError& err) {
            mr.failed = true;
            mr.error = err.what();
        }
        result.methods.push_back(std::move(mr));
    }
    return result;
}

SingleRunResult run_single(const ExperimentConfig& config, std::size_t repetition_index) {
    return run_single(config, repetition_index, estimators_from_method(config.cpe_method));
}

std::size_t default_parallelism() {
    if (const char* env = std::getenv("CVQKD_PARALLEL")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

ResultTable run_sweep(const SweepSpec& spec, std::size_t parallelism) {
    std::vector<double> snrs = spec.pilot_snr_db_values;
    if (snrs.empty())
        for (double s = 10.0; s <= 30.0 + 1e-9; s += 2.0) snrs.push_back(s);
    if (spec.repetitions == 0) throw std::invalid_argument("run_sweep: repetitions must be >= 1");
    if (spec.methods.empty()) throw std::invalid_argument("run_sweep: no methods selected");
    if (parallelism == 0) parallelism = 1;

    spec.base_config.validate();
    // Warm the calibration cache before spawning workers.
    const Calibration cal = snu_calibrate(spec.base_config);

    const std::size_t n_jobs = snrs.size() * spec.repetitions;
    std::vector<SingleRunResult> results(n_jobs);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> aborted{false};
    std::string abort_message;
    std::mutex abort_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= n_jobs || aborted.load()) return;
            const std::size_t snr_idx = job / spec.repetitions;
            const std::size_t rep = job % spec.repetitions;
            ExperimentConfig cfg = spec.base_config;
            cfg.pilot_snr_db = snrs[snr_idx];
            try {
                results[job] = run_single(cfg, rep, spec.methods);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(abort_mutex);
                aborted.store(true);
                if (abort_message.empty()) abort_message = e.what();
                return;
            }
        }
    };

    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min(parallelism, n_jobs);
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (aborted.load()) throw std::runtime_error("run_sweep: " + abort_message);

    // Deterministic ordered reduction: (snr, method, repetition).
    ResultTable table;
    table.base_config = spec.base_config;
    const std::string digest = spec.base_config.digest();
    for (std::size_t snr_idx = 0; snr_idx < snrs.size(); ++snr_idx) {
        for (Estimator method : spec.methods) {
            std::vector<double> xis, ts, mses;
            double sum_x = 0.0, sum_y = 0.0, sum_z = 0.0;
            std::size_t failed = 0;
            for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
                const SingleRunResult& r = results[snr_idx * spec.repetitions + rep];
                for (const MethodResult& mr : r.methods) {
                    if (mr.estimator != method) continue;
                    if (mr.failed) {
                        ++failed;
                    } else {
                        xis.push_back(mr.record.excess_noise_xi);
                        ts.push_back(mr.record.transmittance_t);
                        mses.push_back(mr.phase_mse_rad2);
                        sum_x += mr.record.x;
                        sum_y += mr.record.y;
                        sum_z += mr.record.z;
                    }
                }
            }
            ResultRow row;
            row.pilot_snr_db = snrs[snr_idx];
            row.method = method;
            const Stats xi = mean_stderr(xis);
            const Stats mse = mean_stderr(mses);
            row.mean_xi_snu = xi.mean;
            row.stderr_xi = xi.stderr_;
            row.mean_t = mean_stderr(ts).mean;
            row.mean_phase_mse_rad2 = mse.mean;
            row.stderr_phase_mse = mse.stderr_;
            row.repetitions = spec.repetitions;
            row.failed = failed;
            row.master_seed = spec.base_config.rng_seed;
            row.config_digest = digest;
            if (!xis.empty()) {
                const double n_ok = static_cast<double>(xis.size());
                row.pooled_xi_snu =
                    excess_noise(sum_x / n_ok, sum_y / n_ok, sum_z / n_ok, cal.noise_floor_snu)
                        .second;
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::optional<OutputFormat> parse_output_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    return std::nullopt;
}

std::string results_to_csv(const ResultTable& table) {
    std::ostringstream out;
    out << "pilot_snr_db,method,mean_xi_snu,stderr_xi,mean_T,mean_phase_mse_rad2,"
           "stderr_phase_mse,repetitions,failed,master_seed,config_digest\n";
    for (const ResultRow& r : table.rows) {
        out << fmt9(r.pilot_snr_db) << ',' << to_string(r.method) << ',' << fmt9(r.mean_xi_snu)
            << ',' << fmt9(r.stderr_xi) << ',' << fmt9(r.mean_t) << ','
            << fmt9(r.mean_phase_mse_rad2) << ',' << fmt9(r.stderr_phase_mse) << ','
            << r.repetitions << ',' << r.failed << ',' << r.master_seed << ','
            << r.config_digest << '\n';
    }
    return out.str();
}

std::string results_to_json(const ResultTable& table) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : table.base_config.to_key_values()) cfg[k] = v;
    doc["config"] = cfg;
    doc["results"] = nlohmann::ordered_json::array();
    for (const ResultRow& r : table.rows) {
        nlohmann::ordered_json row;
        row["pilot_snr_db"] = fmt9(r.pilot_snr_db);
        row["method"] = to_string(r.method);
        row["mean_xi_snu"] = fmt9(r.mean_xi_snu);
        row["stderr_xi"] = fmt9(r.stderr_xi);
        row["mean_T"] = fmt9(r.mean_t);
        row["mean_phase_mse_rad2"] = fmt9(r.mean_phase_mse_rad2);
        row["stderr_phase_mse"] = fmt9(r.stderr_phase_mse);
        row["repetitions"] = r.repetitions;
        row["failed"] = r.failed;
        row["master_seed"] = r.master_seed;
        row["config_digest"] = r.config_digest;
        row["pooled_xi_snu"] = fmt9(r.pooled_xi_snu);
        doc["results"].push_back(row);
    }
    return doc.dump(2) + "\n";
}

void emit_results(const ResultTable& table, const std::string& path, OutputFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_results: cannot open '" + path + "' for writing");
    out << (format == OutputFormat::csv ? results_to_csv(table) : results_to_json(table));
    if (!out) throw std::runtime_error("emit_results: write failed for '" + path + "'");
}

ResultTable parse_results_csv(const std::string& text) {
    ResultTable table;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 11) throw std::runtime_error("parse_results_csv: bad row");
        ResultRow r;
        r.pilot_snr_db = std::stod(fields[0]);
        auto m = parse_estimator(fields[1]);
        if (!m) throw std::runtime_error("parse_results_csv: bad method");
        r.method = *m;
        r.mean_xi_snu = std::stod(fields[2]);
        r.stderr_xi = std::stod(fields[3]);
        r.mean_t = std::stod(fields[4]);
        r.mean_phase_mse_rad2 = std::stod(fields[5]);
        r.stderr_phase_mse = std::stod(fields[6]);
        r.repetitions = std::stoul(fields[7]);
        r.failed = std::stoul(fields[8]);
        r.master_seed = std::stoull(fields[9]);
        r.config_digest = fields[10];
        table.rows.push_back(std::move(r));
    }
    return table;
}

bool SelftestReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

}  // namespace cvqkd
