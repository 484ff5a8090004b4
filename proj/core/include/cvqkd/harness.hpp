#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvqkd/config.hpp"
#include "cvqkd/metrics.hpp"

namespace cvqkd {

struct MethodResult {
    Estimator estimator = Estimator::argument;
    ExcessNoiseRecord record;
    double phase_mse_rad2 = 0.0;
    bool failed = false;
    std::string error;
};

struct SingleRunResult {
    std::vector<MethodResult> methods;
};

/// One end-to-end repetition: tx -> channel -> pilot extraction -> CPE (each
/// selected estimator on the same noisy realization) -> receive -> metrics.
/// Deterministic given (config.rng_seed, repetition_index). A failed filter
/// run is returned as a flagged MethodResult, not an exception.
SingleRunResult run_single(const ExperimentConfig& config, std::size_t repetition_index,
                           const std::vector<Estimator>& estimators);

/// Estimators from config.cpe_method.
SingleRunResult run_single(const ExperimentConfig& config, std::size_t repetition_index);

struct SweepSpec {
    std::vector<double> pilot_snr_db_values;  // empty: 10 to 30 dB, step 2
    std::size_t repetitions = 310;
    ExperimentConfig base_config;
    std::vector<Estimator> methods = {Estimator::argument, Estimator::ukf};
};

struct ResultRow {
    double pilot_snr_db = 0.0;
    Estimator method = Estimator::argument;
    double mean_xi_snu = 0.0;
    double stderr_xi = 0.0;
    double mean_t = 0.0;
    double mean_phase_mse_rad2 = 0.0;
    double stderr_phase_mse = 0.0;
    std::size_t repetitions = 0;
    std::size_t failed = 0;
    std::uint64_t master_seed = 0;
    std::string config_digest;
    /// xi recomputed from the pooled x, y, z means (alternative reduction,
    /// emitted alongside the per-repetition mean in the JSON output).
    double pooled_xi_snu = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    ExperimentConfig base_config;
};

/// Runs every (snr, repetition) cell, optionally across worker threads, and
/// aggregates mean and standard error per (snr, method). The reduction is
/// ordered by (snr, method, repetition), so the table is byte-identical for
/// any parallelism level. Failed repetitions are excluded from the means and
/// counted in `failed`.
ResultTable run_sweep(const SweepSpec& spec, std::size_t parallelism);

enum class OutputFormat { csv, json };
std::optional<OutputFormat> parse_output_format(const std::string& s);

std::string results_to_csv(const ResultTable& table);
std::string results_to_json(const ResultTable& table);
void emit_results(const ResultTable& table, const std::string& path, OutputFormat format);

/// Parses the CSV produced by results_to_csv (numbers at their serialized
/// 9-significant-digit precision).
ResultTable parse_results_csv(const std::string& text);

/// Default worker count: CVQKD_PARALLEL env var, else hardware concurrency.
std::size_t default_parallelism();

struct SelftestCheck {
    std::string name;
    bool passed = false;
    double wall_ms = 0.0;
    std::string detail;
};

struct SelftestReport {
    std::vector<SelftestCheck> checks;
    bool all_passed() const;
};

/// Fast end-to-end sanity battery: unscented-transform exactness, filter
/// cascade ISI, phase-noise increment variance, calibration self-consistency,
/// noiseless loopback and parameter validation.
SelftestReport selftest();

}  // namespace cvqkd
