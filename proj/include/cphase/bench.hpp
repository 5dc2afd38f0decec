#pragma once

#include "cphase/ensemble.hpp"
#include "cphase/prony.hpp"
#include "cphase/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cphase {

enum class SignalModel { exact_sparse, spikes_plus_tail, power_law };
enum class Pipeline { cphase, cphase_amplified, prony };

std::string_view to_string(SignalModel m);
std::string_view to_string(Pipeline p);
SignalModel parse_model(std::string_view name);
Pipeline parse_pipeline(std::string_view name);

inline constexpr double kSuccessFactor = 1.8;

struct TrialSpec {
    std::size_t n = 4096;
    std::size_t k = 10;
    SignalModel model = SignalModel::exact_sparse;
    double tail_norm = 1.0;          ///< spikes-plus-tail: ||tail||_2
    double spike_tail_ratio = 100.0; ///< spikes-plus-tail: spike energy / tail energy
    double decay = 1.0;              ///< power-law: |x|_(r) = r^-decay
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    EnsembleConfig config;
    Pipeline pipeline = Pipeline::cphase;
    std::size_t replicas = 3; ///< cphase-amplified: primary + sign-only replicas
    std::size_t threads = 0;  ///< 0 = hardware concurrency

    void validate() const;
};

/// Real test signal for trial `index`; deterministic in (spec.seed, index).
std::vector<double> gen_signal(const TrialSpec& spec, std::size_t index);
/// Complex variant for the Prony pipeline (uniform phases).
ComplexSignal gen_complex_signal(const TrialSpec& spec, std::size_t index);

struct TrialRecord {
    std::size_t index = 0;
    bool hard_error = false;
    std::string error;
    double err2 = 0.0;   ///< min over global sign (phase for Prony) of ||x - x_hat||^2
    double tail2 = 0.0;  ///< ||x_tail(k)||^2
    double norm2 = 0.0;  ///< ||x||^2
    bool success = false;
    bool exact = false;
    bool exact_mod_reflection = false; ///< Prony: equals x or its conjugate reversal up to phase
    std::size_t s0 = 0, s1 = 0, s2 = 0;
    double L = 0.0;
    double tail10k2 = 0.0;    ///< ||x_tail(10k)||^2
    double outside_s1 = 0.0;  ///< ||x restricted off S1||^2
    double outside_s2 = 0.0;
    std::size_t sign_errors = 0; ///< coordinates of S2 with the wrong relative sign
    bool signs_failed = false;
    std::size_t measurements = 0;
    std::size_t reads = 0;
    std::size_t entries = 0;
    double wall_ms = 0.0;
};

struct TrialAggregates {
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::size_t exact = 0;
    std::size_t hard_errors = 0;
    double success_rate = 0.0;
    Interval success_ci;
    double median_ratio = 0.0; ///< median err2 / tail2 over trials with tail2 > 0
    double median_reads = 0.0;
    double median_entries = 0.0;
    double median_s2 = 0.0;
};

struct TrialReport {
    TrialSpec spec;
    std::vector<TrialRecord> records;

    TrialAggregates aggregates() const;
};

TrialReport run_trials(const TrialSpec& spec);

/// Per-trial CSV (wall_ms is the only nondeterministic column).
void write_csv(std::ostream& out, const TrialReport& report);

struct CalibrationCandidate {
    EnsembleConfig config;
    std::size_t rows = 0;
    double success_rate = 0.0;
    std::size_t hard_errors = 0;
};

struct CalibrationResult {
    bool met = false;
    CalibrationCandidate best; ///< cheapest passing config, or highest rate if none passes
    std::vector<CalibrationCandidate> evaluated;
};

/// Evaluates every grid config on the base spec and returns the one with the
/// fewest rows among those meeting `target`.
CalibrationResult calibrate(const TrialSpec& base, const std::vector<EnsembleConfig>& grid, double target);

} // namespace cphase
