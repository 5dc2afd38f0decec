#pragma once

#include "cphase/bench.hpp"
#include "cphase/decoder.hpp"
#include "cphase/ensemble.hpp"
#include "cphase/measurements.hpp"
#include "cphase/prony.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace cphase {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

Json config_to_json(const EnsembleConfig& config);
/// Flat object keyed by EnsembleConfig field names; absent keys keep `base`.
/// Unknown keys and wrongly typed values throw FormatError.
EnsembleConfig config_from_json(const Json& j, EnsembleConfig base = {});
EnsembleConfig load_config(const std::filesystem::path& path, EnsembleConfig base = {});

/// Header (n, k, seed, composition, config, block table). With
/// `include_rows`, every block is also written as sparse rows, each row a
/// list of signed 1-based column indices.
Json ensemble_to_json(const SensingEnsemble& ensemble, bool include_rows = false);
/// Rebuilds from the header; stored rows, if present, must match.
SensingEnsemble ensemble_from_json(const Json& j);

Json measurements_to_json(const Measurements& y);
Measurements measurements_from_json(const Json& j);

Json recovery_to_json(const RecoveryResult& r);

/// Real signal: {"values": [...]}. Complex: {"interleaved": [re, im, ...]}.
Json signal_to_json(std::span<const double> x);
Json signal_to_json(std::span<const Complex> x);
std::vector<double> real_signal_from_json(const Json& j);
ComplexSignal complex_signal_from_json(const Json& j);
bool is_complex_signal(const Json& j);

std::vector<double> interleave(std::span<const Complex> x);
ComplexSignal deinterleave(std::span<const double> v);

Json spec_to_json(const TrialSpec& spec);
/// Keys: n, k, model, tail_norm, spike_tail_ratio, decay, trials, seed,
/// config (flat object), pipeline, replicas, threads.
TrialSpec spec_from_json(const Json& j, TrialSpec base = {});
/// Aggregates plus a config echo; no wall-clock fields.
Json summary_to_json(const TrialReport& report);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

} // namespace cphase
