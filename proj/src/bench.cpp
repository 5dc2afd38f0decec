#include "cphase/bench.hpp"

#include "cphase/decoder.hpp"
#include "cphase/errors.hpp"
#include "cphase/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <thread>

namespace cphase {

std::string_view to_string(SignalModel m)
{
    switch (m) {
    case SignalModel::exact_sparse:
        return "exact-sparse";
    case SignalModel::spikes_plus_tail:
        return "spikes-plus-gaussian-tail";
    case SignalModel::power_law:
        return "power-law";
    }
    return "?";
}

std::string_view to_string(Pipeline p)
{
    switch (p) {
    case Pipeline::cphase:
        return "cphase";
    case Pipeline::cphase_amplified:
        return "cphase-amplified";
    case Pipeline::prony:
        return "prony";
    }
    return "?";
}

SignalModel parse_model(std::string_view name)
{
    if (name == "exact-sparse")
        return SignalModel::exact_sparse;
    if (name == "spikes-plus-gaussian-tail" || name == "spikes-plus-tail")
        return SignalModel::spikes_plus_tail;
    if (name == "power-law")
        return SignalModel::power_law;
    throw FormatError("unknown signal model '" + std::string(name) + "'");
}

Pipeline parse_pipeline(std::string_view name)
{
    if (name == "cphase")
        return Pipeline::cphase;
    if (name == "cphase-amplified")
        return Pipeline::cphase_amplified;
    if (name == "prony")
        return Pipeline::prony;
    throw FormatError("unknown pipeline '" + std::string(name) + "'");
}

void TrialSpec::validate() const
{
    if (n == 0 || k == 0 || k > n)
        throw ConstructionError("trial spec: need 1 <= k <= n");
    if (trials == 0)
        throw ConstructionError("trial spec: trials must be >= 1");
    if (!(tail_norm > 0.0) || !(spike_tail_ratio > 0.0) || !(decay > 0.0))
        throw ConstructionError("trial spec: model parameters must be positive");
    if (replicas == 0)
        throw ConstructionError("trial spec: replicas must be >= 1");
}

namespace {

std::vector<std::size_t> distinct_positions(std::mt19937_64& rng, std::size_t n, std::size_t k)
{
    std::set<std::size_t> chosen;
    std::uniform_int_distribution<std::size_t> pos(0, n - 1);
    while (chosen.size() < k)
        chosen.insert(pos(rng));
    return {chosen.begin(), chosen.end()};
}

double spike(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double mag = std::exp(u(rng) * std::log(10.0)); // log-uniform on [1, 10]
    return (rng() >> 63) ? -mag : mag;
}

double sum_squares(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x)
        s += v * v;
    return s;
}

} // namespace

std::vector<double> gen_signal(const TrialSpec& spec, std::size_t index)
{
    auto rng = make_stream(spec.seed, "signal", index);
    std::vector<double> x(spec.n, 0.0);
    switch (spec.model) {
    case SignalModel::exact_sparse:
        for (std::size_t p : distinct_positions(rng, spec.n, spec.k))
            x[p] = spike(rng);
        break;
    case SignalModel::spikes_plus_tail: {
        const auto positions = distinct_positions(rng, spec.n, spec.k);
        std::vector<double> spikes;
        for (std::size_t i = 0; i < positions.size(); ++i)
            spikes.push_back(spike(rng));
        const double spike_scale =
            std::sqrt(spec.spike_tail_ratio * spec.tail_norm * spec.tail_norm / sum_squares(spikes));
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<char> is_spike(spec.n, 0);
        for (std::size_t p : positions)
            is_spike[p] = 1;
        double tail = 0.0;
        for (std::size_t i = 0; i < spec.n; ++i)
            if (!is_spike[i]) {
                x[i] = g(rng);
                tail += x[i] * x[i];
            }
        const double tail_scale = tail > 0.0 ? spec.tail_norm / std::sqrt(tail) : 0.0;
        for (double& v : x)
            v *= tail_scale;
        for (std::size_t i = 0; i < positions.size(); ++i)
            x[positions[i]] = spike_scale * spikes[i];
        break;
    }
    case SignalModel::power_law: {
        std::vector<std::size_t> perm(spec.n);
        for (std::size_t i = 0; i < spec.n; ++i)
            perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t r = 0; r < spec.n; ++r) {
            const double mag = std::pow(static_cast<double>(r + 1), -spec.decay);
            x[perm[r]] = (rng() >> 63) ? -mag : mag;
        }
        break;
    }
    }
    return x;
}

ComplexSignal gen_complex_signal(const TrialSpec& spec, std::size_t index)
{
    const auto real = gen_signal(spec, index);
    auto rng = make_stream(spec.seed, "phase", index);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    ComplexSignal x(spec.n);
    for (std::size_t t = 0; t < spec.n; ++t)
        if (real[t] != 0.0)
            x[t] = std::polar(std::abs(real[t]), angle(rng));
    return x;
}

namespace {

void fill_from_recovery(TrialRecord& rec, const std::vector<double>& x, const RecoveryResult& r)
{
    const auto x_hat = r.to_dense(x.size());
    double minus = 0.0, plus = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        minus += (x[i] - x_hat[i]) * (x[i] - x_hat[i]);
        plus += (x[i] + x_hat[i]) * (x[i] + x_hat[i]);
    }
    rec.err2 = std::min(minus, plus);
    rec.s0 = r.S0.size();
    rec.s1 = r.S1.size();
    rec.s2 = r.S2.size();
    rec.L = r.L.L;
    rec.outside_s1 = energy_outside(x, r.S1);
    rec.outside_s2 = energy_outside(x, r.S2);
    std::size_t agree = 0, disagree = 0;
    for (const auto& [i, v] : r.x_hat) {
        if (x[i] == 0.0 || v == 0.0)
            continue;
        ((x[i] > 0.0) == (v > 0.0) ? agree : disagree) += 1;
    }
    rec.sign_errors = std::min(agree, disagree);
    rec.signs_failed = r.signs_failed;
    rec.reads = r.diagnostics.measurements_read;
    rec.entries = r.diagnostics.entries_touched;
}

TrialRecord run_real_trial(const TrialSpec& spec, std::size_t index)
{
    TrialRecord rec;
    rec.index = index;
    const auto x = gen_signal(spec, index);
    rec.norm2 = sum_squares(x);
    rec.tail2 = tail_energy(x, spec.k);
    rec.tail10k2 = tail_energy(x, std::min(10 * spec.k, spec.n));
    rec.err2 = rec.norm2;
    const std::uint64_t ens_seed = derive_seed(spec.seed, "ensemble", index);
    try {
        if (spec.pipeline == Pipeline::cphase) {
            const auto ens = build_ensemble(spec.n, spec.k, spec.config, ens_seed);
            const auto y = apply_phaseless(ens, x);
            rec.measurements = y.size();
            fill_from_recovery(rec, x, decode(ens, y));
        } else {
            std::vector<SensingEnsemble> replicas;
            std::vector<Measurements> ys;
            for (std::size_t r = 0; r < spec.replicas; ++r) {
                const std::uint64_t s = r == 0 ? ens_seed : derive_seed(ens_seed, "replica", r);
                replicas.push_back(build_ensemble(spec.n, spec.k, spec.config, s,
                                                  r == 0 ? Composition::full : Composition::signs_only));
                ys.push_back(apply_phaseless(replicas.back(), x));
                rec.measurements += ys.back().size();
            }
            fill_from_recovery(rec, x, decode_amplified(replicas, ys));
        }
    } catch (const std::exception& e) {
        rec.hard_error = true;
        rec.error = e.what();
        rec.err2 = rec.norm2;
    }
    rec.exact = !rec.hard_error && rec.err2 <= 1e-20 * rec.norm2;
    rec.success = !rec.hard_error && rec.err2 <= kSuccessFactor * rec.tail2 + 1e-20 * rec.norm2;
    return rec;
}

TrialRecord run_prony_trial(const TrialSpec& spec, std::size_t index)
{
    TrialRecord rec;
    rec.index = index;
    const auto x = gen_complex_signal(spec, index);
    for (const Complex& v : x)
        rec.norm2 += std::norm(v);
    const DeterministicScheme scheme{spec.n, spec.k};
    rec.measurements = scheme.rows();
    try {
        const auto y = det_measure(scheme, x);
        const auto x_hat = det_recover(scheme, y);
        const double rel = phase_invariant_error(x_hat, x);
        rec.err2 = rel * rel * (rec.norm2 > 0.0 ? rec.norm2 : 1.0);
        rec.success = rel < 1e-8;
        rec.exact = rec.success;
        rec.exact_mod_reflection = rec.success || phase_invariant_error(x_hat, conj_reversal(x)) < 1e-8;
    } catch (const std::exception& e) {
        rec.hard_error = true;
        rec.error = e.what();
        rec.err2 = rec.norm2;
    }
    return rec;
}

} // namespace

TrialReport run_trials(const TrialSpec& spec)
{
    spec.validate();
    if (spec.pipeline != Pipeline::prony)
        spec.config.validate(spec.k);
    TrialReport report;
    report.spec = spec;
    report.records.resize(spec.trials);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < spec.trials; i = next++) {
            const auto start = std::chrono::steady_clock::now();
            TrialRecord rec = spec.pipeline == Pipeline::prony ? run_prony_trial(spec, i) : run_real_trial(spec, i);
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            report.records[i] = std::move(rec);
        }
    };
    std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, spec.trials);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    return report;
}

TrialAggregates TrialReport::aggregates() const
{
    TrialAggregates a;
    a.trials = records.size();
    std::vector<double> ratios, reads, entries, s2;
    for (const auto& r : records) {
        a.successes += r.success;
        a.exact += r.exact;
        a.hard_errors += r.hard_error;
        if (r.tail2 > 0.0)
            ratios.push_back(r.err2 / r.tail2);
        reads.push_back(static_cast<double>(r.reads));
        entries.push_back(static_cast<double>(r.entries));
        s2.push_back(static_cast<double>(r.s2));
    }
    if (a.trials > 0) {
        a.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.trials);
        a.success_ci = clopper_pearson(a.successes, a.trials);
    }
    a.median_ratio = median(ratios);
    a.median_reads = median(reads);
    a.median_entries = median(entries);
    a.median_s2 = median(s2);
    return a;
}

void write_csv(std::ostream& out, const TrialReport& report)
{
    out << "index,hard_error,success,exact,exact_mod_reflection,err2,tail2,norm2,tail10k2,L,s0,s1,s2,"
           "outside_s1,outside_s2,sign_errors,signs_failed,measurements,reads,entries,wall_ms,error\n";
    const auto old_precision = out.precision(17);
    for (const auto& r : report.records) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), '"', '\'');
        out << r.index << ',' << r.hard_error << ',' << r.success << ',' << r.exact << ',' << r.exact_mod_reflection
            << ',' << r.err2 << ',' << r.tail2 << ',' << r.norm2 << ',' << r.tail10k2 << ',' << r.L << ',' << r.s0
            << ',' << r.s1 << ',' << r.s2 << ',' << r.outside_s1 << ',' << r.outside_s2 << ',' << r.sign_errors << ','
            << r.signs_failed << ',' << r.measurements << ',' << r.reads << ',' << r.entries << ',' << r.wall_ms
            << ",\"" << err << "\"\n";
    }
    out.precision(old_precision);
}

CalibrationResult calibrate(const TrialSpec& base, const std::vector<EnsembleConfig>& grid, double target)
{
    if (grid.empty())
        throw ConstructionError("calibrate: empty grid");
    CalibrationResult result;
    bool have_best = false;
    for (const EnsembleConfig& config : grid) {
        TrialSpec spec = base;
        spec.config = config;
        CalibrationCandidate c;
        c.config = config;
        const auto counts = row_count(build_ensemble(spec.n, spec.k, config, spec.seed));
        c.rows = counts.total;
        if (spec.pipeline == Pipeline::cphase_amplified)
            c.rows += (spec.replicas - 1) * counts.sign;
        const auto agg = run_trials(spec).aggregates();
        c.success_rate = agg.success_rate;
        c.hard_errors = agg.hard_errors;
        const bool passes = c.success_rate >= target;
        if (passes && (!result.met || c.rows < result.best.rows)) {
            result.best = c;
            result.met = true;
        } else if (!result.met && (!have_best || c.success_rate > result.best.success_rate)) {
            result.best = c;
        }
        have_best = true;
        result.evaluated.push_back(std::move(c));
    }
    return result;
}

} // namespace cphase
