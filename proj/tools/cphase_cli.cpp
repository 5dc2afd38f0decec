// cphase: command-line front end for the sensing / decoding pipeline and the
// benchmark harness.

#include "cphase/bench.hpp"
#include "cphase/decoder.hpp"
#include "cphase/errors.hpp"
#include "cphase/prony.hpp"
#include "cphase/serialize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cphase;

namespace {

struct Options {
    std::size_t n = 4096;
    std::size_t k = 10;
    std::size_t trials = 10;
    std::uint64_t seed = 1;
    std::string config;
    std::string model = "exact-sparse";
    std::string pipeline = "cphase";
    std::string out = "cphase_out";
    std::string spec;
    std::string grid;
    double target = 2.0 / 3.0;
    bool with_rows = false;
};

void add_common(CLI::App* app, Options& o)
{
    app->add_option("--n", o.n, "signal length");
    app->add_option("--k", o.k, "sparsity");
    app->add_option("--trials", o.trials, "number of signals / trials");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--config", o.config, "flat JSON file of EnsembleConfig fields");
    app->add_option("--model", o.model, "exact-sparse | spikes-plus-gaussian-tail | power-law");
    app->add_option("--pipeline", o.pipeline, "cphase | cphase-amplified | prony");
    app->add_option("--out", o.out, "output directory");
}

EnsembleConfig config_for(const Options& o)
{
    EnsembleConfig base = EnsembleConfig::defaults(o.n, o.k);
    return o.config.empty() ? base : load_config(o.config, base);
}

TrialSpec spec_for(const Options& o)
{
    TrialSpec s;
    s.n = o.n;
    s.k = o.k;
    s.trials = o.trials;
    s.seed = o.seed;
    s.model = parse_model(o.model);
    s.pipeline = parse_pipeline(o.pipeline);
    s.config = config_for(o);
    if (!o.spec.empty())
        s = spec_from_json(read_json(o.spec), s);
    return s;
}

std::string numbered(const std::string& stem, std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%04zu.json", i);
    return stem + buf;
}

std::vector<fs::path> json_files(const fs::path& dir)
{
    std::vector<fs::path> files;
    if (!fs::is_directory(dir))
        throw FormatError("missing directory " + dir.string());
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_gen(const Options& o)
{
    TrialSpec s = spec_for(o);
    s.validate();
    const fs::path dir = fs::path(o.out) / "signals";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < s.trials; ++i) {
        if (s.pipeline == Pipeline::prony)
            write_json(dir / numbered("signal", i), signal_to_json(gen_complex_signal(s, i)));
        else
            write_json(dir / numbered("signal", i), signal_to_json(gen_signal(s, i)));
    }
    std::cout << "wrote " << s.trials << " signals to " << dir.string() << '\n';
    return 0;
}

int cmd_sense(const Options& o)
{
    const fs::path root(o.out);
    const auto files = json_files(root / "signals");
    if (files.empty())
        throw FormatError("no signals under " + (root / "signals").string());
    fs::create_directories(root / "measurements");
    const Json first = read_json(files.front());
    const std::size_t n = first.at("n").get<std::size_t>();

    if (is_complex_signal(first)) {
        const DeterministicScheme scheme{n, o.k};
        write_json(root / "scheme.json",
                   Json{{"format", "cphase-deterministic"}, {"version", kFormatVersion}, {"n", n}, {"k", o.k}});
        for (std::size_t i = 0; i < files.size(); ++i) {
            const auto y = det_measure(scheme, complex_signal_from_json(read_json(files[i])));
            const Measurements m(y, {{"B", 0, 2 * o.k}, {"A", 2 * o.k, 2 * o.k - 1}});
            write_json(root / "measurements" / numbered("measurement", i), measurements_to_json(m));
        }
    } else {
        Options sized = o;
        sized.n = n;
        const SensingEnsemble ens = build_ensemble(n, o.k, config_for(sized), o.seed);
        write_json(root / "ensemble.json", ensemble_to_json(ens, o.with_rows));
        for (std::size_t i = 0; i < files.size(); ++i) {
            const auto x = real_signal_from_json(read_json(files[i]));
            write_json(root / "measurements" / numbered("measurement", i),
                       measurements_to_json(apply_phaseless(ens, x)));
        }
    }
    std::cout << "sensed " << files.size() << " signals\n";
    return 0;
}

int cmd_decode(const Options& o)
{
    const fs::path root(o.out);
    const auto files = json_files(root / "measurements");
    fs::create_directories(root / "recovery");
    int status = 0;
    if (fs::exists(root / "scheme.json")) {
        const Json j = read_json(root / "scheme.json");
        const DeterministicScheme scheme{j.at("n").get<std::size_t>(), j.at("k").get<std::size_t>()};
        for (std::size_t i = 0; i < files.size(); ++i) {
            const Measurements m = measurements_from_json(read_json(files[i]));
            Json out{{"format", "cphase-recovery"}, {"version", kFormatVersion}};
            try {
                out["x_hat_interleaved"] = interleave(det_recover(scheme, m.values()));
            } catch (const Error& e) {
                out["error"] = e.what();
                status = 1;
            }
            write_json(root / "recovery" / numbered("recovery", i), out);
        }
    } else {
        const SensingEnsemble ens = ensemble_from_json(read_json(root / "ensemble.json"));
        for (std::size_t i = 0; i < files.size(); ++i) {
            const Measurements m = measurements_from_json(read_json(files[i]));
            Json out;
            try {
                out = recovery_to_json(decode(ens, m));
            } catch (const Error& e) {
                out = Json{{"format", "cphase-recovery"}, {"version", kFormatVersion}, {"error", e.what()}};
                status = 1;
            }
            write_json(root / "recovery" / numbered("recovery", i), out);
        }
    }
    std::cout << "decoded " << files.size() << " measurement files\n";
    return status;
}

int report_and_write(const TrialReport& report, const fs::path& dir)
{
    fs::create_directories(dir);
    std::ofstream csv(dir / "trials.csv");
    write_csv(csv, report);
    const Json summary = summary_to_json(report);
    write_json(dir / "summary.json", summary);
    const auto a = report.aggregates();
    std::cout << to_string(report.spec.pipeline) << " n=" << report.spec.n << " k=" << report.spec.k
              << " trials=" << a.trials << " success=" << a.successes << " rate=" << a.success_rate << " ci95=["
              << a.success_ci.lo << ", " << a.success_ci.hi << "] hard_errors=" << a.hard_errors << '\n';
    return a.hard_errors == 0 ? 0 : 1;
}

int cmd_bench(const Options& o)
{
    return report_and_write(run_trials(spec_for(o)), o.out);
}

int cmd_prony(Options o)
{
    o.pipeline = "prony";
    o.model = "exact-sparse";
    return report_and_write(run_trials(spec_for(o)), o.out);
}

/// Grid file: {"C0": [0.25, 0.5], "c_F": [0.5, 1.0], ...}; the cartesian
/// product is taken over the listed keys starting from the base config.
std::vector<EnsembleConfig> expand_grid(const Json& grid, const EnsembleConfig& base)
{
    std::vector<EnsembleConfig> configs{base};
    for (const auto& [key, values] : grid.items()) {
        if (!values.is_array() || values.empty())
            throw FormatError("grid: '" + key + "' must be a nonempty array");
        std::vector<EnsembleConfig> next;
        for (const EnsembleConfig& c : configs)
            for (const Json& v : values)
                next.push_back(config_from_json(Json{{key, v}}, c));
        configs = std::move(next);
    }
    return configs;
}

int cmd_calibrate(const Options& o)
{
    const TrialSpec base = spec_for(o);
    const auto grid = o.grid.empty() ? std::vector<EnsembleConfig>{base.config}
                                     : expand_grid(read_json(o.grid), base.config);
    const CalibrationResult result = calibrate(base, grid, o.target);
    const fs::path dir(o.out);
    fs::create_directories(dir);
    Json evaluated = Json::array();
    for (const auto& c : result.evaluated)
        evaluated.push_back({{"config", config_to_json(c.config)},
                             {"rows", c.rows},
                             {"success_rate", c.success_rate},
                             {"hard_errors", c.hard_errors}});
    write_json(dir / "calibration.json", Json{{"format", "cphase-calibration"},
                                              {"version", kFormatVersion},
                                              {"target", o.target},
                                              {"met", result.met},
                                              {"evaluated", std::move(evaluated)}});
    write_json(dir / "defaults.json", Json{{"format", "cphase-defaults"},
                                           {"version", kFormatVersion},
                                           {"n", base.n},
                                           {"k", base.k},
                                           {"model", to_string(base.model)},
                                           {"pipeline", to_string(base.pipeline)},
                                           {"target", o.target},
                                           {"met", result.met},
                                           {"success_rate", result.best.success_rate},
                                           {"rows", result.best.rows},
                                           {"config", config_to_json(result.best.config)}});
    std::cout << (result.met ? "target met" : "target NOT met") << ": rate=" << result.best.success_rate
              << " rows=" << result.best.rows << " (" << result.evaluated.size() << " configs evaluated)\n";
    return result.met ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"compressive phase retrieval: sensing, decoding and benchmarks"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "write test signals to <out>/signals");
    auto* sense = app.add_subcommand("sense", "measure <out>/signals into <out>/measurements");
    auto* dec = app.add_subcommand("decode", "decode <out>/measurements into <out>/recovery");
    auto* bench = app.add_subcommand("bench", "run seeded trials, write trials.csv and summary.json");
    auto* cal = app.add_subcommand("calibrate", "pick the cheapest grid config meeting a target rate");
    auto* prony = app.add_subcommand("prony", "benchmark the deterministic 4k-1 measurement scheme");
    for (auto* sub : {gen, sense, dec, bench, cal, prony})
        add_common(sub, o);
    sense->add_flag("--with-rows", o.with_rows, "store every sparse row in ensemble.json");
    bench->add_option("--spec", o.spec, "TrialSpec JSON file (overrides flags)");
    cal->add_option("--spec", o.spec, "TrialSpec JSON file (overrides flags)");
    cal->add_option("--grid", o.grid, "JSON object mapping config keys to candidate value lists");
    cal->add_option("--target", o.target, "required success rate");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen)
            return cmd_gen(o);
        if (*sense)
            return cmd_sense(o);
        if (*dec)
            return cmd_decode(o);
        if (*bench)
            return cmd_bench(o);
        if (*cal)
            return cmd_calibrate(o);
        if (*prony)
            return cmd_prony(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
