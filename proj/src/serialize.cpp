#include "cphase/serialize.hpp"

#include "cphase/errors.hpp"

#include <fstream>

namespace cphase {

namespace {

void check_header(const Json& j, std::string_view format)
{
    if (!j.is_object() || !j.contains("format") || j.at("format") != format)
        throw FormatError("expected a '" + std::string(format) + "' document");
    if (!j.contains("version") || j.at("version") != kFormatVersion)
        throw FormatError("unsupported " + std::string(format) + " version");
}

std::string_view kind_name(BlockKind kind)
{
    switch (kind) {
    case BlockKind::heavy:
        return "heavy";
    case BlockKind::countsketch:
        return "countsketch";
    case BlockKind::tail:
        return "tail";
    case BlockKind::sign:
        return "sign";
    }
    return "?";
}

} // namespace

Json config_to_json(const EnsembleConfig& c)
{
    return Json{{"C0", c.C0},
                {"C1", c.C1},
                {"c1", c.c1},
                {"c_F", c.c_F},
                {"rep_log_n", c.rep_log_n},
                {"countsketch_rows", c.countsketch_rows},
                {"countsketch_reps", c.countsketch_reps},
                {"heavy_K", c.heavy_K},
                {"heavy_reps", c.heavy_reps},
                {"heavy_buckets", c.heavy_buckets},
                {"top_select", c.top_select},
                {"f_copies", c.f_copies},
                {"seed", c.seed}};
}

EnsembleConfig config_from_json(const Json& j, EnsembleConfig c)
{
    if (!j.is_object())
        throw FormatError("config: expected a flat JSON object");
    for (const auto& [key, value] : j.items()) {
        auto real = [&](double& field) {
            if (!value.is_number())
                throw FormatError("config: '" + key + "' must be a number");
            field = value.get<double>();
        };
        auto count = [&](std::size_t& field) {
            if (!value.is_number_unsigned())
                throw FormatError("config: '" + key + "' must be a nonnegative integer");
            field = value.get<std::size_t>();
        };
        if (key == "C0")
            real(c.C0);
        else if (key == "C1")
            real(c.C1);
        else if (key == "c1")
            real(c.c1);
        else if (key == "c_F")
            real(c.c_F);
        else if (key == "rep_log_n")
            count(c.rep_log_n);
        else if (key == "countsketch_rows")
            count(c.countsketch_rows);
        else if (key == "countsketch_reps")
            count(c.countsketch_reps);
        else if (key == "heavy_K")
            count(c.heavy_K);
        else if (key == "heavy_reps")
            count(c.heavy_reps);
        else if (key == "heavy_buckets")
            count(c.heavy_buckets);
        else if (key == "top_select")
            count(c.top_select);
        else if (key == "f_copies")
            count(c.f_copies);
        else if (key == "seed") {
            if (!value.is_number_unsigned())
                throw FormatError("config: 'seed' must be a nonnegative integer");
            c.seed = value.get<std::uint64_t>();
        } else
            throw FormatError("config: unknown key '" + key + "'");
    }
    return c;
}

EnsembleConfig load_config(const std::filesystem::path& path, EnsembleConfig base)
{
    return config_from_json(read_json(path), base);
}

Json ensemble_to_json(const SensingEnsemble& e, bool include_rows)
{
    Json blocks = Json::array();
    for (const Block& b : e.blocks()) {
        Json jb{{"name", b.name()},   {"kind", kind_name(b.kind())}, {"level", b.level()},
                {"copy", b.copy()},   {"offset", b.offset()},        {"rows", b.rows()}};
        if (include_rows) {
            Json rows = Json::array();
            for (const auto& row : b.materialize(e.n()).rows()) {
                Json jr = Json::array();
                for (const RowEntry& entry : row)
                    jr.push_back(entry.sign * (static_cast<std::int64_t>(entry.col) + 1));
                rows.push_back(std::move(jr));
            }
            jb["entries"] = std::move(rows);
        }
        blocks.push_back(std::move(jb));
    }
    return Json{{"format", "cphase-ensemble"},
                {"version", kFormatVersion},
                {"n", e.n()},
                {"k", e.k()},
                {"seed", e.seed()},
                {"composition", e.composition() == Composition::full ? "full" : "signs-only"},
                {"config", config_to_json(e.config())},
                {"blocks", std::move(blocks)}};
}

SensingEnsemble ensemble_from_json(const Json& j)
{
    check_header(j, "cphase-ensemble");
    try {
        const auto n = j.at("n").get<std::size_t>();
        const auto k = j.at("k").get<std::size_t>();
        const auto seed = j.at("seed").get<std::uint64_t>();
        const std::string comp = j.at("composition").get<std::string>();
        if (comp != "full" && comp != "signs-only")
            throw FormatError("ensemble: unknown composition '" + comp + "'");
        SensingEnsemble e = build_ensemble(n, k, config_from_json(j.at("config")), seed,
                                           comp == "full" ? Composition::full : Composition::signs_only);
        const Json& blocks = j.at("blocks");
        if (blocks.size() != e.blocks().size())
            throw FormatError("ensemble: block table does not match the configuration");
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const Json& jb = blocks[b];
            const Block& block = e.blocks()[b];
            if (jb.at("name") != block.name() || jb.at("offset") != block.offset() || jb.at("rows") != block.rows())
                throw FormatError("ensemble: block '" + block.name() + "' does not match the configuration");
            if (!jb.contains("entries"))
                continue;
            std::vector<std::vector<RowEntry>> rows;
            for (const Json& jr : jb.at("entries")) {
                std::vector<RowEntry> row;
                for (const Json& v : jr) {
                    const auto s = v.get<std::int64_t>();
                    if (s == 0)
                        throw FormatError("ensemble: zero column index");
                    row.push_back({static_cast<std::uint32_t>(std::abs(s) - 1), s < 0 ? -1 : 1});
                }
                rows.push_back(std::move(row));
            }
            if (rows.size() != block.rows() || !(SparseSignMatrix::from_rows(n, rows) == block.materialize(n)))
                throw FormatError("ensemble: stored entries of block '" + block.name() + "' differ from the seed");
        }
        return e;
    } catch (const Json::exception& ex) {
        throw FormatError(std::string("ensemble: ") + ex.what());
    }
}

Json measurements_to_json(const Measurements& y)
{
    Json blocks = Json::array();
    for (const BlockRange& b : y.blocks())
        blocks.push_back({{"name", b.name}, {"offset", b.offset}, {"rows", b.rows}});
    return Json{{"format", "cphase-measurements"},
                {"version", kFormatVersion},
                {"blocks", std::move(blocks)},
                {"y", std::vector<double>(y.values().begin(), y.values().end())}};
}

Measurements measurements_from_json(const Json& j)
{
    check_header(j, "cphase-measurements");
    try {
        std::vector<BlockRange> blocks;
        for (const Json& b : j.at("blocks"))
            blocks.push_back({b.at("name").get<std::string>(), b.at("offset").get<std::size_t>(),
                              b.at("rows").get<std::size_t>()});
        return Measurements(j.at("y").get<std::vector<double>>(), std::move(blocks));
    } catch (const Json::exception& ex) {
        throw FormatError(std::string("measurements: ") + ex.what());
    } catch (const DimensionError& ex) {
        throw FormatError(std::string("measurements: ") + ex.what());
    }
}

Json recovery_to_json(const RecoveryResult& r)
{
    Json pairs = Json::array();
    for (const auto& [i, v] : r.x_hat)
        pairs.push_back(Json::array({i, v}));
    Json clusters = Json::array();
    for (const auto& [i, s] : r.clusters)
        clusters.push_back(Json::array({i, s}));
    return Json{{"format", "cphase-recovery"},
                {"version", kFormatVersion},
                {"x_hat", std::move(pairs)},
                {"S0", r.S0},
                {"S1", r.S1},
                {"S2", r.S2},
                {"L", r.L.L},
                {"L_per_rep", r.L.per_rep},
                {"clusters", std::move(clusters)},
                {"signs_failed", r.signs_failed},
                {"low_confidence", r.low_confidence},
                {"diagnostics",
                 {{"measurements_read", r.diagnostics.measurements_read},
                  {"entries_touched", r.diagnostics.entries_touched},
                  {"pairs_tested", r.diagnostics.pairs_tested},
                  {"edges", r.diagnostics.edges},
                  {"sign_level", r.diagnostics.sign_level},
                  {"sign_graphs", r.diagnostics.sign_graphs}}}};
}

std::vector<double> interleave(std::span<const Complex> x)
{
    std::vector<double> v;
    v.reserve(2 * x.size());
    for (const Complex& c : x) {
        v.push_back(c.real());
        v.push_back(c.imag());
    }
    return v;
}

ComplexSignal deinterleave(std::span<const double> v)
{
    if (v.size() % 2 != 0)
        throw FormatError("interleaved complex array has odd length");
    ComplexSignal x(v.size() / 2);
    for (std::size_t t = 0; t < x.size(); ++t)
        x[t] = {v[2 * t], v[2 * t + 1]};
    return x;
}

Json signal_to_json(std::span<const double> x)
{
    return Json{{"format", "cphase-signal"},
                {"version", kFormatVersion},
                {"n", x.size()},
                {"values", std::vector<double>(x.begin(), x.end())}};
}

Json signal_to_json(std::span<const Complex> x)
{
    return Json{{"format", "cphase-signal"}, {"version", kFormatVersion}, {"n", x.size()}, {"interleaved", interleave(x)}};
}

bool is_complex_signal(const Json& j)
{
    check_header(j, "cphase-signal");
    return j.contains("interleaved");
}

std::vector<double> real_signal_from_json(const Json& j)
{
    if (is_complex_signal(j))
        throw FormatError("signal: expected a real signal");
    try {
        auto x = j.at("values").get<std::vector<double>>();
        if (x.size() != j.at("n").get<std::size_t>())
            throw FormatError("signal: length does not match n");
        return x;
    } catch (const Json::exception& ex) {
        throw FormatError(std::string("signal: ") + ex.what());
    }
}

ComplexSignal complex_signal_from_json(const Json& j)
{
    if (!is_complex_signal(j))
        throw FormatError("signal: expected a complex signal");
    try {
        auto x = deinterleave(j.at("interleaved").get<std::vector<double>>());
        if (x.size() != j.at("n").get<std::size_t>())
            throw FormatError("signal: length does not match n");
        return x;
    } catch (const Json::exception& ex) {
        throw FormatError(std::string("signal: ") + ex.what());
    }
}

Json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& ex) {
        throw FormatError(path.string() + ": " + ex.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write " + path.string());
    out << j.dump(1) << '\n';
}

} // namespace cphase

namespace cphase {

Json spec_to_json(const TrialSpec& s)
{
    return Json{{"n", s.n},
                {"k", s.k},
                {"model", to_string(s.model)},
                {"tail_norm", s.tail_norm},
                {"spike_tail_ratio", s.spike_tail_ratio},
                {"decay", s.decay},
                {"trials", s.trials},
                {"seed", s.seed},
                {"config", config_to_json(s.config)},
                {"pipeline", to_string(s.pipeline)},
                {"replicas", s.replicas},
                {"threads", s.threads}};
}

TrialSpec spec_from_json(const Json& j, TrialSpec s)
{
    if (!j.is_object())
        throw FormatError("trial spec: expected a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "n")
                s.n = value.get<std::size_t>();
            else if (key == "k")
                s.k = value.get<std::size_t>();
            else if (key == "model")
                s.model = parse_model(value.get<std::string>());
            else if (key == "tail_norm")
                s.tail_norm = value.get<double>();
            else if (key == "spike_tail_ratio")
                s.spike_tail_ratio = value.get<double>();
            else if (key == "decay")
                s.decay = value.get<double>();
            else if (key == "trials")
                s.trials = value.get<std::size_t>();
            else if (key == "seed")
                s.seed = value.get<std::uint64_t>();
            else if (key == "config")
                s.config = config_from_json(value, s.config);
            else if (key == "pipeline")
                s.pipeline = parse_pipeline(value.get<std::string>());
            else if (key == "replicas")
                s.replicas = value.get<std::size_t>();
            else if (key == "threads")
                s.threads = value.get<std::size_t>();
            else
                throw FormatError("trial spec: unknown key '" + key + "'");
        }
    } catch (const Json::exception& ex) {
        throw FormatError(std::string("trial spec: ") + ex.what());
    }
    return s;
}

Json summary_to_json(const TrialReport& report)
{
    const TrialAggregates a = report.aggregates();
    Json spec = spec_to_json(report.spec);
    spec.erase("threads");
    return Json{{"format", "cphase-summary"},
                {"version", kFormatVersion},
                {"spec", std::move(spec)},
                {"trials", a.trials},
                {"successes", a.successes},
                {"exact", a.exact},
                {"hard_errors", a.hard_errors},
                {"success_rate", a.success_rate},
                {"success_ci95", {a.success_ci.lo, a.success_ci.hi}},
                {"success_factor", kSuccessFactor},
                {"median_err_over_tail", a.median_ratio},
                {"median_reads", a.median_reads},
                {"median_entries", a.median_entries},
                {"median_s2", a.median_s2}};
}

} // namespace cphase
