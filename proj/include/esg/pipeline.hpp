#pragma once

// End-to-end driver: classify -> generate -> normalize, with JSON reports and
// on-disk artifacts. Depends on nlohmann/json.

#include "esg/metrics.hpp"
#include "esg/normalizer.hpp"
#include "esg/parser.hpp"
#include "esg/stack_model.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace esg {

using json = nlohmann::ordered_json;

struct RunConfig {
    std::string api = "stack";
    std::string method;
    std::string blacklist_path; ///< empty: built-in Stack patterns
    RemovalMode mode = RemovalMode::both;
    std::uint64_t seed = 0;
    GenConfig gen;
    ProbeConfig probe;
    NormalizeConfig normalize;
    std::string out_dir; ///< empty: nothing is written

    void validate() const
    {
        if (method.empty()) throw Error("no target method given");
        if (normalize.min_elements > normalize.max_elements)
            throw Error("window lower bound exceeds upper bound");
        if (normalize.min_distinct < 1) throw Error("min-distinct must be at least 1");
        gen.validate();
    }
};

struct PhaseTimings {
    double classify = 0, generate = 0, convert = 0, total = 0; ///< milliseconds
};

struct RunReport {
    std::string api;
    std::string method;
    std::uint64_t seed = 0;
    PhaseTimings timings_ms;
    std::map<std::string, std::size_t> method_categories; ///< pure / increasing / decreasing / node-mutating
    std::vector<std::string> allowed;
    std::map<std::string, std::size_t> test_cases;        ///< generated + one entry per category
    NormalizeStats stages;
    std::size_t scenarios = 0;
    std::vector<std::string> files;
};

struct RunResult {
    RunReport report;
    Classification classification;
    std::vector<Sequence> test_cases;
    NormalizeResult normalized;

    bool nil() const { return normalized.nil(); }
};

inline const SubjectApi& require_api(const std::string& name)
{
    if (const SubjectApi* api = find_api(name)) return *api;
    throw Error("unknown api '" + name + "'");
}

inline Blacklist load_blacklist(const std::string& path)
{
    return path.empty() ? default_stack_blacklist() : Blacklist::load(path);
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

inline void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw Error("cannot write '" + p.string() + "'");
}

/// prefix + zero-padded (i + 1) + ext.
inline std::string numbered(const std::string& prefix, std::size_t i, const std::string& ext, int width = 3)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, i + 1);
    return prefix + buf + ext;
}

} // namespace detail

inline json stats_json(const NormalizeStats& s)
{
    return json{{"input", s.input},
                {"truncate_failed", s.truncate_failed},
                {"merge_failed", s.merge_failed},
                {"window_dropped", s.window_dropped},
                {"heterogeneity_dropped", s.heterogeneity_dropped},
                {"duplicates_dropped", s.duplicates_dropped},
                {"emitted", s.emitted}};
}

inline NormalizeStats stats_from_json(const json& j)
{
    NormalizeStats s;
    s.input = j.at("input");
    s.truncate_failed = j.at("truncate_failed");
    s.merge_failed = j.at("merge_failed");
    s.window_dropped = j.at("window_dropped");
    s.heterogeneity_dropped = j.at("heterogeneity_dropped");
    s.duplicates_dropped = j.at("duplicates_dropped");
    s.emitted = j.at("emitted");
    return s;
}

inline json to_json(const RunReport& r)
{
    return json{{"api", r.api},
                {"method", r.method},
                {"seed", r.seed},
                {"timings_ms",
                 {{"classify", r.timings_ms.classify},
                  {"generate", r.timings_ms.generate},
                  {"convert", r.timings_ms.convert},
                  {"total", r.timings_ms.total}}},
                {"method_categories", r.method_categories},
                {"allowed", r.allowed},
                {"test_cases", r.test_cases},
                {"stages", stats_json(r.stages)},
                {"scenarios", r.scenarios},
                {"files", r.files}};
}

inline RunReport report_from_json(const json& j)
{
    RunReport r;
    r.api = j.at("api");
    r.method = j.at("method");
    r.seed = j.at("seed");
    const auto& t = j.at("timings_ms");
    r.timings_ms = {t.at("classify"), t.at("generate"), t.at("convert"), t.at("total")};
    r.method_categories = j.at("method_categories").get<std::map<std::string, std::size_t>>();
    r.allowed = j.at("allowed").get<std::vector<std::string>>();
    r.test_cases = j.at("test_cases").get<std::map<std::string, std::size_t>>();
    r.stages = stats_from_json(j.at("stages"));
    r.scenarios = j.at("scenarios");
    r.files = j.at("files").get<std::vector<std::string>>();
    return r;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Scenario files plus a manifest listing them, in emission order.
inline std::vector<std::string> write_scenarios(const SubjectApi& api, const std::filesystem::path& dir,
                                                const std::string& method, const NormalizeResult& r)
{
    std::filesystem::create_directories(dir);
    std::vector<std::string> files;
    json entries = json::array();
    for (std::size_t i = 0; i < r.scenarios.size(); ++i) {
        const auto& sc = r.scenarios[i];
        std::string name = detail::numbered("scenario_", i, ".scn");
        detail::write_text(dir / name, serialize(api, sc.seq));
        files.push_back(name);
        entries.push_back({{"file", name},
                           {"element_count", sc.element_count},
                           {"distinct_values", sc.distinct_values},
                           {"statements", sc.seq.size()}});
    }
    json manifest{{"api", api.name()}, {"method", method}, {"stages", stats_json(r.stats)}, {"scenarios", entries}};
    detail::write_text(dir / "manifest.json", dump(manifest));
    return files;
}

inline Sequence read_sequence(const SubjectApi& api, const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read '" + p.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_sequence(api, buf.str());
    } catch (const ParseError& e) {
        throw Error(p.filename().string() + ": " + e.what());
    }
}

/// Every file with the given extension, sorted by name.
inline std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::string& ext)
{
    if (!std::filesystem::is_directory(dir)) throw Error("'" + dir.string() + "' is not a directory");
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

inline Classification classify(const SubjectApi& api, const RunConfig& cfg)
{
    MethodId target = api.resolve(cfg.method);
    ProbeConfig probe = cfg.probe;
    probe.seed = cfg.seed;
    return build_allowed(api, target, load_blacklist(cfg.blacklist_path), cfg.mode, probe);
}

inline RunResult run(const RunConfig& cfg)
{
    cfg.validate();
    const SubjectApi& api = require_api(cfg.api);
    MethodId target = api.resolve(cfg.method);
    Blacklist bl = load_blacklist(cfg.blacklist_path);
    RunResult r;
    auto& rep = r.report;
    rep.api = api.name();
    rep.method = api.sig(target).signature();
    rep.seed = cfg.seed;

    auto t_total = detail::Clock::now();
    auto t0 = detail::Clock::now();
    ProbeConfig probe = cfg.probe;
    probe.seed = cfg.seed;
    r.classification = build_allowed(api, target, bl, cfg.mode, probe);
    rep.timings_ms.classify = detail::ms_since(t0);

    t0 = detail::Clock::now();
    GenConfig gen = cfg.gen;
    gen.seed = cfg.seed;
    r.test_cases = generate(api, r.classification.allowed, gen);
    std::vector<Sequence> kept;
    rep.test_cases = {{"generated", r.test_cases.size()},
                      {std::string(to_string(Category::no_target)), 0},
                      {std::string(to_string(Category::target_raises)), 0},
                      {std::string(to_string(Category::target_normal)), 0}};
    for (const auto& tc : r.test_cases) {
        Category c = categorize(api, tc, target);
        ++rep.test_cases[std::string(to_string(c))];
        if (c == Category::target_normal) kept.push_back(tc);
    }
    rep.timings_ms.generate = detail::ms_since(t0);

    t0 = detail::Clock::now();
    r.normalized = normalize_pipeline(api, kept, target, cfg.normalize);
    rep.timings_ms.convert = detail::ms_since(t0);

    for (auto c : {MethodCategory::pure, MethodCategory::increasing, MethodCategory::decreasing,
                   MethodCategory::node_mutating})
        rep.method_categories[std::string(to_string(c))] = 0;
    for (const auto& m : r.classification.methods) ++rep.method_categories[std::string(to_string(m.category))];
    for (MethodId m : r.classification.allowed.methods) rep.allowed.push_back(api.sig(m).signature());
    rep.stages = r.normalized.stats;
    rep.scenarios = r.normalized.scenarios.size();

    if (!cfg.out_dir.empty()) rep.files = write_scenarios(api, cfg.out_dir, rep.method, r.normalized);
    rep.timings_ms.total = detail::ms_since(t_total);
    if (!cfg.out_dir.empty()) detail::write_text(std::filesystem::path(cfg.out_dir) / "report.json", dump(to_json(rep)));
    return r;
}

struct RepeatReport {
    std::vector<RunReport> runs;
    std::size_t min = 0;
    std::size_t max = 0;
    double avg = 0.0;
};

/// Seed of the i-th repetition.
inline std::uint64_t repeat_seed(std::uint64_t base, std::size_t i) { return mix_seed(base, 1000 + i); }

/// n independent runs; run i writes into <out>/run_<i> when an output directory is set.
inline RepeatReport repeat(const RunConfig& cfg, std::size_t n)
{
    if (n < 1) throw Error("repeat count must be at least 1");
    RepeatReport out;
    for (std::size_t i = 0; i < n; ++i) {
        RunConfig c = cfg;
        c.seed = repeat_seed(cfg.seed, i);
        if (!cfg.out_dir.empty()) c.out_dir = (std::filesystem::path(cfg.out_dir) / detail::numbered("run_", i, "")).string();
        out.runs.push_back(run(c).report);
    }
    out.min = out.max = out.runs.front().scenarios;
    std::size_t sum = 0;
    for (const auto& r : out.runs) {
        out.min = std::min(out.min, r.scenarios);
        out.max = std::max(out.max, r.scenarios);
        sum += r.scenarios;
    }
    out.avg = static_cast<double>(sum) / static_cast<double>(n);
    if (!cfg.out_dir.empty()) {
        json j{{"runs", json::array()}, {"min", out.min}, {"max", out.max}, {"avg", out.avg}};
        for (const auto& r : out.runs) j["runs"].push_back(to_json(r));
        detail::write_text(std::filesystem::path(cfg.out_dir) / "repeat.json", dump(j));
    }
    return out;
}

inline json to_json(const RepeatReport& r)
{
    json j{{"runs", json::array()}, {"min", r.min}, {"max", r.max}, {"avg", r.avg}};
    for (const auto& x : r.runs) j["runs"].push_back(to_json(x));
    return j;
}

inline json to_json(const EquivMetrics& m)
{
    json j{{"loops", m.loops}, {"total", m.total}, {"avg", m.avg},     {"max_t", m.max_t},
           {"max_r", m.max_r}, {"tp", m.tp},       {"fp", m.fp},       {"precision", nullptr},
           {"recall", m.recall}, {"iterations", nullptr}, {"named_at_first", m.named_at_first}};
    if (m.precision) j["precision"] = *m.precision;
    if (m.iterations) j["iterations"] = *m.iterations;
    return j;
}

inline json to_json(const LoopLog& l)
{
    json found = json::array();
    for (std::size_t i = 0; i < l.found.size(); ++i)
        found.push_back({{"body", l.found[i]}, {"iteration", l.found_iteration[i]}, {"tp", bool(l.true_positive[i])}});
    return json{{"scenario_set", l.scenario_set}, {"seed", l.seed},       {"iterations", l.iterations},
                {"found", found},                 {"refuted", l.refuted}, {"truth_hits", l.truth_hits}};
}

/// Splits scenarios into consecutive sets of `per_set` after a seeded shuffle;
/// a trailing short set is kept.
inline std::vector<std::vector<Sequence>> scenario_sets(std::vector<Sequence> scenarios, std::size_t per_set,
                                                        std::uint64_t seed)
{
    if (per_set < 1) throw Error("scenarios per set must be at least 1");
    Rng rng(seed);
    rng.shuffle(scenarios);
    std::vector<std::vector<Sequence>> out;
    for (std::size_t i = 0; i < scenarios.size(); i += per_set)
        out.emplace_back(scenarios.begin() + static_cast<std::ptrdiff_t>(i),
                         scenarios.begin() + static_cast<std::ptrdiff_t>(std::min(i + per_set, scenarios.size())));
    return out;
}

} // namespace esg
