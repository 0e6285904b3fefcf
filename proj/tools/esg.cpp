// esg: execution scenario generator command line.
//
// Exit status: 0 scenarios produced (or command succeeded), 2 no scenario
// survived normalization, 1 configuration or runtime error.

#include "esg/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace esg;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_nil = 2;

std::uint64_t default_seed()
{
    if (const char* s = std::getenv("ESG_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw Error(std::string("ESG_SEED is not an unsigned integer: '") + s + "'");
        }
    }
    return 0;
}

struct Options {
    RunConfig run;
    std::string mode = "both";
    bool json_out = false;
    std::size_t repeats = 5;

    std::string in_dir;
    std::string scenarios_dir;
    std::string truth_path;
    std::string report_path;
    std::string sizes = "0..11";
    std::size_t runs = 30;
    std::size_t per_set = 5;
    bool strict_returns = false;
    bool with_log = false;
    ScoreConfig score;
};

void add_target(CLI::App* app, Options& o)
{
    app->add_option("--api", o.run.api, "Subject api")->capture_default_str();
    app->add_option("--method", o.run.method, "Target method, e.g. \"pop()\" or \"remove(Object)\"")->required();
    app->add_option("--seed", o.run.seed, "Seed (default: $ESG_SEED or 0)");
}

void add_classify(CLI::App* app, Options& o)
{
    app->add_option("--blacklist", o.run.blacklist_path, "Blacklist file (default: built-in Stack patterns)");
    app->add_option("--mode", o.mode, "Decreasing-method removal: blacklist, probe or both")->capture_default_str();
    app->add_option("--probes", o.run.probe.probes, "Random probe states per method")->capture_default_str();
}

void add_gen(CLI::App* app, Options& o)
{
    app->add_option("--budget", o.run.gen.budget, "Sequences generated")->capture_default_str();
    app->add_option("--max-len", o.run.gen.max_length, "Statements per sequence")->capture_default_str();
    app->add_option("--max-receivers", o.run.gen.max_receivers, "Instances per sequence")->capture_default_str();
}

void add_normalize(CLI::App* app, Options& o)
{
    app->add_option("--min-elems", o.run.normalize.min_elements, "Window lower bound")->capture_default_str();
    app->add_option("--max-elems", o.run.normalize.max_elements, "Window upper bound")->capture_default_str();
    app->add_option("--min-distinct", o.run.normalize.min_distinct, "Heterogeneity threshold")->capture_default_str();
}

void add_search(CLI::App* app, Options& o)
{
    app->add_option("--runs", o.runs, "Runs per scenario set")->capture_default_str();
    app->add_option("--iterations", o.score.sbes.iteration_cap, "Iteration cap")->capture_default_str();
    app->add_option("--synth-budget", o.score.sbes.synth.budget, "Work units per synthesis")->capture_default_str();
    app->add_option("--ce-budget", o.score.sbes.counterexample.budget, "Counterexample variants")->capture_default_str();
    app->add_option("--max-body", o.score.sbes.synth.max_length, "Calls per candidate")->capture_default_str();
    app->add_flag("--strict-returns", o.strict_returns, "Compare return values and exception kinds exactly");
    app->add_option("--truth", o.truth_path, "Ground-truth file (default: derived by exhaustive check)");
    app->add_option("--report", o.report_path, "Write the JSON report here");
    app->add_flag("--log", o.with_log, "Include the per-loop log in the report");
}

RemovalMode removal_mode(const std::string& s)
{
    if (auto m = parse_removal_mode(s)) return *m;
    throw Error("unknown removal mode '" + s + "' (expected blacklist, probe or both)");
}

void emit(const json& j, const std::string& path)
{
    if (path.empty()) {
        std::cout << dump(j);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << dump(j);
}

int cmd_classify(Options& o)
{
    const SubjectApi& api = require_api(o.run.api);
    o.run.mode = removal_mode(o.mode);
    Classification c = classify(api, o.run);
    auto names = [&](const std::vector<MethodId>& ids) {
        std::vector<std::string> out;
        for (MethodId m : ids) out.push_back(api.sig(m).signature());
        return out;
    };
    if (o.json_out) {
        json methods = json::array();
        for (const auto& m : c.methods) {
            json e{{"method", api.sig(m.method).qualified()},
                   {"category", to_string(m.category)},
                   {"probe",
                    {{"samples", m.probe.samples},
                     {"changed", m.probe.changed},
                     {"grew", m.probe.grew},
                     {"shrank", m.probe.shrank},
                     {"raised", m.probe.raised}}},
                   {"blacklist_match", nullptr}};
            if (m.blacklist_match) e["blacklist_match"] = *m.blacklist_match;
            methods.push_back(std::move(e));
        }
        std::cout << dump(json{{"api", api.name()},
                               {"target", api.sig(c.allowed.target).signature()},
                               {"allowed", names(c.allowed.methods)},
                               {"removed_pure", names(c.removed_pure)},
                               {"removed_decreasing", names(c.removed_decreasing)},
                               {"methods", methods}});
        return exit_ok;
    }
    std::cout << "allowed:";
    for (const auto& n : names(c.allowed.methods)) std::cout << ' ' << n;
    std::cout << "\npure:";
    for (const auto& n : names(c.removed_pure)) std::cout << ' ' << n;
    std::cout << "\ndecreasing:";
    for (const auto& n : names(c.removed_decreasing)) std::cout << ' ' << n;
    std::cout << '\n';
    return exit_ok;
}

int cmd_gen(Options& o)
{
    const SubjectApi& api = require_api(o.run.api);
    o.run.mode = removal_mode(o.mode);
    MethodId target = api.resolve(o.run.method);
    Classification c = classify(api, o.run);
    GenConfig g = o.run.gen;
    g.seed = o.run.seed;
    auto seqs = generate(api, c.allowed, g);
    std::map<std::string, std::size_t> counts{{"no-target", 0}, {"target-raises", 0}, {"target-normal", 0}};
    std::filesystem::path dir(o.run.out_dir);
    std::filesystem::create_directories(dir);
    json files = json::array();
    std::size_t kept = 0;
    for (const auto& s : seqs) {
        Category cat = categorize(api, s, target);
        ++counts[std::string(to_string(cat))];
        if (cat != Category::target_normal) continue;
        std::string name = detail::numbered("tc_", kept++, ".seq", 5);
        detail::write_text(dir / name, serialize(api, s));
        files.push_back(name);
    }
    json manifest{{"api", api.name()},
                  {"method", api.sig(target).signature()},
                  {"seed", o.run.seed},
                  {"generated", seqs.size()},
                  {"categories", counts},
                  {"files", files}};
    detail::write_text(dir / "manifest.json", dump(manifest));
    std::cout << "generated " << seqs.size() << ", kept " << kept << " (target-normal)\n";
    return exit_ok;
}

int cmd_normalize(Options& o)
{
    const SubjectApi& api = require_api(o.run.api);
    MethodId target = api.resolve(o.run.method);
    if (o.run.normalize.min_elements > o.run.normalize.max_elements)
        throw Error("window lower bound exceeds upper bound");
    std::vector<Sequence> tcs;
    for (const auto& p : list_files(o.in_dir, ".seq")) tcs.push_back(read_sequence(api, p));
    NormalizeResult r = normalize_pipeline(api, tcs, target, o.run.normalize);
    write_scenarios(api, o.run.out_dir, api.sig(target).signature(), r);
    std::cout << dump(stats_json(r.stats));
    return r.nil() ? exit_nil : exit_ok;
}

int cmd_run(Options& o)
{
    o.run.mode = removal_mode(o.mode);
    RunResult r = run(o.run);
    std::cout << dump(to_json(r.report));
    return r.nil() ? exit_nil : exit_ok;
}

int cmd_repeat(Options& o)
{
    o.run.mode = removal_mode(o.mode);
    RepeatReport r = repeat(o.run, o.repeats);
    std::cout << dump(json{{"min", r.min}, {"max", r.max}, {"avg", r.avg}});
    return r.min == 0 ? exit_nil : exit_ok;
}

void finish_score_config(Options& o)
{
    o.score.runs = o.runs;
    o.score.seed = o.run.seed;
    ReturnMode mode = o.strict_returns ? ReturnMode::strict : ReturnMode::relaxed;
    o.score.sbes.synth.mode = mode;
    o.score.sbes.counterexample.mode = mode;
    o.score.exhaustive.mode = mode;
}

GroundTruth truth_for(const SubjectApi& api, MethodId target, const Options& o)
{
    if (!o.truth_path.empty()) return GroundTruth::load(api, o.truth_path);
    return derived_truth(api, target, o.score.sbes.synth.pool);
}

int cmd_eval(Options& o)
{
    const SubjectApi& api = require_api(o.run.api);
    MethodId target = api.resolve(o.run.method);
    finish_score_config(o);
    GroundTruth truth = truth_for(api, target, o);
    std::vector<Sequence> scenarios;
    for (const auto& p : list_files(o.scenarios_dir, ".scn")) scenarios.push_back(read_sequence(api, p));
    if (scenarios.empty()) throw Error("no .scn files in '" + o.scenarios_dir + "'");
    auto sets = scenario_sets(std::move(scenarios), o.per_set, o.run.seed);
    ScoreResult s = score(api, target, sets, truth, o.score);
    json j{{"api", api.name()}, {"method", truth.target}, {"scenario_sets", sets.size()}, {"truth", truth.known}};
    j["metrics"] = to_json(s.metrics);
    if (o.with_log) {
        j["log"] = json::array();
        for (const auto& l : s.log) j["log"].push_back(to_json(l));
    }
    emit(j, o.report_path);
    return exit_ok;
}

std::vector<std::size_t> parse_sizes(const std::string& spec)
{
    std::vector<std::size_t> out;
    try {
        if (auto dots = spec.find(".."); dots != std::string::npos) {
            std::size_t lo = std::stoul(spec.substr(0, dots)), hi = std::stoul(spec.substr(dots + 2));
            if (lo > hi) throw Error("empty size range '" + spec + "'");
            for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
        } else {
            std::size_t start = 0;
            while (start <= spec.size()) {
                auto comma = spec.find(',', start);
                if (comma == std::string::npos) comma = spec.size();
                out.push_back(std::stoul(spec.substr(start, comma - start)));
                start = comma + 1;
            }
        }
    } catch (const std::logic_error&) {
        throw Error("malformed size list '" + spec + "' (expected LO..HI or a comma list)");
    }
    return out;
}

int cmd_sweep(Options& o)
{
    const SubjectApi& api = require_api(o.run.api);
    MethodId target = api.resolve(o.run.method);
    finish_score_config(o);
    GroundTruth truth = truth_for(api, target, o);
    auto rows = sweep_graph_size(api, target, parse_sizes(o.sizes), truth, o.score);
    json table = json::array();
    for (const auto& r : rows) {
        json row = to_json(r.metrics);
        row["size"] = r.size;
        table.push_back(std::move(row));
    }
    json j{{"api", api.name()}, {"method", truth.target}, {"runs", o.runs}, {"rows", table}, {"peak_size", nullptr}};
    if (auto p = peak_size(rows)) j["peak_size"] = *p;
    emit(j, o.report_path);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Execution scenario generator"};
    app.require_subcommand(1);
    Options o;
    try {
        o.run.seed = default_seed();
    } catch (const Error& e) {
        std::cerr << "esg: " << e.what() << '\n';
        return exit_error;
    }

    auto* classify_cmd = app.add_subcommand("classify", "Compute the allowed method list for a target");
    add_target(classify_cmd, o);
    add_classify(classify_cmd, o);
    classify_cmd->add_flag("--json", o.json_out, "Print JSON");

    auto* gen_cmd = app.add_subcommand("gen", "Generate test cases and keep those ending in a normal target call");
    add_target(gen_cmd, o);
    add_classify(gen_cmd, o);
    add_gen(gen_cmd, o);
    gen_cmd->add_option("--out", o.run.out_dir, "Output directory")->required();

    auto* norm_cmd = app.add_subcommand("normalize", "Turn .seq test cases into execution scenarios");
    norm_cmd->add_option("--api", o.run.api, "Subject api")->capture_default_str();
    norm_cmd->add_option("--method", o.run.method, "Target method")->required();
    norm_cmd->add_option("--in", o.in_dir, "Directory of .seq files")->required();
    norm_cmd->add_option("--out", o.run.out_dir, "Output directory")->required();
    add_normalize(norm_cmd, o);

    auto* run_cmd = app.add_subcommand("run", "classify, generate and normalize");
    auto* repeat_cmd = app.add_subcommand("repeat", "Repeat run with derived seeds");
    for (auto* c : {run_cmd, repeat_cmd}) {
        add_target(c, o);
        add_classify(c, o);
        add_gen(c, o);
        add_normalize(c, o);
        c->add_option("--out", o.run.out_dir, "Output directory");
    }
    repeat_cmd->add_option("-n,--repeats", o.repeats, "Number of runs")->capture_default_str();

    auto* eval_cmd = app.add_subcommand("eval", "Score scenarios with the equivalence search");
    add_target(eval_cmd, o);
    eval_cmd->add_option("--scenarios", o.scenarios_dir, "Directory of .scn files")->required();
    eval_cmd->add_option("--per-set", o.per_set, "Scenarios per set")->capture_default_str();
    add_search(eval_cmd, o);

    auto* sweep_cmd = app.add_subcommand("sweep", "Score one canonical scenario per receiver size");
    add_target(sweep_cmd, o);
    sweep_cmd->add_option("--sizes", o.sizes, "LO..HI or a comma list")->capture_default_str();
    add_search(sweep_cmd, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (*classify_cmd) return cmd_classify(o);
        if (*gen_cmd) return cmd_gen(o);
        if (*norm_cmd) return cmd_normalize(o);
        if (*run_cmd) return cmd_run(o);
        if (*repeat_cmd) return cmd_repeat(o);
        if (*eval_cmd) return cmd_eval(o);
        if (*sweep_cmd) return cmd_sweep(o);
    } catch (const std::exception& e) {
        std::cerr << "esg: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
