#pragma once

// Scoring of the equivalence loop against known equivalences, and the
// receiver-size sweep.

#include "esg/equivalence.hpp"

#include <fstream>
#include <sstream>

namespace esg {

/// Known minimal equivalences of one target, as canonical candidate texts.
/// The first entry is the "named" equivalence whose discovery iteration is tracked.
struct GroundTruth {
    std::string target; ///< signature, e.g. "clear()"
    std::vector<std::string> known;

    std::size_t total() const { return known.size(); }
    bool contains(const std::string& text) const { return std::find(known.begin(), known.end(), text) != known.end(); }

    void validate() const
    {
        if (known.empty()) throw Error("ground truth for " + target + " lists no equivalences");
        std::set<std::string> seen(known.begin(), known.end());
        if (seen.size() != known.size()) throw Error("ground truth for " + target + " lists an equivalence twice");
    }

    /// Format: "target <signature>" then one candidate per line; '#' starts a comment.
    static GroundTruth parse(const SubjectApi& api, std::string_view text)
    {
        GroundTruth gt;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.rfind("target ", 0) == 0) {
                if (!gt.target.empty()) throw Error("ground truth line " + std::to_string(no) + ": second target line");
                gt.target = api.sig(api.resolve(detail::trim(line.substr(7)))).signature();
                continue;
            }
            if (gt.target.empty()) throw Error("ground truth line " + std::to_string(no) + ": expected 'target <method>'");
            try {
                gt.known.push_back(format_candidate(api, parse_candidate(api, line)));
            } catch (const Error& e) {
                throw Error("ground truth line " + std::to_string(no) + ": " + e.what());
            }
        }
        if (gt.target.empty()) throw Error("ground truth names no target");
        gt.validate();
        return gt;
    }

    static GroundTruth load(const SubjectApi& api, const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw Error("cannot read ground truth file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(api, buf.str());
    }

    std::string serialize() const
    {
        std::string out = "target " + target + "\n";
        for (const auto& k : known) out += k + "\n";
        return out;
    }
};

/// Ground truth from exhaustive small-state validation of all single-call bodies.
inline GroundTruth derived_truth(const SubjectApi& api, MethodId target, const ElementList& pool = {-1, 0, 1, 10, 100, 7, 42})
{
    GroundTruth gt;
    gt.target = api.sig(target).signature();
    for (const auto& c : derive_ground_truth(api, target, pool)) gt.known.push_back(format_candidate(api, c));
    return gt;
}

struct LoopLog {
    std::size_t scenario_set = 0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    std::vector<std::string> found;
    std::vector<std::size_t> found_iteration;
    std::vector<bool> true_positive;
    std::vector<std::string> refuted;
    std::size_t truth_hits = 0;
};

struct EquivMetrics {
    std::size_t loops = 0;
    std::size_t total = 0;            ///< ground-truth size
    double avg = 0.0;                 ///< reported equivalences per loop
    std::size_t max_t = 0;            ///< distinct known equivalences found in at least one loop
    std::size_t max_r = 0;            ///< most known equivalences found in a single loop
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::optional<double> precision;  ///< absent when nothing was reported
    double recall = 0.0;
    std::optional<double> iterations; ///< median iteration of the named equivalence, where found
    double named_at_first = 0.0;      ///< share of loops finding the named equivalence in iteration 1
};

struct ScoreResult {
    EquivMetrics metrics;
    std::vector<LoopLog> log;
};

struct ScoreConfig {
    SbesConfig sbes;
    ExhaustiveConfig exhaustive;
    std::size_t runs = 30;
    std::uint64_t seed = 0;
};

/// Recomputes the aggregate from the loop log alone.
inline EquivMetrics aggregate(const std::vector<LoopLog>& log, const GroundTruth& truth)
{
    EquivMetrics m;
    m.loops = log.size();
    m.total = truth.total();
    if (log.empty()) return m;
    std::set<std::string> hit_any;
    std::vector<double> named_iters;
    std::size_t named_first = 0, reported = 0;
    double recall_sum = 0.0;
    for (const auto& l : log) {
        reported += l.found.size();
        std::size_t hits = 0;
        for (std::size_t i = 0; i < l.found.size(); ++i) {
            if (l.true_positive[i]) ++m.tp;
            else ++m.fp;
            if (truth.contains(l.found[i])) {
                ++hits;
                hit_any.insert(l.found[i]);
            }
            if (l.found[i] == truth.known.front()) {
                named_iters.push_back(static_cast<double>(l.found_iteration[i]));
                if (l.found_iteration[i] == 1) ++named_first;
            }
        }
        m.max_r = std::max(m.max_r, hits);
        recall_sum += static_cast<double>(hits) / static_cast<double>(truth.total());
    }
    m.avg = static_cast<double>(reported) / static_cast<double>(log.size());
    m.max_t = hit_any.size();
    if (m.tp + m.fp) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    m.recall = recall_sum / static_cast<double>(log.size());
    if (!named_iters.empty()) {
        std::sort(named_iters.begin(), named_iters.end());
        std::size_t n = named_iters.size();
        m.iterations = n % 2 ? named_iters[n / 2] : (named_iters[n / 2 - 1] + named_iters[n / 2]) / 2.0;
    }
    m.named_at_first = static_cast<double>(named_first) / static_cast<double>(log.size());
    return m;
}

/// Runs the loop once per scenario set per run. A reported equivalence is a true
/// positive when it is a known one or survives the exhaustive small-state check.
inline ScoreResult score(const SubjectApi& api, MethodId target, const std::vector<std::vector<Sequence>>& scenario_sets,
                         const GroundTruth& truth, const ScoreConfig& cfg)
{
    if (cfg.runs < 1) throw Error("runs must be at least 1");
    truth.validate();
    if (truth.target != api.sig(target).signature())
        throw Error("ground truth is for " + truth.target + ", not " + api.sig(target).signature());
    std::vector<std::vector<ScenarioPoint>> sets;
    for (const auto& s : scenario_sets) {
        if (s.empty()) throw Error("empty scenario set");
        std::vector<ScenarioPoint> points;
        for (const auto& seq : s) points.push_back(make_point(api, seq, target));
        sets.push_back(std::move(points));
    }
    if (sets.empty()) throw Error("no scenario sets to score");

    ScoreResult out;
    std::map<std::string, bool> verdicts;
    for (std::size_t run = 0; run < cfg.runs; ++run) {
        for (std::size_t k = 0; k < sets.size(); ++k) {
            LoopLog l;
            l.scenario_set = k;
            l.seed = mix_seed(cfg.seed, run * sets.size() + k);
            SbesResult r = sbes_loop(api, sets[k], target, cfg.sbes, l.seed);
            l.iterations = r.iterations;
            l.refuted = r.refuted;
            for (const auto& f : r.found) {
                auto it = verdicts.find(f.text);
                if (it == verdicts.end()) {
                    bool ok = truth.contains(f.text) || !exhaustive_counterexample(api, f.candidate, target, cfg.exhaustive);
                    it = verdicts.emplace(f.text, ok).first;
                }
                l.found.push_back(f.text);
                l.found_iteration.push_back(f.iteration);
                l.true_positive.push_back(it->second);
                if (truth.contains(f.text)) ++l.truth_hits;
            }
            out.log.push_back(std::move(l));
        }
    }
    out.metrics = aggregate(out.log, truth);
    return out;
}

/// Heterogeneous contents of the given size: the value pool first, then fresh integers.
inline ElementList sweep_state(std::size_t n, const ElementList& pool = {-1, 0, 1, 10, 100, 7, 42})
{
    ElementList out;
    std::set<Element> used;
    for (Element v : pool) {
        if (out.size() == n) break;
        if (used.insert(v).second) out.push_back(v);
    }
    for (Element v = 2; out.size() < n; ++v)
        if (used.insert(v).second) out.push_back(v);
    return out;
}

/// One scenario per size: append the sweep contents, then call the target with
/// 99 for elements (a value absent from the contents), 0 for indices and [99]
/// for collections.
inline Sequence sweep_scenario(const SubjectApi& api, MethodId target, std::size_t n)
{
    std::vector<ArgValue> args;
    for (ParamKind k : api.sig(target).params) {
        switch (k) {
        case ParamKind::element: args.emplace_back(Element{99}); break;
        case ParamKind::index:
        case ParamKind::integer: args.emplace_back(Element{0}); break;
        case ParamKind::collection: args.emplace_back(ElementList{99}); break;
        }
    }
    ScenarioPoint p = make_point(api, target, sweep_state(n), std::move(args), n + 2);
    Sequence seq = materialize(api, target, p);
    seq.provenance = Provenance::normalized;
    return seq;
}

struct SweepRow {
    std::size_t size = 0;
    EquivMetrics metrics;
};

inline std::vector<SweepRow> sweep_graph_size(const SubjectApi& api, MethodId target, const std::vector<std::size_t>& sizes,
                                              const GroundTruth& truth, const ScoreConfig& cfg)
{
    std::vector<SweepRow> rows;
    for (std::size_t n : sizes) {
        ScoreConfig c = cfg;
        c.seed = mix_seed(cfg.seed, n);
        rows.push_back({n, score(api, target, {{sweep_scenario(api, target, n)}}, truth, c).metrics});
    }
    return rows;
}

/// First size whose average equals the maximum average.
inline std::optional<std::size_t> peak_size(const std::vector<SweepRow>& rows)
{
    std::optional<std::size_t> best;
    double top = -1.0;
    for (const auto& r : rows)
        if (r.metrics.avg > top) {
            top = r.metrics.avg;
            best = r.size;
        }
    return best;
}

} // namespace esg
