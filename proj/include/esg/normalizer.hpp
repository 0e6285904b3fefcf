#pragma once

// Phase 2b: turn third-category test cases into execution scenarios.
//
//   truncate -> merge receivers -> specialize values
//            -> element-count window -> heterogeneity -> syntactic dedupe

#include "esg/generator.hpp"

#include <set>

namespace esg {

struct ExecutionScenario {
    Sequence seq;
    std::size_t element_count = 0; ///< receiver size right before the final target call
    ElementList values;            ///< receiver contents at that point, sorted
    std::size_t distinct_values = 0;
};

/// Keeps everything up to and including the last target call that did not raise.
inline Sequence truncate_after_target(const SubjectApi& api, const Sequence& seq, MethodId target)
{
    ReplayTrace trace = replay(api, seq);
    std::optional<std::size_t> last;
    for (const auto& step : trace.steps)
        if (seq.statements[step.index].invokes(target) && !step.outcome.threw()) last = step.index;
    if (!last) throw Error("no non-raising invocation of " + api.sig(target).signature());
    Sequence out = seq;
    out.statements.resize(*last + 1);
    return out;
}

/// Re-targets every call onto one fresh instance in program order.
///
/// Calls that receive another instance as their collection argument are dropped:
/// that instance's contents were already merged inline. Statements that depend on
/// a dropped binding are dropped too. Variables are renamed to s0 / r0, r1, ...
inline Sequence merge_receivers(const Sequence& seq)
{
    std::set<std::string> subjects;
    for (const auto& st : seq.statements)
        if (st.kind == Statement::Kind::construct) subjects.insert(st.receiver);

    Sequence out;
    out.provenance = Provenance::normalized;
    const std::string merged = "s0";
    out.statements.push_back(Statement::construct(merged));
    std::set<std::string> dropped;
    std::map<std::string, std::string> results;
    for (const auto& st : seq.statements) {
        if (st.kind == Statement::Kind::construct) continue;
        bool drop = false;
        for (const auto& a : st.args) {
            if (a.kind != Arg::Kind::variable) continue;
            if (subjects.count(a.variable) || dropped.count(a.variable)) drop = true;
        }
        if (drop) {
            if (st.result) dropped.insert(*st.result);
            continue;
        }
        Statement copy = st;
        copy.receiver = merged;
        for (auto& a : copy.args)
            if (a.kind == Arg::Kind::variable) a.variable = results.at(a.variable);
        if (copy.result) {
            std::string name = "r" + std::to_string(results.size());
            results[*copy.result] = name;
            copy.result = name;
        }
        out.statements.push_back(std::move(copy));
    }
    return out;
}

/// Drops cast annotations; integer literals are already the only scalar form.
inline Sequence specialize_values(Sequence seq)
{
    for (auto& st : seq.statements)
        for (auto& a : st.args) a.cast.clear();
    return seq;
}

/// Receiver size immediately before the final statement.
inline std::size_t element_count(const SubjectApi& api, const Sequence& seq)
{
    if (seq.empty() || seq.statements.back().kind != Statement::Kind::invoke)
        throw Error("scenario must end with a method call");
    Sequence prefix = seq;
    prefix.statements.pop_back();
    ReplayTrace trace = replay(api, prefix);
    if (!trace.completed()) throw Error("scenario prefix raises before the final call");
    const ObjectState* s = trace.state_of(seq.statements.back().receiver);
    if (!s) throw Error("final receiver is not a live instance");
    return s->elements.size();
}

/// Builds the scenario record; nullopt when the sequence fails to replay cleanly
/// or does not end in a non-raising target call on a single instance.
inline std::optional<ExecutionScenario> make_scenario(const SubjectApi& api, const Sequence& seq, MethodId target)
{
    if (seq.empty() || !seq.statements.back().invokes(target)) return std::nullopt;
    std::size_t constructs = 0;
    for (const auto& st : seq.statements)
        if (st.kind == Statement::Kind::construct) ++constructs;
    if (constructs != 1) return std::nullopt;
    ReplayTrace trace = replay(api, seq);
    if (!trace.completed() || trace.steps.size() != seq.size()) return std::nullopt;
    Sequence prefix = seq;
    prefix.statements.pop_back();
    ReplayTrace pre = replay(api, prefix);
    const ObjectState* s = pre.state_of(seq.statements.back().receiver);
    if (!s) return std::nullopt;
    ExecutionScenario sc;
    sc.seq = seq;
    sc.element_count = s->elements.size();
    sc.values = s->elements;
    std::sort(sc.values.begin(), sc.values.end());
    std::set<Element> distinct(sc.values.begin(), sc.values.end());
    sc.distinct_values = distinct.size();
    return sc;
}

inline std::vector<ExecutionScenario> filter_window(std::vector<ExecutionScenario> scenarios, std::size_t lo = 5,
                                                    std::size_t hi = 8)
{
    if (lo > hi) throw Error("window lower bound exceeds upper bound");
    std::erase_if(scenarios, [&](const ExecutionScenario& s) { return s.element_count < lo || s.element_count > hi; });
    return scenarios;
}

/// Keeps scenarios with at least min(min_distinct, element_count) distinct values.
inline std::vector<ExecutionScenario> heterogeneity_filter(std::vector<ExecutionScenario> scenarios,
                                                           std::size_t min_distinct = 3)
{
    if (min_distinct < 1) throw Error("min-distinct must be at least 1");
    std::erase_if(scenarios, [&](const ExecutionScenario& s) {
        return s.distinct_values < std::min(min_distinct, s.element_count);
    });
    return scenarios;
}

/// First occurrence of each canonical form survives.
inline std::vector<ExecutionScenario> dedupe_syntactic(const SubjectApi& api, std::vector<ExecutionScenario> scenarios)
{
    std::set<std::string> seen;
    std::vector<ExecutionScenario> out;
    for (auto& s : scenarios)
        if (seen.insert(canonical_form(api, s.seq)).second) out.push_back(std::move(s));
    return out;
}

struct NormalizeConfig {
    std::size_t min_elements = 5;
    std::size_t max_elements = 8;
    std::size_t min_distinct = 3;
};

/// Per-stage bookkeeping; every input lands in exactly one bucket.
struct NormalizeStats {
    std::size_t input = 0;
    std::size_t truncate_failed = 0;
    std::size_t merge_failed = 0;
    std::size_t window_dropped = 0;
    std::size_t heterogeneity_dropped = 0;
    std::size_t duplicates_dropped = 0;
    std::size_t emitted = 0;

    friend bool operator==(const NormalizeStats&, const NormalizeStats&) = default;
};

struct NormalizeResult {
    std::vector<ExecutionScenario> scenarios;
    NormalizeStats stats;

    /// The NIL outcome: no scenario survived.
    bool nil() const { return scenarios.empty(); }
};

inline NormalizeResult normalize_pipeline(const SubjectApi& api, const std::vector<Sequence>& test_cases,
                                          MethodId target, const NormalizeConfig& cfg = {})
{
    NormalizeResult r;
    r.stats.input = test_cases.size();
    std::vector<ExecutionScenario> merged;
    for (const auto& tc : test_cases) {
        Sequence t;
        try {
            t = truncate_after_target(api, tc, target);
        } catch (const Error&) {
            ++r.stats.truncate_failed;
            continue;
        }
        Sequence m = specialize_values(merge_receivers(t));
        auto sc = make_scenario(api, m, target);
        if (!sc) {
            ++r.stats.merge_failed;
            continue;
        }
        merged.push_back(std::move(*sc));
    }
    std::size_t n = merged.size();
    auto windowed = filter_window(std::move(merged), cfg.min_elements, cfg.max_elements);
    r.stats.window_dropped = n - windowed.size();
    n = windowed.size();
    auto varied = heterogeneity_filter(std::move(windowed), cfg.min_distinct);
    r.stats.heterogeneity_dropped = n - varied.size();
    n = varied.size();
    r.scenarios = dedupe_syntactic(api, std::move(varied));
    r.stats.duplicates_dropped = n - r.scenarios.size();
    r.stats.emitted = r.scenarios.size();
    return r;
}

} // namespace esg
