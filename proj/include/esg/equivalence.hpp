#pragma once

// Counterexample-guided search for call sequences observationally equivalent
// to a target method:
//
//   synthesize a candidate matching every scenario
//     -> look for a counterexample
//        -> found: add it to the scenarios and iterate
//        -> none:  accept the candidate
//
// Candidates are enumerated (length 1 exhaustively, in a seeded order, then
// random bodies up to the length cap) under a work budget where evaluating a
// candidate on a scenario costs the scenario's statement count plus the body
// length. Larger scenarios therefore buy fewer evaluations.

#include "esg/candidate.hpp"
#include "esg/rng.hpp"

#include <functional>
#include <set>

namespace esg {

enum class ReturnMode { relaxed, strict };

/// The receiver state right before a target call, the call's arguments and its
/// observed effect.
struct ScenarioPoint {
    ElementList pre;
    std::vector<ArgValue> args;
    std::size_t cost = 1; ///< statements in the scenario this point stands for
    Outcome expected;
    ElementList post;
};

inline ScenarioPoint make_point(const SubjectApi& api, MethodId target, ElementList pre, std::vector<ArgValue> args,
                                std::size_t cost)
{
    ScenarioPoint p{std::move(pre), std::move(args), cost, {}, {}};
    ObjectState s{p.pre};
    p.expected = api.invoke(target, s, p.args);
    p.post = std::move(s.elements);
    return p;
}

/// Reads a scenario sequence ending in a call of `target` on a live instance.
inline ScenarioPoint make_point(const SubjectApi& api, const Sequence& scenario, MethodId target)
{
    if (scenario.empty() || !scenario.statements.back().invokes(target))
        throw Error("scenario does not end with a call of " + api.sig(target).signature());
    Session session(api);
    for (std::size_t i = 0; i + 1 < scenario.size(); ++i)
        if (session.execute(scenario.statements[i]).outcome.threw())
            throw Error("scenario prefix raises at statement " + std::to_string(i + 1));
    const Statement& last = scenario.statements.back();
    auto it = session.env().find(last.receiver);
    if (it == session.env().end() || !std::holds_alternative<ObjectState>(it->second))
        throw Error("scenario receiver " + last.receiver + " is not a live instance");
    return make_point(api, target, std::get<ObjectState>(it->second).elements, session.resolve(last),
                      scenario.size());
}

/// Writes a point back as a scenario: construct, append each element, call the target.
inline Sequence materialize(const SubjectApi& api, MethodId target, const ScenarioPoint& p)
{
    auto append = api.appender();
    if (!append) throw Error("api " + api.name() + " declares no appender");
    Sequence seq;
    seq.provenance = Provenance::counterexample;
    seq.statements.push_back(Statement::construct("s0"));
    for (Element e : p.pre) seq.statements.push_back(Statement::invoke("s0", *append, {Arg::literal(e)}));
    std::vector<Arg> args;
    for (const auto& a : p.args) {
        if (auto* e = std::get_if<Element>(&a)) args.push_back(Arg::literal(*e));
        else args.push_back(Arg::list(std::get<ElementList>(a)));
    }
    std::optional<std::string> bind;
    if (api.sig(target).returns != ValueKind::none) bind = "r0";
    seq.statements.push_back(Statement::invoke("s0", target, std::move(args), bind));
    return seq;
}

namespace detail {

/// True when an element-typed return just hands back one of the call's scalar arguments.
inline bool echoes_argument(const Value& v, std::span<const ArgValue> args)
{
    if (v.kind != ValueKind::element) return false;
    for (const auto& a : args)
        if (auto* e = std::get_if<Element>(&a); e && *e == v.number) return true;
    return false;
}

} // namespace detail

/// Result comparison. Strict mode demands identical outcomes. Relaxed mode:
/// any two exceptions match; a target without a return value accepts anything;
/// returns of the same kind must be equal; returns of different kinds match only
/// when the target merely echoes its argument (push returns what it was given).
inline bool outcomes_match(const Outcome& expected, const Outcome& actual, std::span<const ArgValue> target_args,
                           ReturnMode mode)
{
    if (mode == ReturnMode::strict) return expected == actual;
    if (expected.threw() || actual.threw()) return expected.threw() && actual.threw();
    if (expected.value.is_none()) return true;
    if (expected.value.kind == actual.value.kind) return expected.value == actual.value;
    return detail::echoes_argument(expected.value, target_args);
}

inline bool candidate_matches(const SubjectApi& api, const Candidate& cand, const ScenarioPoint& p,
                              ReturnMode mode = ReturnMode::relaxed)
{
    Execution ex = execute_candidate(api, cand, p.pre, p.args);
    if (fingerprint(api, ObjectState{ex.post}, {}).observable != fingerprint(api, ObjectState{p.post}, {}).observable)
        return false;
    return outcomes_match(p.expected, ex.outcome, p.args, mode);
}

inline bool candidate_matches(const SubjectApi& api, const Candidate& cand, MethodId target, const Sequence& scenario,
                              ReturnMode mode = ReturnMode::relaxed)
{
    return candidate_matches(api, cand, make_point(api, scenario, target), mode);
}

/// A point says something about the target only if the call changed the state,
/// raised, or produced a value that is not a copy of its argument. A body that
/// does nothing matches every uninformative point.
inline bool informative(const ScenarioPoint& p)
{
    if (p.expected.threw() || p.pre != p.post) return true;
    return !p.expected.value.is_none() && !detail::echoes_argument(p.expected.value, p.args);
}

/// Argument choices per parameter kind, relative to one target signature.
class CandidateSpace {
public:
    CandidateSpace(const SubjectApi& api, MethodId target, const ElementList& pool) : api_(api), target_(target)
    {
        const auto& tsig = api.sig(target);
        for (std::size_t i = 0; i < tsig.arity(); ++i) {
            switch (tsig.params[i]) {
            case ParamKind::element:
                element_.push_back(CandidateArg::scalar(Operand::target_arg(i)));
                collection_.push_back(CandidateArg::of_list({Operand::target_arg(i)}));
                break;
            case ParamKind::index:
            case ParamKind::integer: index_.push_back(CandidateArg::scalar(Operand::target_arg(i))); break;
            case ParamKind::collection: collection_.push_back(CandidateArg::whole_arg(i)); break;
            }
        }
        index_.push_back(CandidateArg::scalar(Operand::size_minus(0)));
        index_.push_back(CandidateArg::scalar(Operand::size_minus(1)));
        collection_.insert(collection_.begin(), CandidateArg::of_list({}));
        for (Element v : pool) {
            element_.push_back(CandidateArg::scalar(Operand::literal(v)));
            index_.push_back(CandidateArg::scalar(Operand::literal(v)));
            collection_.push_back(CandidateArg::of_list({Operand::literal(v)}));
        }
    }

    const std::vector<CandidateArg>& choices(ParamKind k) const
    {
        switch (k) {
        case ParamKind::element: return element_;
        case ParamKind::index:
        case ParamKind::integer: return index_;
        case ParamKind::collection: return collection_;
        }
        return element_;
    }

    /// Every single-call body, grouped by arity; order within a group is shuffled.
    std::vector<Candidate> single_calls(Rng& rng) const
    {
        std::vector<Candidate> out;
        std::size_t max_arity = 0;
        for (const auto& m : api_.methods()) max_arity = std::max(max_arity, m.arity());
        for (std::size_t arity = 0; arity <= max_arity; ++arity) {
            std::vector<Candidate> group;
            for (std::size_t m = 0; m < api_.method_count(); ++m) {
                const auto& sig = api_.sig(MethodId{m});
                if (sig.arity() != arity) continue;
                std::vector<CandidateArg> args;
                expand(MethodId{m}, args, group);
            }
            rng.shuffle(group);
            out.insert(out.end(), group.begin(), group.end());
        }
        return out;
    }

    CandidateCall random_call(Rng& rng) const
    {
        MethodId m{rng.below(api_.method_count())};
        CandidateCall call{m, {}};
        for (ParamKind k : api_.sig(m).params) {
            const auto& opts = choices(k);
            call.args.push_back(opts[rng.below(opts.size())]);
        }
        return call;
    }

private:
    void expand(MethodId m, std::vector<CandidateArg>& args, std::vector<Candidate>& out) const
    {
        const auto& sig = api_.sig(m);
        if (args.size() == sig.arity()) {
            out.push_back(Candidate{{CandidateCall{m, args}}});
            return;
        }
        for (const auto& a : choices(sig.params[args.size()])) {
            args.push_back(a);
            expand(m, args, out);
            args.pop_back();
        }
    }

    const SubjectApi& api_;
    MethodId target_;
    std::vector<CandidateArg> element_, index_, collection_;
};

struct SynthConfig {
    std::size_t budget = 5000;    ///< work units per synthesis call
    std::size_t max_length = 3;   ///< calls per body
    ElementList pool{-1, 0, 1, 10, 100, 7, 42};
    ReturnMode mode = ReturnMode::relaxed;
};

/// Tracks work units; evaluation stops once the budget is spent.
class WorkMeter {
public:
    explicit WorkMeter(std::size_t budget) : budget_(budget) {}
    bool charge(std::size_t units)
    {
        if (spent_ + units > budget_) {
            spent_ = budget_;
            return false;
        }
        spent_ += units;
        return true;
    }
    bool exhausted() const { return spent_ >= budget_; }
    std::size_t spent() const { return spent_; }

private:
    std::size_t budget_;
    std::size_t spent_ = 0;
};

namespace detail {

/// nullopt when the budget ran out before a verdict.
inline std::optional<bool> matches_all(const SubjectApi& api, const Candidate& c, std::span<const ScenarioPoint> points,
                                       ReturnMode mode, WorkMeter& meter)
{
    for (const auto& p : points) {
        if (!meter.charge(p.cost + c.length())) return std::nullopt;
        if (!candidate_matches(api, c, p, mode)) return false;
    }
    return true;
}

} // namespace detail

/// Returns a body, not in `exclude` (canonical texts) and not the target itself,
/// that matches every point; nullopt when none is found within the budget or
/// when no point is informative.
inline std::optional<Candidate> synthesize_candidate(const SubjectApi& api, std::span<const ScenarioPoint> points,
                                                     MethodId target, const SynthConfig& cfg, std::uint64_t seed,
                                                     const std::set<std::string>& exclude = {})
{
    if (points.empty()) throw Error("synthesis needs at least one scenario");
    if (cfg.max_length < 1) throw Error("candidate length cap must be at least 1");
    if (std::none_of(points.begin(), points.end(), informative)) return std::nullopt;

    Rng rng(seed);
    CandidateSpace space(api, target, cfg.pool);
    WorkMeter meter(cfg.budget);
    const std::string self = format_candidate(api, self_candidate(api, target));
    auto acceptable = [&](const Candidate& c) {
        std::string text = format_candidate(api, c);
        return text != self && !exclude.count(text);
    };

    for (const auto& c : space.single_calls(rng)) {
        if (!acceptable(c)) continue;
        auto verdict = detail::matches_all(api, c, points, cfg.mode, meter);
        if (!verdict) return std::nullopt;
        if (*verdict) return c;
    }
    if (cfg.max_length < 2) return std::nullopt;

    while (!meter.exhausted()) {
        Candidate c;
        std::size_t len = 2 + rng.below(cfg.max_length - 1);
        for (std::size_t i = 0; i < len; ++i) c.body.push_back(space.random_call(rng));
        auto verdict = detail::matches_all(api, c, points, cfg.mode, meter);
        if (!verdict) return std::nullopt;
        if (!*verdict) continue;
        // Drop calls while the body still matches.
        for (std::size_t i = c.body.size(); i-- > 0 && c.body.size() > 1;) {
            Candidate shorter = c;
            shorter.body.erase(shorter.body.begin() + static_cast<std::ptrdiff_t>(i));
            auto v = detail::matches_all(api, shorter, points, cfg.mode, meter);
            if (!v) return std::nullopt;
            if (*v) c = std::move(shorter);
        }
        if (acceptable(c)) return c;
    }
    return std::nullopt;
}

struct CounterexampleConfig {
    std::size_t budget = 200; ///< state variants tried
    ElementList pool{-1, 0, 1, 10, 100, 7, 42};
    std::size_t max_state = 8;
    ReturnMode mode = ReturnMode::relaxed;
};

namespace detail {

inline std::vector<ArgValue> random_target_args(const MethodSig& sig, const ElementList& state,
                                                const ElementList& values, Rng& rng)
{
    auto value = [&]() -> Element {
        if (!state.empty() && rng.chance(0.3)) return state[rng.below(state.size())];
        return values[rng.below(values.size())];
    };
    const auto n = static_cast<Element>(state.size());
    std::vector<ArgValue> args;
    for (ParamKind k : sig.params) {
        switch (k) {
        case ParamKind::element: args.emplace_back(value()); break;
        case ParamKind::index: args.emplace_back(rng.between(-1, n + 1)); break;
        case ParamKind::integer: args.emplace_back(rng.between(-1, n + 2)); break;
        case ParamKind::collection: {
            ElementList xs(rng.below(4));
            for (auto& x : xs) x = value();
            args.emplace_back(std::move(xs));
            break;
        }
        }
    }
    return args;
}

} // namespace detail

/// Mutation search around the seed points (and from scratch) for a state and
/// target arguments on which the candidate and the target disagree.
inline std::optional<ScenarioPoint> find_counterexample_point(const SubjectApi& api, const Candidate& cand,
                                                              MethodId target, std::span<const ScenarioPoint> seeds,
                                                              const CounterexampleConfig& cfg, std::uint64_t seed)
{
    if (cfg.pool.empty()) throw Error("counterexample value pool must not be empty");
    Rng rng(seed);
    const auto& tsig = api.sig(target);
    std::set<Element> vals(cfg.pool.begin(), cfg.pool.end());
    for (Element v : candidate_literals(cand)) vals.insert(v);
    for (const auto& p : seeds)
        for (const auto& a : p.args)
            if (auto* e = std::get_if<Element>(&a)) vals.insert(*e);
    ElementList values(vals.begin(), vals.end());

    for (std::size_t variant = 0; variant < cfg.budget; ++variant) {
        ElementList state;
        std::vector<ArgValue> args;
        bool redraw = true;
        if (!seeds.empty() && rng.chance(0.75)) {
            const auto& base = seeds[rng.below(seeds.size())];
            state = base.pre;
            args = base.args;
            redraw = false;
        } else {
            state.resize(rng.below(cfg.max_state + 1));
            for (auto& x : state) x = values[rng.below(values.size())];
        }
        std::size_t mutations = 1 + rng.below(3);
        for (std::size_t m = 0; m < mutations; ++m) {
            switch (rng.below(4)) {
            case 0:
                if (state.size() < cfg.max_state + 4)
                    state.insert(state.begin() + static_cast<std::ptrdiff_t>(rng.below(state.size() + 1)),
                                 values[rng.below(values.size())]);
                break;
            case 1:
                if (!state.empty()) state.erase(state.begin() + static_cast<std::ptrdiff_t>(rng.below(state.size())));
                break;
            case 2:
                if (!state.empty()) state[rng.below(state.size())] = values[rng.below(values.size())];
                break;
            default: redraw = true; break;
            }
        }
        if (redraw || args.size() != tsig.arity()) args = detail::random_target_args(tsig, state, values, rng);
        std::size_t cost = state.size() + 2;
        ScenarioPoint p = make_point(api, target, std::move(state), std::move(args), cost);
        if (!candidate_matches(api, cand, p, cfg.mode)) return p;
    }
    return std::nullopt;
}

inline std::optional<Sequence> find_counterexample(const SubjectApi& api, const Candidate& cand, MethodId target,
                                                   std::span<const ScenarioPoint> seeds,
                                                   const CounterexampleConfig& cfg, std::uint64_t seed)
{
    auto p = find_counterexample_point(api, cand, target, seeds, cfg, seed);
    if (!p) return std::nullopt;
    return materialize(api, target, *p);
}

struct SbesConfig {
    std::size_t iteration_cap = 3;
    SynthConfig synth;
    CounterexampleConfig counterexample;
    std::size_t max_equivalences = 32;
};

struct FoundEquivalence {
    Candidate candidate;
    std::string text;
    std::size_t iteration = 0; ///< loop iteration in which it was accepted
};

struct SbesResult {
    std::vector<FoundEquivalence> found;
    std::size_t iterations = 1;
    std::vector<std::string> refuted;
    std::vector<Sequence> counterexamples;
};

/// Synthesize / validate / augment until the iteration cap or until synthesis
/// finds nothing new. Every counterexample opens a new iteration.
inline SbesResult sbes_loop(const SubjectApi& api, std::vector<ScenarioPoint> points, MethodId target,
                            const SbesConfig& cfg, std::uint64_t seed)
{
    if (cfg.iteration_cap < 1) throw Error("iteration cap must be at least 1");
    SbesResult r;
    std::set<std::string> exclude;
    for (std::size_t round = 0; r.found.size() < cfg.max_equivalences; ++round) {
        auto cand = synthesize_candidate(api, points, target, cfg.synth, mix_seed(seed, 2 * round), exclude);
        if (!cand) break;
        std::string text = format_candidate(api, *cand);
        exclude.insert(text);
        auto ce = find_counterexample_point(api, *cand, target, points, cfg.counterexample, mix_seed(seed, 2 * round + 1));
        if (!ce) {
            r.found.push_back({*cand, text, r.iterations});
            continue;
        }
        r.refuted.push_back(text);
        r.counterexamples.push_back(materialize(api, target, *ce));
        points.push_back(std::move(*ce));
        if (r.iterations == cfg.iteration_cap) break;
        ++r.iterations;
    }
    return r;
}

inline SbesResult sbes_loop(const SubjectApi& api, const std::vector<Sequence>& scenarios, MethodId target,
                            const SbesConfig& cfg, std::uint64_t seed)
{
    std::vector<ScenarioPoint> points;
    for (const auto& s : scenarios) points.push_back(make_point(api, s, target));
    return sbes_loop(api, std::move(points), target, cfg, seed);
}

struct ExhaustiveConfig {
    ElementList pool{0, 1, 2};
    std::size_t max_state = 5;
    bool include_literals = true; ///< add the candidate's literals to the pool
    ReturnMode mode = ReturnMode::relaxed;
};

namespace detail {

inline void for_each_state(const ElementList& pool, std::size_t max_len, const std::function<bool(const ElementList&)>& f)
{
    ElementList cur;
    std::function<bool()> rec = [&]() -> bool {
        if (!f(cur)) return false;
        if (cur.size() == max_len) return true;
        for (Element v : pool) {
            cur.push_back(v);
            bool go = rec();
            cur.pop_back();
            if (!go) return false;
        }
        return true;
    };
    rec();
}

inline std::vector<std::vector<ArgValue>> all_target_args(const MethodSig& sig, const ElementList& pool,
                                                          std::size_t max_state)
{
    std::vector<std::vector<ArgValue>> out{{}};
    for (ParamKind k : sig.params) {
        std::vector<ArgValue> opts;
        switch (k) {
        case ParamKind::element:
            for (Element v : pool) opts.emplace_back(v);
            break;
        case ParamKind::index:
        case ParamKind::integer: {
            std::set<Element> xs(pool.begin(), pool.end());
            for (Element i = -1; i <= static_cast<Element>(max_state) + 1; ++i) xs.insert(i);
            for (Element v : xs) opts.emplace_back(v);
            break;
        }
        case ParamKind::collection:
            opts.emplace_back(ElementList{});
            for (Element a : pool) {
                opts.emplace_back(ElementList{a});
                for (Element b : pool) opts.emplace_back(ElementList{a, b});
            }
            break;
        }
        std::vector<std::vector<ArgValue>> next;
        for (const auto& prefix : out)
            for (const auto& o : opts) {
                auto v = prefix;
                v.push_back(o);
                next.push_back(std::move(v));
            }
        out = std::move(next);
    }
    return out;
}

} // namespace detail

/// First state/argument combination (shortest state first) on which the
/// candidate and the target disagree, over every state of at most
/// `cfg.max_state` elements drawn from the pool.
inline std::optional<ScenarioPoint> exhaustive_counterexample(const SubjectApi& api, const Candidate& cand,
                                                              MethodId target, const ExhaustiveConfig& cfg = {})
{
    std::set<Element> vals(cfg.pool.begin(), cfg.pool.end());
    if (cfg.include_literals)
        for (Element v : candidate_literals(cand)) vals.insert(v);
    ElementList pool(vals.begin(), vals.end());
    auto arg_sets = detail::all_target_args(api.sig(target), pool, cfg.max_state);
    std::optional<ScenarioPoint> found;
    // Breadth-first by length so the reported counterexample is a shortest one.
    for (std::size_t len = 0; len <= cfg.max_state && !found; ++len) {
        detail::for_each_state(pool, len, [&](const ElementList& s) {
            if (s.size() != len) return true;
            for (const auto& args : arg_sets) {
                ScenarioPoint p = make_point(api, target, s, args, s.size() + 2);
                if (!candidate_matches(api, cand, p, cfg.mode)) {
                    found = std::move(p);
                    return false;
                }
            }
            return true;
        });
    }
    return found;
}

/// Every single-call body over the synthesis argument space that survives the
/// exhaustive check, ordered by arity then declaration order.
inline std::vector<Candidate> derive_ground_truth(const SubjectApi& api, MethodId target, const ElementList& pool,
                                                  const ExhaustiveConfig& cfg = {})
{
    CandidateSpace space(api, target, pool);
    std::size_t max_arity = 0;
    for (const auto& m : api.methods()) max_arity = std::max(max_arity, m.arity());
    const std::string self = format_candidate(api, self_candidate(api, target));
    std::vector<Candidate> out;
    for (std::size_t arity = 0; arity <= max_arity; ++arity) {
        for (std::size_t m = 0; m < api.method_count(); ++m) {
            if (api.sig(MethodId{m}).arity() != arity) continue;
            std::vector<Candidate> bodies;
            std::vector<CandidateArg> scratch;
            // Enumerate in declaration order without shuffling.
            std::function<void()> rec = [&]() {
                const auto& sig = api.sig(MethodId{m});
                if (scratch.size() == sig.arity()) {
                    bodies.push_back(Candidate{{CandidateCall{MethodId{m}, scratch}}});
                    return;
                }
                for (const auto& a : space.choices(sig.params[scratch.size()])) {
                    scratch.push_back(a);
                    rec();
                    scratch.pop_back();
                }
            };
            rec();
            for (auto& c : bodies) {
                if (format_candidate(api, c) == self) continue;
                if (!exhaustive_counterexample(api, c, target, cfg)) out.push_back(std::move(c));
            }
        }
    }
    return out;
}

} // namespace esg
