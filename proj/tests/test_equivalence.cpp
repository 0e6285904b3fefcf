#include "esg/metrics.hpp"
#include "esg/normalizer.hpp"
#include "esg/parser.hpp"
#include "esg/stack_model.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace esg;

namespace {

const SubjectApi& api() { return stack_api(); }
MethodId id(const char* spec) { return api().resolve(spec); }
Candidate cand(const char* text) { return parse_candidate(api(), text); }

ScenarioPoint point(const char* target, ElementList pre, std::vector<ArgValue> args = {})
{
    auto n = pre.size();
    return make_point(api(), id(target), std::move(pre), std::move(args), n + 2);
}

std::vector<Sequence> auto_scenarios(const char* target, std::uint64_t seed, std::size_t n)
{
    auto t = id(target);
    auto allowed = build_allowed(api(), t, default_stack_blacklist(), RemovalMode::both, {}).allowed;
    GenConfig cfg;
    cfg.seed = seed;
    auto r = normalize_pipeline(api(), keep_third_category(api(), generate(api(), allowed, cfg), t), t);
    std::vector<Sequence> out;
    for (std::size_t i = 0; i < r.scenarios.size() && out.size() < n; ++i) out.push_back(r.scenarios[i].seq);
    return out;
}

// Independent brute force: every list over `pool` with length <= max_len.
std::vector<ElementList> all_states(const ElementList& pool, std::size_t max_len)
{
    std::vector<ElementList> out{{}};
    std::vector<ElementList> frontier{{}};
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<ElementList> next;
        for (const auto& s : frontier)
            for (Element v : pool) {
                auto t = s;
                t.push_back(v);
                next.push_back(t);
            }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

} // namespace

TEST(CandidateText, RoundTripAndMarker)
{
    for (const char* t : {"removeAllElements()", "remove(size()-1)", "insertElementAt($0, size())", "retainAll([])",
                          "addAll([$0, 7])", "remove((Object)$0)", "setSize(0); push(-1)", "addAll(size(), $0)"}) {
        Candidate c = parse_candidate(api(), t);
        EXPECT_EQ(format_candidate(api(), c), t);
    }
    EXPECT_EQ(cand("remove($0)").body[0].method, id("remove(int)"));
    EXPECT_EQ(cand("remove((Object)$0)").body[0].method, id("remove(Object)"));
    EXPECT_THROW(cand("frob()"), Error);
    EXPECT_THROW(cand("push(1, 2)"), Error);
    EXPECT_THROW(cand("push(x)"), Error);
    EXPECT_THROW(cand(""), Error);
}

TEST(CandidateText, SelfCandidate)
{
    EXPECT_EQ(format_candidate(api(), self_candidate(api(), id("push(Object)"))), "push($0)");
    EXPECT_EQ(format_candidate(api(), self_candidate(api(), id("remove(Object)"))), "remove((Object)$0)");
    EXPECT_EQ(format_candidate(api(), self_candidate(api(), id("addAll(int,Collection)"))), "addAll($0, $1)");
}

TEST(CandidateMatches, SpecExamples)
{
    auto clear5 = point("clear()", {3, 1, 4, 1, 5});
    EXPECT_TRUE(candidate_matches(api(), cand("removeAllElements()"), clear5));
    auto push5 = point("push(Object)", {3, 1, 4, 1, 5}, {Element{9}});
    EXPECT_TRUE(candidate_matches(api(), cand("add($0)"), push5));
    EXPECT_FALSE(candidate_matches(api(), cand("add($0)"), push5, ReturnMode::strict));
    EXPECT_FALSE(candidate_matches(api(), cand("pop()"), push5));
    EXPECT_FALSE(candidate_matches(api(), cand("pop()"), point("push(Object)", {1}, {Element{1}})));
}

TEST(CandidateMatches, SequenceOverloadUsesScenarioPrefix)
{
    Sequence sc = parse_sequence(api(), "s0 = new Stack()\ns0.addElement(0)\ns0.addElement(10)\nr0 = s0.push(1)\n"
                                        "s0.addElement(1)\ns0.add(0, -1)\nr1 = s0.pop()\n");
    EXPECT_TRUE(candidate_matches(api(), cand("remove(size()-1)"), id("pop()"), sc));
    EXPECT_FALSE(candidate_matches(api(), cand("remove(0)"), id("pop()"), sc));
}

TEST(CandidateMatches, RelaxedReturnRules)
{
    // pure target returning an element: a boolean-returning no-op does not match
    auto peek = point("peek()", {1, 2});
    EXPECT_FALSE(candidate_matches(api(), cand("isEmpty()"), peek));
    EXPECT_TRUE(candidate_matches(api(), cand("lastElement()"), peek));
    // both raise, different kinds: relaxed yes, strict no
    auto pop0 = point("pop()", {});
    EXPECT_TRUE(candidate_matches(api(), cand("remove(size()-1)"), pop0));
    EXPECT_FALSE(candidate_matches(api(), cand("remove(size()-1)"), pop0, ReturnMode::strict));
    EXPECT_FALSE(candidate_matches(api(), cand("removeAllElements()"), pop0));
}

TEST(Informative, NoOpTargetsSayNothing)
{
    EXPECT_FALSE(informative(point("clear()", {})));
    EXPECT_TRUE(informative(point("clear()", {1})));
    EXPECT_TRUE(informative(point("pop()", {})));
    EXPECT_TRUE(informative(point("peek()", {4})));
}

TEST(Synthesize, ClearFindsRemoveAllElementsAcrossSeeds)
{
    std::vector<ScenarioPoint> pts{point("clear()", {-1, 0, 1, 10, 100})};
    SynthConfig cfg;
    cfg.budget = 5000;
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto c = synthesize_candidate(api(), pts, id("clear()"), cfg, seed);
        if (c && format_candidate(api(), *c) == "removeAllElements()") ++hits;
    }
    RecordProperty("removeAllElements_rate", std::to_string(hits) + "/30");
    EXPECT_GE(hits, 27);
}

TEST(Synthesize, PreconditionsAndExclusions)
{
    SynthConfig cfg;
    EXPECT_THROW(synthesize_candidate(api(), {}, id("clear()"), cfg, 0), Error);
    std::vector<ScenarioPoint> pts{point("clear()", {-1, 0, 1, 10, 100})};
    auto c = synthesize_candidate(api(), pts, id("clear()"), cfg, 0, {"removeAllElements()"});
    ASSERT_TRUE(c);
    EXPECT_NE(format_candidate(api(), *c), "removeAllElements()");
    EXPECT_NE(format_candidate(api(), *c), "clear()");
    // methods removed by the classifier are fair game here
    EXPECT_TRUE(api().sig(c->body[0].method).name != "push");
    // nothing informative: clear on an empty receiver
    EXPECT_FALSE(synthesize_candidate(api(), std::vector<ScenarioPoint>{point("clear()", {})}, id("clear()"), cfg, 0));
}

TEST(Synthesize, DeterministicPerSeed)
{
    std::vector<ScenarioPoint> pts{point("push(Object)", {4, 2, 7, 1, 0}, {Element{99}})};
    SynthConfig cfg;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto a = synthesize_candidate(api(), pts, id("push(Object)"), cfg, seed);
        auto b = synthesize_candidate(api(), pts, id("push(Object)"), cfg, seed);
        ASSERT_TRUE(a && b);
        EXPECT_EQ(*a, *b);
    }
}

TEST(Counterexample, DoNothingVersusClear)
{
    Candidate nothing;
    std::vector<ScenarioPoint> seeds{point("clear()", {1, 2, 3, 4, 5})};
    auto ce = find_counterexample_point(api(), nothing, id("clear()"), seeds, {}, 1);
    ASSERT_TRUE(ce);
    EXPECT_FALSE(ce->pre.empty());
    auto seq = find_counterexample(api(), nothing, id("clear()"), seeds, {}, 1);
    ASSERT_TRUE(seq);
    EXPECT_EQ(seq->provenance, Provenance::counterexample);
    EXPECT_FALSE(candidate_matches(api(), nothing, id("clear()"), *seq));
}

TEST(Counterexample, KnownEquivalencesSurvive)
{
    std::vector<ScenarioPoint> seeds{point("clear()", {1, 2, 3, 4, 5})};
    CounterexampleConfig big;
    big.budget = 5000;
    EXPECT_FALSE(find_counterexample_point(api(), cand("removeAllElements()"), id("clear()"), seeds, big, 3));
    std::vector<ScenarioPoint> pop_seeds{point("pop()", {1, 2, 3})};
    EXPECT_FALSE(find_counterexample_point(api(), cand("remove(size()-1)"), id("pop()"), pop_seeds, big, 3));
}

TEST(Counterexample, RemoveAllElementsEqualsClearOnAllSmallStates)
{
    // brute force over every state of at most 6 elements from a 4-value pool
    auto ra = cand("removeAllElements()");
    for (const auto& s : all_states({0, 1, 2, 3}, 6)) {
        ObjectState a{s}, b{s};
        Outcome oa = api().invoke(id("clear()"), a, {});
        Execution eb = execute_candidate(api(), ra, s, {});
        ASSERT_EQ(a.elements, eb.post);
        ASSERT_EQ(oa, eb.outcome);
    }
}

TEST(Counterexample, InjectedFalsePositivesAreRefuted)
{
    struct Case {
        const char* target;
        const char* body;
        ElementList pre;
        std::vector<ArgValue> args;
    };
    std::vector<Case> cases{
        {"clear()", "pop()", {1}, {}},
        {"clear()", "retainAll([7])", {1, 2, 3, 4, 5}, {}},
        {"clear()", "setSize(size()-5)", {1, 2, 3, 4, 5}, {}},
        {"pop()", "remove(0)", {5, 5, 5, 5, 5}, {}},
        {"push(Object)", "insertElementAt($0, 0)", {5, 5, 5, 5, 5}, {Element{5}}},
        {"push(Object)", "add(5, $0)", {1, 2, 3, 4, 5}, {Element{9}}},
        {"peek()", "get(0)", {7, 2, 3, 4, 7}, {}},
        {"remove(Object)", "removeAll([$0])", {1, 2, 3, 4, 5}, {Element{3}}},
        {"firstElement()", "lastElement()", {4, 1, 2, 3, 4}, {}},
        {"addElement(Object)", "push(42)", {1, 2, 3, 4, 5}, {Element{42}}},
    };
    for (const auto& c : cases) {
        auto t = id(c.target);
        auto body = cand(c.body);
        std::vector<ScenarioPoint> seeds{make_point(api(), t, c.pre, c.args, c.pre.size() + 2)};
        ASSERT_TRUE(candidate_matches(api(), body, seeds[0])) << c.body << " should fool the seed";
        for (std::uint64_t seed = 0; seed < 5; ++seed)
            EXPECT_TRUE(find_counterexample_point(api(), body, t, seeds, {}, seed)) << c.body << " vs " << c.target;
        EXPECT_TRUE(exhaustive_counterexample(api(), body, t)) << c.body;
    }
}

TEST(Exhaustive, ConfirmsNamedEquivalences)
{
    EXPECT_FALSE(exhaustive_counterexample(api(), cand("removeAllElements()"), id("clear()")));
    EXPECT_FALSE(exhaustive_counterexample(api(), cand("remove(size()-1)"), id("pop()")));
    EXPECT_FALSE(exhaustive_counterexample(api(), cand("add($0)"), id("push(Object)")));
    EXPECT_FALSE(exhaustive_counterexample(api(), cand("addElement($0)"), id("push(Object)")));
    // in strict mode the empty-stack exception kinds differ
    ExhaustiveConfig strict;
    strict.mode = ReturnMode::strict;
    auto ce = exhaustive_counterexample(api(), cand("remove(size()-1)"), id("pop()"), strict);
    ASSERT_TRUE(ce);
    EXPECT_TRUE(ce->pre.empty());
}

TEST(Exhaustive, ShortestCounterexampleFirst)
{
    auto ce = exhaustive_counterexample(api(), Candidate{}, id("clear()"));
    ASSERT_TRUE(ce);
    EXPECT_EQ(ce->pre.size(), 1u);
}

TEST(SbesLoop, ClearOnFiveElementScenario)
{
    SbesConfig cfg;
    auto r = sbes_loop(api(), {point("clear()", {-1, 0, 1, 10, 100})}, id("clear()"), cfg, 7);
    ASSERT_FALSE(r.found.empty());
    EXPECT_EQ(r.found.front().text, "removeAllElements()");
    EXPECT_EQ(r.found.front().iteration, 1u);
    EXPECT_LE(r.iterations, cfg.iteration_cap);
    for (const auto& f : r.found) EXPECT_NE(f.text, "clear()");
}

TEST(SbesLoop, EmptyScenarioDegrades)
{
    auto r = sbes_loop(api(), {point("clear()", {})}, id("clear()"), SbesConfig{}, 7);
    EXPECT_TRUE(r.found.empty());
}

TEST(SbesLoop, IterationsNeverExceedCap)
{
    for (std::size_t cap : {1u, 2u, 3u}) {
        SbesConfig cfg;
        cfg.iteration_cap = cap;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto r = sbes_loop(api(), {point("clear()", {-1})}, id("clear()"), cfg, seed);
            EXPECT_LE(r.iterations, cap);
            for (const auto& f : r.found) EXPECT_LE(f.iteration, cap);
        }
    }
    SbesConfig bad;
    bad.iteration_cap = 0;
    EXPECT_THROW(sbes_loop(api(), {point("clear()", {1})}, id("clear()"), bad, 0), Error);
}

TEST(SbesLoop, CounterexamplesAreMaterializedScenarios)
{
    auto r = sbes_loop(api(), {point("clear()", {-1})}, id("clear()"), SbesConfig{}, 4);
    ASSERT_EQ(r.counterexamples.size(), r.refuted.size());
    for (std::size_t i = 0; i < r.refuted.size(); ++i) {
        const auto& seq = r.counterexamples[i];
        EXPECT_TRUE(seq.statements.back().invokes(id("clear()")));
        EXPECT_FALSE(candidate_matches(api(), cand(r.refuted[i].c_str()), id("clear()"), seq));
    }
}

TEST(GroundTruth, ShippedFilesMatchDerivation)
{
    std::map<std::string, std::string> files{{"clear()", "clear"},          {"push(Object)", "push"},
                                             {"addElement(Object)", "addElement"}, {"firstElement()", "firstElement"},
                                             {"peek()", "peek"},            {"remove(Object)", "remove_Object"},
                                             {"pop()", "pop"}};
    std::map<std::string, std::size_t> sizes{{"clear()", 3},        {"push(Object)", 6}, {"addElement(Object)", 6},
                                             {"firstElement()", 2}, {"peek()", 3},       {"remove(Object)", 1},
                                             {"pop()", 1}};
    for (const auto& [target, file] : files) {
        auto shipped = GroundTruth::load(api(), std::string(ESG_SOURCE_DIR "/data/truth/") + file + ".truth");
        auto derived = derived_truth(api(), id(target.c_str()));
        EXPECT_EQ(shipped.target, target);
        EXPECT_EQ(shipped.known, derived.known) << target;
        EXPECT_EQ(shipped.total(), sizes[target]) << target;
    }
    auto clear = GroundTruth::load(api(), ESG_SOURCE_DIR "/data/truth/clear.truth");
    EXPECT_EQ(clear.known.front(), "removeAllElements()");
    auto push = GroundTruth::load(api(), ESG_SOURCE_DIR "/data/truth/push.truth");
    EXPECT_EQ(push.known.front(), "add($0)");
}

TEST(GroundTruth, Validation)
{
    EXPECT_THROW(GroundTruth::parse(api(), "target clear()\n"), Error);
    EXPECT_THROW(GroundTruth::parse(api(), "removeAllElements()\n"), Error);
    EXPECT_THROW(GroundTruth::parse(api(), "target clear()\nremoveAllElements()\nremoveAllElements( )\n"), Error);
    EXPECT_THROW(GroundTruth::parse(api(), "target clear()\nfrob()\n"), Error);
    auto gt = GroundTruth::parse(api(), "# c\ntarget clear()\nremoveAllElements()  # named\n");
    EXPECT_EQ(gt.total(), 1u);
    EXPECT_EQ(GroundTruth::parse(api(), gt.serialize()).known, gt.known);
}

TEST(GroundTruth, EveryEntrySurvivesTheExhaustiveCheckOnAWiderPool)
{
    ExhaustiveConfig wide;
    wide.pool = {0, 1, 2, 3};
    for (const char* t : {"clear()", "push(Object)", "peek()", "remove(Object)"}) {
        for (const auto& k : derived_truth(api(), id(t)).known)
            EXPECT_FALSE(exhaustive_counterexample(api(), cand(k.c_str()), id(t), wide)) << k;
    }
}

TEST(Score, ClearWithAutoScenarios)
{
    auto scenarios = auto_scenarios("clear()", 11, 5);
    ASSERT_EQ(scenarios.size(), 5u);
    auto truth = GroundTruth::load(api(), ESG_SOURCE_DIR "/data/truth/clear.truth");
    ScoreConfig cfg;
    cfg.runs = 30;
    cfg.seed = 5;
    auto r = score(api(), id("clear()"), {scenarios}, truth, cfg);
    const auto& m = r.metrics;
    EXPECT_EQ(m.loops, 30u);
    ASSERT_TRUE(m.precision);
    EXPECT_GE(*m.precision, 0.9);
    EXPECT_DOUBLE_EQ(m.recall, 1.0);
    EXPECT_LE(m.max_r, m.max_t);
    EXPECT_LE(m.max_t, m.total);

    // recount from the log
    std::size_t tp = 0, fp = 0;
    for (const auto& l : r.log)
        for (bool b : l.true_positive) (b ? tp : fp)++;
    EXPECT_EQ(tp, m.tp);
    EXPECT_EQ(fp, m.fp);
    EXPECT_DOUBLE_EQ(*m.precision, static_cast<double>(tp) / static_cast<double>(tp + fp));

    // soundness: each true positive passes the exhaustive check
    for (const auto& l : r.log)
        for (std::size_t i = 0; i < l.found.size(); ++i)
            if (l.true_positive[i])
                EXPECT_FALSE(exhaustive_counterexample(api(), cand(l.found[i].c_str()), id("clear()"))) << l.found[i];

    // determinism
    auto again = score(api(), id("clear()"), {scenarios}, truth, cfg);
    EXPECT_EQ(again.metrics.tp, m.tp);
    EXPECT_EQ(again.metrics.avg, m.avg);
    EXPECT_EQ(again.metrics.recall, m.recall);
    EXPECT_EQ(again.metrics.precision, m.precision);
}

TEST(Score, Preconditions)
{
    auto truth = GroundTruth::load(api(), ESG_SOURCE_DIR "/data/truth/clear.truth");
    ScoreConfig cfg;
    cfg.runs = 0;
    auto sc = std::vector<std::vector<Sequence>>{{sweep_scenario(api(), id("clear()"), 5)}};
    EXPECT_THROW(score(api(), id("clear()"), sc, truth, cfg), Error);
    cfg.runs = 1;
    EXPECT_THROW(score(api(), id("pop()"), sc, truth, cfg), Error);
    GroundTruth empty{"clear()", {}};
    EXPECT_THROW(score(api(), id("clear()"), sc, empty, cfg), Error);
}

TEST(Aggregate, HandComputedMetrics)
{
    GroundTruth gt{"clear()", {"removeAllElements()", "retainAll([])", "setSize(0)"}};
    std::vector<LoopLog> log(2);
    log[0].found = {"removeAllElements()", "setSize(0)", "pop()"};
    log[0].found_iteration = {1, 1, 2};
    log[0].true_positive = {true, true, false};
    log[1].found = {"retainAll([])", "removeAllElements()"};
    log[1].found_iteration = {1, 3};
    log[1].true_positive = {true, true};
    auto m = aggregate(log, gt);
    EXPECT_DOUBLE_EQ(m.avg, 2.5);
    EXPECT_EQ(m.max_t, 3u);
    EXPECT_EQ(m.max_r, 2u);
    EXPECT_DOUBLE_EQ(*m.precision, 4.0 / 5.0);
    EXPECT_DOUBLE_EQ(m.recall, (2.0 / 3.0 + 2.0 / 3.0) / 2.0);
    EXPECT_DOUBLE_EQ(*m.iterations, 2.0);
    EXPECT_DOUBLE_EQ(m.named_at_first, 0.5);
}

TEST(Sweep, ScenarioShapeAndEmptyRow)
{
    for (std::size_t n : {0u, 5u, 11u}) {
        Sequence s = sweep_scenario(api(), id("clear()"), n);
        EXPECT_EQ(element_count(api(), s), n);
        auto sc = make_scenario(api(), s, id("clear()"));
        ASSERT_TRUE(sc);
        EXPECT_EQ(sc->distinct_values, n);
    }
    auto truth = GroundTruth::load(api(), ESG_SOURCE_DIR "/data/truth/clear.truth");
    ScoreConfig cfg;
    cfg.runs = 5;
    auto rows = sweep_graph_size(api(), id("clear()"), {0, 6}, truth, cfg);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].metrics.avg, 0.0);
    EXPECT_FALSE(rows[0].metrics.precision.has_value());
    EXPECT_GE(rows[1].metrics.avg, 1.0);
    EXPECT_EQ(peak_size(rows).value(), 6u);
}
