#pragma once

// Phase 2a: feedback-directed random generation of test cases over the
// allowed methods, and their split into the three test-case categories.

#include "esg/classifier.hpp"

namespace esg {

struct GenConfig {
    std::uint64_t seed = 0;
    std::size_t budget = 2000;     ///< sequences attempted
    std::size_t max_length = 12;   ///< statements per sequence, construction included
    ElementList value_pool{-1, 0, 1, 10, 100, 7, 42};
    std::size_t max_receivers = 3;
    double target_bias = 0.5;      ///< probability of forcing a final target call
    double reuse = 0.9;            ///< probability of starting from a pooled earlier sequence

    void validate() const
    {
        if (budget < 1) throw Error("generation budget must be at least 1");
        if (max_length < 2) throw Error("max length must be at least 2");
        if (value_pool.empty()) throw Error("value pool must not be empty");
        if (max_receivers < 1) throw Error("max receivers must be at least 1");
        if (target_bias < 0.0 || target_bias > 1.0) throw Error("target bias must be in [0, 1]");
        if (reuse < 0.0 || reuse > 1.0) throw Error("reuse probability must be in [0, 1]");
    }
};

enum class Category { no_target, target_raises, target_normal };

inline std::string_view to_string(Category c)
{
    switch (c) {
    case Category::no_target: return "no-target";
    case Category::target_raises: return "target-raises";
    case Category::target_normal: return "target-normal";
    }
    return "?";
}

namespace detail {

class SequenceBuilder {
public:
    SequenceBuilder(const SubjectApi& api, const GenConfig& cfg, Rng& rng)
        : api_(api), cfg_(cfg), rng_(rng), session_(api)
    {
    }

    /// Continues from an earlier non-raising sequence.
    void adopt(const Sequence& prefix)
    {
        for (const auto& st : prefix.statements) {
            session_.execute(st);
            if (st.kind == Statement::Kind::construct) receivers_.push_back(st.receiver);
            else if (st.result) ++results_;
            seq_.statements.push_back(st);
        }
    }

    void construct()
    {
        std::string v = "s" + std::to_string(receivers_.size());
        append(Statement::construct(v));
        receivers_.push_back(v);
    }

    /// Appends a random call; returns false when it raised (the sequence ends there).
    bool extend(MethodId m)
    {
        const auto& sig = api_.sig(m);
        const std::string& recv = receivers_[rng_.below(receivers_.size())];
        std::vector<Arg> args;
        for (ParamKind k : sig.params) args.push_back(random_arg(k));
        std::optional<std::string> bind;
        if (sig.returns != ValueKind::none) bind = "r" + std::to_string(results_++);
        return append(Statement::invoke(recv, m, std::move(args), bind));
    }

    std::size_t receivers() const { return receivers_.size(); }
    Sequence take() { return std::move(seq_); }
    std::size_t size() const { return seq_.size(); }

private:
    bool append(Statement st)
    {
        StepRecord rec = session_.execute(st);
        seq_.statements.push_back(std::move(st));
        return !rec.outcome.threw();
    }

    Arg random_arg(ParamKind k)
    {
        if (k != ParamKind::collection) return Arg::literal(cfg_.value_pool[rng_.below(cfg_.value_pool.size())]);
        if (rng_.chance(0.5)) return Arg::var(receivers_[rng_.below(receivers_.size())]);
        ElementList xs(rng_.below(4));
        for (auto& x : xs) x = cfg_.value_pool[rng_.below(cfg_.value_pool.size())];
        return Arg::list(std::move(xs));
    }

    const SubjectApi& api_;
    const GenConfig& cfg_;
    Rng& rng_;
    Session session_;
    Sequence seq_;
    std::vector<std::string> receivers_;
    std::size_t results_ = 0;
};

} // namespace detail

/// Generates `cfg.budget` sequences using constructors and allowed methods only.
/// An attempt starts either from a fresh instance or, with probability `cfg.reuse`,
/// from an earlier sequence that ran without raising (the feedback component pool).
/// Each step then picks uniformly among extending a live receiver, constructing a
/// new one, or stopping; a statement that raises ends its sequence, which is kept
/// as-is but never reused. Sequences closed by a forced target call are not
/// reused either, so the pool is not dominated by target calls.
inline std::vector<Sequence> generate(const SubjectApi& api, const AllowedMethods& allowed, const GenConfig& cfg)
{
    cfg.validate();
    if (allowed.methods.empty()) throw Error("allowed method list is empty");
    std::vector<Sequence> out;
    std::vector<std::size_t> components; // indices into `out` of non-raising sequences
    out.reserve(cfg.budget);
    for (std::size_t attempt = 0; attempt < cfg.budget; ++attempt) {
        Rng rng(mix_seed(cfg.seed, attempt));
        bool force_target = rng.chance(cfg.target_bias);
        std::size_t limit = force_target ? cfg.max_length - 1 : cfg.max_length;
        detail::SequenceBuilder b(api, cfg, rng);
        std::optional<std::size_t> base;
        if (!components.empty() && rng.chance(cfg.reuse)) {
            base = components[rng.below(components.size())];
            if (out[*base].size() > limit) base.reset();
        }
        if (base) b.adopt(out[*base]);
        else b.construct();
        bool alive = true;
        while (alive && b.size() < limit) {
            std::size_t action = rng.below(3);
            if (action == 2) break;
            if (action == 1 && b.receivers() < cfg.max_receivers) {
                b.construct();
                continue;
            }
            alive = b.extend(allowed.methods[rng.below(allowed.methods.size())]);
        }
        if (alive && !force_target) components.push_back(out.size());
        if (alive && force_target) b.extend(allowed.target);
        Sequence seq = b.take();
        seq.provenance = Provenance::generated;
        out.push_back(std::move(seq));
    }
    return out;
}

/// Classification by the last invocation of the target in the replay.
inline Category categorize(const SubjectApi& api, const Sequence& seq, MethodId target)
{
    ReplayTrace trace = replay(api, seq);
    std::optional<bool> last_raised;
    for (const auto& step : trace.steps) {
        if (seq.statements[step.index].invokes(target)) last_raised = step.outcome.threw();
    }
    if (!last_raised) return Category::no_target;
    return *last_raised ? Category::target_raises : Category::target_normal;
}

/// The target-normal subset, in input order.
inline std::vector<Sequence> keep_third_category(const SubjectApi& api, const std::vector<Sequence>& seqs,
                                                 MethodId target)
{
    std::vector<Sequence> out;
    for (const auto& s : seqs)
        if (categorize(api, s, target) == Category::target_normal) out.push_back(s);
    return out;
}

} // namespace esg
