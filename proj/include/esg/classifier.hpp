#pragma once

// Phase 1: decide which methods the test generator may use for a target.
// Pure methods cannot grow the receiver and size-decreasing methods shrink it
// below the useful window, so both are removed; the target itself never is.

#include "esg/interpreter.hpp"
#include "esg/rng.hpp"

#include <fstream>
#include <set>

namespace esg {

enum class MethodCategory { pure, increasing, decreasing, node_mutating };

inline std::string_view to_string(MethodCategory c)
{
    switch (c) {
    case MethodCategory::pure: return "pure";
    case MethodCategory::increasing: return "increasing";
    case MethodCategory::decreasing: return "decreasing";
    case MethodCategory::node_mutating: return "node-mutating";
    }
    return "?";
}

enum class RemovalMode { blacklist, probe, both };

inline std::optional<RemovalMode> parse_removal_mode(std::string_view s)
{
    if (s == "blacklist") return RemovalMode::blacklist;
    if (s == "probe") return RemovalMode::probe;
    if (s == "both") return RemovalMode::both;
    return std::nullopt;
}

/// Observations collected by executing a method on sampled states.
struct ProbeEvidence {
    std::size_t samples = 0;
    std::size_t changed = 0;   ///< probes whose fingerprint changed
    std::size_t grew = 0;      ///< probes that raised graph size
    std::size_t shrank = 0;    ///< probes that lowered graph size
    std::size_t raised = 0;    ///< probes ending in an exception
};

struct MethodClassification {
    MethodId method;
    MethodCategory category = MethodCategory::pure;
    ProbeEvidence probe;
    std::optional<std::string> blacklist_match;
};

/// Name patterns of size-decreasing methods, matched case-insensitively as substrings.
class Blacklist {
public:
    Blacklist() = default;
    explicit Blacklist(const std::vector<std::string>& patterns)
    {
        for (const auto& p : patterns) add(p);
    }

    /// One pattern per line; blank lines and '#' comments are ignored.
    static Blacklist parse(std::string_view text)
    {
        Blacklist bl;
        std::size_t start = 0;
        while (start < text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(start, end - start);
            start = end + 1;
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string_view::npos || line[b] == '#') continue;
            auto e = line.find_last_not_of(" \t\r");
            bl.add(std::string(line.substr(b, e - b + 1)));
        }
        return bl;
    }

    static Blacklist load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw Error("cannot read blacklist file '" + path + "'");
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return parse(text);
    }

    /// Patterns are stored lowercased; duplicates are ignored.
    void add(std::string pattern)
    {
        if (pattern.empty()) throw Error("blacklist patterns must be non-empty");
        for (auto& c : pattern) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (std::find(patterns_.begin(), patterns_.end(), pattern) == patterns_.end())
            patterns_.push_back(std::move(pattern));
    }

    const std::vector<std::string>& patterns() const { return patterns_; }
    bool empty() const { return patterns_.empty(); }

private:
    std::vector<std::string> patterns_;
};

/// The patterns listed for Stack: remove, clear, retain, pop, setSize.
inline Blacklist default_stack_blacklist() { return Blacklist({"remove", "clear", "retain", "pop", "setSize"}); }

/// First pattern (file order) contained in the method's simple name, ignoring case.
inline std::optional<std::string> matches_blacklist(const MethodSig& m, const Blacklist& bl)
{
    std::string name = m.name;
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const auto& p : bl.patterns())
        if (name.find(p) != std::string::npos) return p;
    return std::nullopt;
}

inline std::vector<MethodId> extract_methods(const SubjectApi& api)
{
    std::vector<MethodId> out;
    for (std::size_t i = 0; i < api.method_count(); ++i) out.push_back(MethodId{i});
    return out;
}

struct ProbeConfig {
    std::size_t probes = 64;
    std::uint64_t seed = 0;
    ElementList pool{-1, 0, 1, 10, 100, 7, 42};
    std::size_t max_state = 10;
};

namespace detail {

inline Element probe_element(Rng& rng, const ElementList& state, const ElementList& pool)
{
    if (!state.empty() && rng.chance(0.5)) return state[rng.below(state.size())];
    return pool[rng.below(pool.size())];
}

/// Random arguments biased toward the valid range of the given state.
inline std::vector<ArgValue> probe_args(const MethodSig& m, const ElementList& state, Rng& rng,
                                        const ElementList& pool)
{
    std::vector<ArgValue> args;
    const auto n = static_cast<Element>(state.size());
    for (ParamKind k : m.params) {
        switch (k) {
        case ParamKind::element: args.emplace_back(probe_element(rng, state, pool)); break;
        case ParamKind::index:
            args.emplace_back(rng.chance(0.75) ? rng.between(0, std::max<Element>(n - 1, 0)) : n);
            break;
        case ParamKind::integer: args.emplace_back(rng.between(0, n + 2)); break;
        case ParamKind::collection: {
            ElementList xs(rng.below(4));
            for (auto& x : xs) x = probe_element(rng, state, pool);
            args.emplace_back(std::move(xs));
            break;
        }
        }
    }
    return args;
}

} // namespace detail

/// Executes `method` on the mandatory edge states (empty, singleton, 8 elements)
/// plus `cfg.probes` random states with random arguments.
inline ProbeEvidence probe_effects(const SubjectApi& api, MethodId method, const ProbeConfig& cfg)
{
    if (cfg.probes < 1) throw Error("probe budget must be at least 1");
    Rng rng(mix_seed(cfg.seed, method.index));
    std::vector<ElementList> states{{}, {1}, {3, 1, 4, 1, 5, 9, 2, 6}};
    for (std::size_t i = 0; i < cfg.probes; ++i) {
        ElementList s(rng.below(cfg.max_state + 1));
        for (auto& x : s) x = cfg.pool[rng.below(cfg.pool.size())];
        states.push_back(std::move(s));
    }
    ProbeEvidence ev;
    const auto& sig = api.sig(method);
    for (const auto& s : states) {
        ObjectState before{s};
        ObjectState after{s};
        auto args = detail::probe_args(sig, s, rng, cfg.pool);
        Outcome out = api.invoke(method, after, args);
        ++ev.samples;
        if (out.threw()) ++ev.raised;
        if (fingerprint(api, before, {}).observable != fingerprint(api, after, {}).observable) ++ev.changed;
        if (graph_size(after) > graph_size(before)) ++ev.grew;
        if (graph_size(after) < graph_size(before)) ++ev.shrank;
    }
    return ev;
}

inline bool probe_purity(const SubjectApi& api, MethodId method, const ProbeConfig& cfg)
{
    return probe_effects(api, method, cfg).changed == 0;
}

/// Decrease evidence dominates: a method that can shrink the receiver is decreasing
/// even if it can also grow it (setSize).
inline MethodCategory category_from(const ProbeEvidence& ev)
{
    if (ev.changed == 0) return MethodCategory::pure;
    if (ev.shrank > 0) return MethodCategory::decreasing;
    if (ev.grew > 0) return MethodCategory::increasing;
    return MethodCategory::node_mutating;
}

inline MethodCategory classify_impure(const SubjectApi& api, MethodId method, const ProbeConfig& cfg)
{
    auto ev = probe_effects(api, method, cfg);
    if (ev.changed == 0) throw Error(api.sig(method).signature() + " is pure on every probe");
    return category_from(ev);
}

struct AllowedMethods {
    MethodId target;
    std::vector<MethodId> methods;

    bool contains(MethodId m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }
};

struct Classification {
    AllowedMethods allowed;
    std::vector<MethodClassification> methods; ///< one entry per api method, declaration order
    std::vector<MethodId> removed_pure;
    std::vector<MethodId> removed_decreasing;
};

/// Starts from every method, drops pure ones, then drops size-decreasing ones
/// as decided by `mode`. The target is always kept.
inline Classification build_allowed(const SubjectApi& api, MethodId target, const Blacklist& bl, RemovalMode mode,
                                    const ProbeConfig& cfg)
{
    if (target.index >= api.method_count()) throw Error("target not found in api " + api.name());
    Classification out;
    out.allowed.target = target;
    for (MethodId id : extract_methods(api)) {
        MethodClassification mc;
        mc.method = id;
        mc.probe = probe_effects(api, id, cfg);
        mc.blacklist_match = matches_blacklist(api.sig(id), bl);
        MethodCategory probed = category_from(mc.probe);
        bool by_pattern = mc.blacklist_match.has_value();
        bool by_probe = probed == MethodCategory::decreasing;
        if (probed == MethodCategory::pure) {
            mc.category = MethodCategory::pure;
        } else {
            bool decreasing = mode == RemovalMode::blacklist ? by_pattern
                              : mode == RemovalMode::probe   ? by_probe
                                                             : (by_pattern || by_probe);
            if (decreasing) mc.category = MethodCategory::decreasing;
            else if (probed == MethodCategory::decreasing) mc.category = mc.probe.grew ? MethodCategory::increasing
                                                                                       : MethodCategory::node_mutating;
            else mc.category = probed;
        }
        if (id == target) {
            out.allowed.methods.push_back(id);
        } else if (mc.category == MethodCategory::pure) {
            out.removed_pure.push_back(id);
        } else if (mc.category == MethodCategory::decreasing) {
            out.removed_decreasing.push_back(id);
        } else {
            out.allowed.methods.push_back(id);
        }
        out.methods.push_back(std::move(mc));
    }
    return out;
}

} // namespace esg
