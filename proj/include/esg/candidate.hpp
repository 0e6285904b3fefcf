#pragma once

// Candidate bodies: short call sequences on the target's receiver whose
// arguments may refer to the target's own arguments ($i) or to the receiver
// size at the time of the call (size(), size()-k).

#include "esg/interpreter.hpp"

#include <cctype>
#include <set>

namespace esg {

struct Operand {
    enum class Kind { literal, target_arg, size_offset };

    Kind kind = Kind::literal;
    Element value = 0; ///< literal value, target argument index, or k in size()-k

    static Operand literal(Element v) { return {Kind::literal, v}; }
    static Operand target_arg(std::size_t i) { return {Kind::target_arg, static_cast<Element>(i)}; }
    static Operand size_minus(Element k) { return {Kind::size_offset, k}; }

    friend bool operator==(const Operand&, const Operand&) = default;
};

/// A scalar slot holds one operand. A collection slot holds either a literal list
/// of operands or, when `whole` is set, a collection argument of the target.
struct CandidateArg {
    bool list = false;
    bool whole = false;
    std::vector<Operand> items;

    static CandidateArg scalar(Operand o) { return {false, false, {o}}; }
    static CandidateArg of_list(std::vector<Operand> xs) { return {true, false, std::move(xs)}; }
    static CandidateArg whole_arg(std::size_t i) { return {false, true, {Operand::target_arg(i)}}; }

    friend bool operator==(const CandidateArg&, const CandidateArg&) = default;
};

struct CandidateCall {
    MethodId method;
    std::vector<CandidateArg> args;

    friend bool operator==(const CandidateCall&, const CandidateCall&) = default;
};

struct Candidate {
    std::vector<CandidateCall> body;

    std::size_t length() const { return body.size(); }
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

inline std::string format_operand(const Operand& o)
{
    switch (o.kind) {
    case Operand::Kind::literal: return std::to_string(o.value);
    case Operand::Kind::target_arg: return "$" + std::to_string(o.value);
    case Operand::Kind::size_offset:
        if (o.value == 0) return "size()";
        if (o.value > 0) return "size()-" + std::to_string(o.value);
        return "size()+" + std::to_string(-o.value);
    }
    return "?";
}

/// Canonical text, e.g. "insertElementAt($0, size())" or "retainAll([]); pop()".
inline std::string format_candidate(const SubjectApi& api, const Candidate& c)
{
    std::string out;
    for (std::size_t k = 0; k < c.body.size(); ++k) {
        const auto& call = c.body[k];
        if (k) out += "; ";
        out += api.sig(call.method).name + "(";
        for (std::size_t i = 0; i < call.args.size(); ++i) {
            const auto& a = call.args[i];
            if (i) out += ", ";
            if (a.list) {
                out += "[";
                for (std::size_t j = 0; j < a.items.size(); ++j) {
                    if (j) out += ", ";
                    out += format_operand(a.items[j]);
                }
                out += "]";
                continue;
            }
            if (needs_element_marker(api, call.method, i)) out += "(Object)";
            out += format_operand(a.items.front());
        }
        out += ")";
    }
    return out;
}

namespace detail {

inline std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Splits on `sep` outside parentheses and brackets.
inline std::vector<std::string> split_top(std::string_view s, char sep)
{
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i < s.size() && (s[i] == '(' || s[i] == '[')) ++depth;
        if (i < s.size() && (s[i] == ')' || s[i] == ']')) --depth;
        if (i == s.size() || (s[i] == sep && depth == 0)) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline Operand parse_operand(const std::string& s, std::string_view whole)
{
    auto fail = [&]() -> Operand { throw Error("malformed candidate operand '" + s + "' in '" + std::string(whole) + "'"); };
    if (s.empty()) return fail();
    if (s[0] == '$') {
        if (s.size() < 2 || !std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            return fail();
        return Operand::target_arg(std::stoul(s.substr(1)));
    }
    if (s.rfind("size()", 0) == 0) {
        std::string rest = s.substr(6);
        if (rest.empty()) return Operand::size_minus(0);
        if (rest.size() < 2 || (rest[0] != '-' && rest[0] != '+')) return fail();
        Element k = 0;
        try {
            k = std::stoll(rest.substr(1));
        } catch (const std::exception&) {
            return fail();
        }
        return Operand::size_minus(rest[0] == '-' ? k : -k);
    }
    std::size_t used = 0;
    Element v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        return fail();
    }
    if (used != s.size()) return fail();
    return Operand::literal(v);
}

} // namespace detail

/// Parses the canonical text produced by format_candidate. A "(Type)" prefix on a
/// scalar selects an element parameter where an overload is otherwise ambiguous.
inline Candidate parse_candidate(const SubjectApi& api, std::string_view text)
{
    Candidate c;
    for (const auto& call_text : detail::split_top(text, ';')) {
        auto open = call_text.find('(');
        if (call_text.empty() || open == std::string::npos || call_text.back() != ')')
            throw Error("malformed candidate call '" + call_text + "'");
        std::string name = detail::trim(call_text.substr(0, open));
        std::string inner = call_text.substr(open + 1, call_text.size() - open - 2);
        std::vector<std::string> parts;
        if (!detail::trim(inner).empty()) parts = detail::split_top(inner, ',');

        std::vector<CandidateArg> args;
        std::vector<bool> element_cast;
        for (auto p : parts) {
            bool cast = false;
            if (!p.empty() && p[0] == '(' && p.rfind("size()", 0) != 0) {
                auto close = p.find(')');
                if (close == std::string::npos) throw Error("malformed cast in '" + call_text + "'");
                cast = true;
                p = detail::trim(p.substr(close + 1));
            }
            element_cast.push_back(cast);
            if (!p.empty() && p[0] == '[') {
                if (p.back() != ']') throw Error("malformed list in '" + call_text + "'");
                std::vector<Operand> xs;
                std::string body = p.substr(1, p.size() - 2);
                if (!detail::trim(body).empty())
                    for (const auto& item : detail::split_top(body, ',')) xs.push_back(detail::parse_operand(item, text));
                args.push_back(CandidateArg::of_list(std::move(xs)));
            } else {
                args.push_back(CandidateArg::scalar(detail::parse_operand(p, text)));
            }
        }

        std::optional<MethodId> chosen;
        for (MethodId id : api.overloads(name)) {
            const auto& sig = api.sig(id);
            if (sig.arity() != args.size()) continue;
            bool ok = true;
            for (std::size_t i = 0; i < args.size() && ok; ++i) {
                bool coll = sig.params[i] == ParamKind::collection;
                if (args[i].list && !coll) ok = false;
                if (element_cast[i] && sig.params[i] != ParamKind::element) ok = false;
                if (!element_cast[i] && !args[i].list && needs_element_marker(api, id, i)) ok = false;
            }
            if (ok) {
                chosen = id;
                break;
            }
        }
        if (!chosen) throw Error("no method matches candidate call '" + call_text + "'");
        // A bare $i in a collection slot passes the target's collection through.
        const auto& sig = api.sig(*chosen);
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (sig.params[i] == ParamKind::collection && !args[i].list) {
                if (args[i].items.front().kind != Operand::Kind::target_arg)
                    throw Error("collection argument must be a list or $i in '" + call_text + "'");
                args[i].whole = true;
            }
        }
        c.body.push_back({*chosen, std::move(args)});
    }
    if (c.body.empty()) throw Error("empty candidate");
    return c;
}

/// The body consisting solely of the target called with its own arguments.
inline Candidate self_candidate(const SubjectApi& api, MethodId target)
{
    CandidateCall call{target, {}};
    const auto& sig = api.sig(target);
    for (std::size_t i = 0; i < sig.arity(); ++i)
        call.args.push_back(sig.params[i] == ParamKind::collection ? CandidateArg::whole_arg(i)
                                                                   : CandidateArg::scalar(Operand::target_arg(i)));
    return Candidate{{call}};
}

/// Integer literals appearing anywhere in the body.
inline ElementList candidate_literals(const Candidate& c)
{
    std::set<Element> out;
    for (const auto& call : c.body)
        for (const auto& a : call.args)
            for (const auto& o : a.items)
                if (o.kind == Operand::Kind::literal) out.insert(o.value);
    return {out.begin(), out.end()};
}

/// Result of executing a body from a given state.
struct Execution {
    Outcome outcome;
    ElementList post;
};

namespace detail {

inline Element eval_operand(const Operand& o, const ElementList& state, std::span<const ArgValue> target_args)
{
    switch (o.kind) {
    case Operand::Kind::literal: return o.value;
    case Operand::Kind::size_offset: return static_cast<Element>(state.size()) - o.value;
    case Operand::Kind::target_arg: {
        auto i = static_cast<std::size_t>(o.value);
        if (i >= target_args.size()) throw Error("candidate refers to missing target argument $" + std::to_string(i));
        if (auto* e = std::get_if<Element>(&target_args[i])) return *e;
        throw Error("candidate uses collection argument $" + std::to_string(i) + " as a scalar");
    }
    }
    return 0;
}

} // namespace detail

/// Runs the body on a copy of `pre`. The first raising call ends the body; the
/// outcome is that of the last executed call.
inline Execution execute_candidate(const SubjectApi& api, const Candidate& c, const ElementList& pre,
                                   std::span<const ArgValue> target_args)
{
    ObjectState state{pre};
    Execution ex;
    for (const auto& call : c.body) {
        std::vector<ArgValue> args;
        for (const auto& a : call.args) {
            if (a.whole) {
                auto i = static_cast<std::size_t>(a.items.front().value);
                if (i >= target_args.size() || !std::holds_alternative<ElementList>(target_args[i]))
                    throw Error("candidate refers to a missing collection argument");
                args.emplace_back(std::get<ElementList>(target_args[i]));
            } else if (a.list) {
                ElementList xs;
                for (const auto& o : a.items) xs.push_back(detail::eval_operand(o, state.elements, target_args));
                args.emplace_back(std::move(xs));
            } else {
                args.emplace_back(detail::eval_operand(a.items.front(), state.elements, target_args));
            }
        }
        ex.outcome = api.invoke(call.method, state, args);
        if (ex.outcome.threw()) break;
    }
    ex.post = std::move(state.elements);
    return ex;
}

} // namespace esg
