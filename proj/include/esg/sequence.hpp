#pragma once

#include "esg/subject.hpp"

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace esg {

/// Argument expression of a statement.
struct Arg {
    enum class Kind { literal, list, variable };

    Kind kind = Kind::literal;
    Element value = 0;     ///< literal
    ElementList items;     ///< list
    std::string variable;  ///< variable
    std::string cast;      ///< parsed "(Type)" annotation, cleared by specialization

    static Arg literal(Element v) { return {Kind::literal, v, {}, {}, {}}; }
    static Arg list(ElementList xs) { return {Kind::list, 0, std::move(xs), {}, {}}; }
    static Arg var(std::string name) { return {Kind::variable, 0, {}, std::move(name), {}}; }

    friend bool operator==(const Arg&, const Arg&) = default;
};

struct Statement {
    enum class Kind { construct, invoke };

    Kind kind = Kind::invoke;
    std::string receiver;              ///< bound variable for construct, receiver for invoke
    MethodId method{};                 ///< invoke only
    std::vector<Arg> args;
    std::optional<std::string> result; ///< optional binding of the return value

    static Statement construct(std::string var) { return {Kind::construct, std::move(var), {}, {}, std::nullopt}; }
    static Statement invoke(std::string recv, MethodId m, std::vector<Arg> args = {},
                            std::optional<std::string> result = std::nullopt)
    {
        return {Kind::invoke, std::move(recv), m, std::move(args), std::move(result)};
    }

    bool invokes(MethodId m) const { return kind == Kind::invoke && method == m; }

    friend bool operator==(const Statement&, const Statement&) = default;
};

enum class Provenance { generated, normalized, counterexample };

struct Sequence {
    std::vector<Statement> statements;
    Provenance provenance = Provenance::generated;

    std::size_t size() const { return statements.size(); }
    bool empty() const { return statements.empty(); }

    /// Structural equality; provenance is metadata and does not participate.
    friend bool operator==(const Sequence& a, const Sequence& b) { return a.statements == b.statements; }
};

/// True when a plain integer literal at `param` would resolve to a different overload.
inline bool needs_element_marker(const SubjectApi& api, MethodId id, std::size_t param)
{
    const auto& sig = api.sig(id);
    if (sig.params[param] != ParamKind::element) return false;
    for (MethodId other : api.overloads(sig.name)) {
        if (other == id) continue;
        const auto& o = api.sig(other);
        if (o.arity() == sig.arity() && (o.params[param] == ParamKind::index || o.params[param] == ParamKind::integer))
            return true;
    }
    return false;
}

inline std::string format_list(const ElementList& xs)
{
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(xs[i]);
    }
    return s + "]";
}

inline std::string format_statement(const SubjectApi& api, const Statement& st)
{
    if (st.kind == Statement::Kind::construct) return st.receiver + " = new " + api.class_name() + "()";
    std::string s;
    if (st.result) s += *st.result + " = ";
    s += st.receiver + "." + api.sig(st.method).name + "(";
    for (std::size_t i = 0; i < st.args.size(); ++i) {
        const Arg& a = st.args[i];
        if (i) s += ", ";
        if (!a.cast.empty())
            s += "(" + a.cast + ")";
        else if (a.kind != Arg::Kind::list && needs_element_marker(api, st.method, i))
            s += "(Object)";
        switch (a.kind) {
        case Arg::Kind::literal: s += std::to_string(a.value); break;
        case Arg::Kind::list: s += format_list(a.items); break;
        case Arg::Kind::variable: s += a.variable; break;
        }
    }
    return s + ")";
}

/// Statement-language text, one statement per line, newline-terminated.
inline std::string serialize(const SubjectApi& api, const Sequence& seq)
{
    std::string out;
    for (const auto& st : seq.statements) out += format_statement(api, st) + "\n";
    return out;
}

/// Variables in first-binding order.
inline std::vector<std::string> bound_variables(const Sequence& seq)
{
    std::vector<std::string> out;
    for (const auto& st : seq.statements) {
        if (st.kind == Statement::Kind::construct) out.push_back(st.receiver);
        else if (st.result) out.push_back(*st.result);
    }
    return out;
}

/// Applies a variable renaming to every binding and reference.
inline Sequence rename_variables(Sequence seq, const std::map<std::string, std::string>& names)
{
    auto map = [&](std::string& v) {
        if (auto it = names.find(v); it != names.end()) v = it->second;
    };
    for (auto& st : seq.statements) {
        map(st.receiver);
        if (st.result) map(*st.result);
        for (auto& a : st.args)
            if (a.kind == Arg::Kind::variable) map(a.variable);
    }
    return seq;
}

/// Names subjects s0, s1, ... and results r0, r1, ... in binding order.
inline Sequence rename_conventional(Sequence seq)
{
    std::map<std::string, std::string> names;
    std::size_t subjects = 0, results = 0;
    for (const auto& st : seq.statements) {
        if (st.kind == Statement::Kind::construct) names[st.receiver] = "s" + std::to_string(subjects++);
        else if (st.result) names[*st.result] = "r" + std::to_string(results++);
    }
    return rename_variables(std::move(seq), names);
}

/// Serialized text after renaming every variable to v0, v1, ... in binding order.
inline std::string canonical_form(const SubjectApi& api, const Sequence& seq)
{
    std::map<std::string, std::string> names;
    std::size_t n = 0;
    for (const auto& v : bound_variables(seq)) names.emplace(v, "v" + std::to_string(n++));
    return serialize(api, rename_variables(seq, names));
}

} // namespace esg
