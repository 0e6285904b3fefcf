#pragma once

#include "esg/value.hpp"

#include <algorithm>
#include <cctype>
#include <compare>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esg {

/// Index of a method inside its SubjectApi (declaration order).
struct MethodId {
    std::size_t index = 0;
    friend auto operator<=>(const MethodId&, const MethodId&) = default;
};

inline std::string_view param_type_name(ParamKind k)
{
    switch (k) {
    case ParamKind::integer:
    case ParamKind::index: return "int";
    case ParamKind::element: return "Object";
    case ParamKind::collection: return "Collection";
    }
    return "?";
}

struct MethodSig {
    std::string owner; ///< declaring class, e.g. "Vector"
    std::string name;
    std::vector<ParamKind> params;
    ValueKind returns = ValueKind::none;
    std::vector<ExceptionKind> throws;

    std::size_t arity() const { return params.size(); }

    /// "name(T1,T2)" in Java-like parameter notation.
    std::string signature() const
    {
        std::string s = name + "(";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) s += ",";
            s += param_type_name(params[i]);
        }
        return s + ")";
    }

    std::string qualified() const { return owner + "." + signature(); }

    bool may_throw(ExceptionKind k) const
    {
        return std::find(throws.begin(), throws.end(), k) != throws.end();
    }
};

/// Receiver state: the ordered container contents.
struct ObjectState {
    ElementList elements;
    friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

/// One root node plus one node per element.
inline std::size_t graph_size(const ObjectState& s) { return 1 + s.elements.size(); }

/// Transition function of one method. Implementations must validate before mutating,
/// so an exception outcome always leaves the state untouched.
using Semantics = std::function<Outcome(ElementList&, std::span<const ArgValue>)>;

/// Declarative model of a container API plus its executable semantics.
class SubjectApi {
public:
    SubjectApi(std::string name, std::string class_name)
        : name_(std::move(name)), class_name_(std::move(class_name))
    {
    }

    const std::string& name() const { return name_; }
    const std::string& class_name() const { return class_name_; }

    MethodId declare(MethodSig sig, Semantics fn)
    {
        for (const auto& m : sigs_) {
            if (m.name == sig.name && m.params == sig.params)
                throw Error("duplicate method signature " + sig.signature() + " in api " + name_);
        }
        sigs_.push_back(std::move(sig));
        impls_.push_back(std::move(fn));
        return MethodId{sigs_.size() - 1};
    }

    /// Designates the pure observers used for fingerprinting.
    void set_observers(MethodId size, MethodId at)
    {
        size_observer_ = size;
        at_observer_ = at;
    }
    /// Designates a single-element append used to materialize states as sequences.
    void set_appender(MethodId append) { appender_ = append; }
    std::optional<MethodId> appender() const { return appender_; }

    std::optional<MethodId> size_observer() const { return size_observer_; }
    std::optional<MethodId> at_observer() const { return at_observer_; }

    std::span<const MethodSig> methods() const { return sigs_; }
    std::size_t method_count() const { return sigs_.size(); }
    const MethodSig& sig(MethodId id) const { return sigs_.at(id.index); }

    Outcome invoke(MethodId id, ObjectState& state, std::span<const ArgValue> args) const
    {
        return impls_.at(id.index)(state.elements, args);
    }

    std::vector<MethodId> overloads(std::string_view method_name) const
    {
        std::vector<MethodId> out;
        for (std::size_t i = 0; i < sigs_.size(); ++i)
            if (sigs_[i].name == method_name) out.push_back(MethodId{i});
        return out;
    }

    /// Resolves "name(T1,T2)" (or a bare "name" when unambiguous).
    /// Element parameters may be spelled Object, Integer or E.
    std::optional<MethodId> find(std::string_view spec) const
    {
        std::string s;
        for (char c : spec)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        auto open = s.find('(');
        if (open == std::string::npos) {
            auto ids = overloads(s);
            if (ids.size() == 1) return ids.front();
            return std::nullopt;
        }
        if (s.back() != ')') return std::nullopt;
        std::string method_name = s.substr(0, open);
        if (auto dot = method_name.rfind('.'); dot != std::string::npos)
            method_name = method_name.substr(dot + 1);
        std::vector<std::string> types;
        std::string inner = s.substr(open + 1, s.size() - open - 2);
        if (!inner.empty()) {
            std::size_t start = 0;
            int depth = 0;
            for (std::size_t i = 0; i <= inner.size(); ++i) {
                if (i < inner.size() && inner[i] == '<') ++depth;
                if (i < inner.size() && inner[i] == '>') --depth;
                if (i == inner.size() || (inner[i] == ',' && depth == 0)) {
                    types.push_back(inner.substr(start, i - start));
                    start = i + 1;
                }
            }
        }
        for (MethodId id : overloads(method_name)) {
            const auto& m = sig(id);
            if (m.params.size() != types.size()) continue;
            bool ok = true;
            for (std::size_t i = 0; i < types.size() && ok; ++i)
                ok = type_matches(types[i], m.params[i]);
            if (ok) return id;
        }
        return std::nullopt;
    }

    MethodId resolve(std::string_view spec) const
    {
        if (auto id = find(spec)) return *id;
        throw Error("target not found: '" + std::string(spec) + "' is not a method of api " + name_);
    }

private:
    static bool type_matches(std::string_view t, ParamKind k)
    {
        auto generic = t.find('<');
        std::string_view base = t.substr(0, generic);
        switch (k) {
        case ParamKind::integer:
        case ParamKind::index: return base == "int";
        case ParamKind::element: return base == "Object" || base == "Integer" || base == "E";
        case ParamKind::collection: return base == "Collection";
        }
        return false;
    }

    std::string name_;
    std::string class_name_;
    std::vector<MethodSig> sigs_;
    std::vector<Semantics> impls_;
    std::optional<MethodId> size_observer_;
    std::optional<MethodId> at_observer_;
    std::optional<MethodId> appender_;
};

/// Observable projection of a state plus the last call's outcome.
struct Fingerprint {
    std::vector<Element> observable; ///< size(), then get(i) for each index
    Outcome last;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

/// Computes the fingerprint exclusively through the api's pure observers.
inline Fingerprint fingerprint(const SubjectApi& api, const ObjectState& state, const Outcome& last)
{
    if (!api.size_observer() || !api.at_observer())
        throw Error("api " + api.name() + " declares no observers");
    ObjectState probe = state;
    Fingerprint fp;
    fp.last = last;
    Outcome size = api.invoke(*api.size_observer(), probe, {});
    fp.observable.push_back(size.value.number);
    for (Element i = 0; i < size.value.number; ++i) {
        ArgValue idx = i;
        Outcome at = api.invoke(*api.at_observer(), probe, std::span<const ArgValue>(&idx, 1));
        fp.observable.push_back(at.value.number);
    }
    return fp;
}

} // namespace esg
