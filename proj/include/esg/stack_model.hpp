#pragma once

// Reference semantics of java.util.Stack and the Vector methods it inherits,
// restricted to integer elements.

#include "esg/subject.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace esg {

namespace detail {

inline Element scalar(std::span<const ArgValue> args, std::size_t i) { return std::get<Element>(args[i]); }
inline const ElementList& list(std::span<const ArgValue> args, std::size_t i) { return std::get<ElementList>(args[i]); }

inline bool contains(const ElementList& xs, Element v) { return std::find(xs.begin(), xs.end(), v) != xs.end(); }

inline Element modeled_capacity(std::size_t n)
{
    Element cap = 10;
    while (static_cast<std::size_t>(cap) < n) cap *= 2;
    return cap;
}

} // namespace detail

/// Builds the Stack model. Declaration order is the order EXTRACT-METHODS reports.
inline SubjectApi make_stack_api()
{
    using detail::contains;
    using detail::list;
    using detail::scalar;
    using PK = ParamKind;
    using VK = ValueKind;
    constexpr auto empty = ExceptionKind::empty_container;
    constexpr auto oob = ExceptionKind::index_out_of_bounds;

    SubjectApi api("stack", "Stack");
    auto in_range = [](const ElementList& xs, Element i) { return i >= 0 && i < static_cast<Element>(xs.size()); };
    auto insert_pos = [](const ElementList& xs, Element i) { return i >= 0 && i <= static_cast<Element>(xs.size()); };

    api.declare({"Stack", "push", {PK::element}, VK::element, {}}, [](ElementList& xs, auto a) {
        xs.push_back(scalar(a, 0));
        return Outcome::returned(Value::element(scalar(a, 0)));
    });
    api.declare({"Stack", "pop", {}, VK::element, {empty}}, [](ElementList& xs, auto) {
        if (xs.empty()) return Outcome::raised(ExceptionKind::empty_container);
        Element top = xs.back();
        xs.pop_back();
        return Outcome::returned(Value::element(top));
    });
    api.declare({"Stack", "peek", {}, VK::element, {empty}}, [](ElementList& xs, auto) {
        if (xs.empty()) return Outcome::raised(ExceptionKind::empty_container);
        return Outcome::returned(Value::element(xs.back()));
    });
    api.declare({"Stack", "empty", {}, VK::boolean, {}},
                [](ElementList& xs, auto) { return Outcome::returned(Value::boolean(xs.empty())); });
    api.declare({"Stack", "search", {PK::element}, VK::integer, {}}, [](ElementList& xs, auto a) {
        auto it = std::find(xs.rbegin(), xs.rend(), scalar(a, 0));
        if (it == xs.rend()) return Outcome::returned(Value::integer(-1));
        return Outcome::returned(Value::integer(static_cast<Element>(it - xs.rbegin()) + 1));
    });
    api.declare({"Vector", "capacity", {}, VK::integer, {}}, [](ElementList& xs, auto) {
        return Outcome::returned(Value::integer(detail::modeled_capacity(xs.size())));
    });
    api.declare({"Vector", "clone", {}, VK::collection, {}},
                [](ElementList& xs, auto) { return Outcome::returned(Value::collection(xs)); });
    api.declare({"Vector", "contains", {PK::element}, VK::boolean, {}},
                [](ElementList& xs, auto a) { return Outcome::returned(Value::boolean(contains(xs, scalar(a, 0)))); });
    api.declare({"Vector", "add", {PK::index, PK::element}, VK::none, {oob}}, [=](ElementList& xs, auto a) {
        if (!insert_pos(xs, scalar(a, 0))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        xs.insert(xs.begin() + scalar(a, 0), scalar(a, 1));
        return Outcome::returned(Value::none());
    });
    api.declare({"Vector", "add", {PK::element}, VK::boolean, {}}, [](ElementList& xs, auto a) {
        xs.push_back(scalar(a, 0));
        return Outcome::returned(Value::boolean(true));
    });
    api.declare({"Vector", "addAll", {PK::index, PK::collection}, VK::boolean, {oob}}, [=](ElementList& xs, auto a) {
        if (!insert_pos(xs, scalar(a, 0))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        ElementList c = list(a, 1);
        xs.insert(xs.begin() + scalar(a, 0), c.begin(), c.end());
        return Outcome::returned(Value::boolean(!c.empty()));
    });
    api.declare({"Vector", "addAll", {PK::collection}, VK::boolean, {}}, [](ElementList& xs, auto a) {
        ElementList c = list(a, 0);
        xs.insert(xs.end(), c.begin(), c.end());
        return Outcome::returned(Value::boolean(!c.empty()));
    });
    MethodId append = api.declare({"Vector", "addElement", {PK::element}, VK::none, {}}, [](ElementList& xs, auto a) {
        xs.push_back(scalar(a, 0));
        return Outcome::returned(Value::none());
    });
    api.declare({"Vector", "get", {PK::index}, VK::element, {oob}}, [=](ElementList& xs, auto a) {
        if (!in_range(xs, scalar(a, 0))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        return Outcome::returned(Value::element(xs[scalar(a, 0)]));
    });
    api.declare({"Vector", "set", {PK::index, PK::element}, VK::element, {oob}}, [=](ElementList& xs, auto a) {
        if (!in_range(xs, scalar(a, 0))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        Element old = xs[scalar(a, 0)];
        xs[scalar(a, 0)] = scalar(a, 1);
        return Outcome::returned(Value::element(old));
    });
    api.declare({"Vector", "insertElementAt", {PK::element, PK::index}, VK::none, {oob}}, [=](ElementList& xs, auto a) {
        if (!insert_pos(xs, scalar(a, 1))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        xs.insert(xs.begin() + scalar(a, 1), scalar(a, 0));
        return Outcome::returned(Value::none());
    });
    api.declare({"Vector", "setElementAt", {PK::element, PK::index}, VK::none, {oob}}, [=](ElementList& xs, auto a) {
        if (!in_range(xs, scalar(a, 1))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        xs[scalar(a, 1)] = scalar(a, 0);
        return Outcome::returned(Value::none());
    });
    api.declare({"Vector", "clear", {}, VK::none, {}}, [](ElementList& xs, auto) {
        xs.clear();
        return Outcome::returned(Value::none());
    });
    api.declare({"Vector", "remove", {PK::index}, VK::element, {oob}}, [=](ElementList& xs, auto a) {
        if (!in_range(xs, scalar(a, 0))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        Element old = xs[scalar(a, 0)];
        xs.erase(xs.begin() + scalar(a, 0));
        return Outcome::returned(Value::element(old));
    });
    auto remove_first = [](ElementList& xs, auto a) {
        auto it = std::find(xs.begin(), xs.end(), scalar(a, 0));
        if (it == xs.end()) return Outcome::returned(Value::boolean(false));
        xs.erase(it);
        return Outcome::returned(Value::boolean(true));
    };
    api.declare({"Vector", "remove", {PK::element}, VK::boolean, {}}, remove_first);
    api.declare({"Vector", "removeAll", {PK::collection}, VK::boolean, {}}, [](ElementList& xs, auto a) {
        ElementList c = list(a, 0);
        auto n = xs.size();
        std::erase_if(xs, [&](Element e) { return contains(c, e); });
        return Outcome::returned(Value::boolean(xs.size() != n));
    });
    api.declare({"Vector", "removeAllElements", {}, VK::none, {}}, [](ElementList& xs, auto) {
        xs.clear();
        return Outcome::returned(Value::none());
    });
    api.declare({"Vector", "removeElement", {PK::element}, VK::boolean, {}}, remove_first);
    api.declare({"Vector", "removeElementAt", {PK::index}, VK::none, {oob}}, [=](ElementList& xs, auto a) {
        if (!in_range(xs, scalar(a, 0))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        xs.erase(xs.begin() + scalar(a, 0));
        return Outcome::returned(Value::none());
    });
    api.declare({"Vector", "retainAll", {PK::collection}, VK::boolean, {}}, [](ElementList& xs, auto a) {
        ElementList c = list(a, 0);
        auto n = xs.size();
        std::erase_if(xs, [&](Element e) { return !contains(c, e); });
        return Outcome::returned(Value::boolean(xs.size() != n));
    });
    // New slots are filled with 0 (Java pads with null, which the integer domain cannot express).
    api.declare({"Vector", "setSize", {PK::integer}, VK::none, {oob}}, [](ElementList& xs, auto a) {
        Element n = scalar(a, 0);
        if (n < 0) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        xs.resize(static_cast<std::size_t>(n), 0);
        return Outcome::returned(Value::none());
    });
    MethodId size = api.declare({"Vector", "size", {}, VK::integer, {}}, [](ElementList& xs, auto) {
        return Outcome::returned(Value::integer(static_cast<Element>(xs.size())));
    });
    api.declare({"Vector", "isEmpty", {}, VK::boolean, {}},
                [](ElementList& xs, auto) { return Outcome::returned(Value::boolean(xs.empty())); });
    MethodId at = api.declare({"Vector", "elementAt", {PK::index}, VK::element, {oob}}, [=](ElementList& xs, auto a) {
        if (!in_range(xs, scalar(a, 0))) return Outcome::raised(ExceptionKind::index_out_of_bounds);
        return Outcome::returned(Value::element(xs[scalar(a, 0)]));
    });
    api.declare({"Vector", "firstElement", {}, VK::element, {empty}}, [](ElementList& xs, auto) {
        if (xs.empty()) return Outcome::raised(ExceptionKind::empty_container);
        return Outcome::returned(Value::element(xs.front()));
    });
    api.declare({"Vector", "lastElement", {}, VK::element, {empty}}, [](ElementList& xs, auto) {
        if (xs.empty()) return Outcome::raised(ExceptionKind::empty_container);
        return Outcome::returned(Value::element(xs.back()));
    });
    api.declare({"Vector", "indexOf", {PK::element}, VK::integer, {}}, [](ElementList& xs, auto a) {
        auto it = std::find(xs.begin(), xs.end(), scalar(a, 0));
        return Outcome::returned(Value::integer(it == xs.end() ? -1 : static_cast<Element>(it - xs.begin())));
    });
    api.set_observers(size, at);
    api.set_appender(append);
    return api;
}

inline const SubjectApi& stack_api()
{
    static const SubjectApi api = make_stack_api();
    return api;
}

/// Built-in subject registry. Returns nullptr for unknown names.
inline const SubjectApi* find_api(std::string_view name)
{
    if (name == "stack") return &stack_api();
    return nullptr;
}

inline std::vector<std::string> registered_apis() { return {"stack"}; }

} // namespace esg
