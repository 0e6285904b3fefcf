#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace esg {

/// Element values of the modeled containers are plain integers.
using Element = std::int64_t;
using ElementList = std::vector<Element>;

/// Base class for configuration and well-formedness errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ParamKind { integer, element, index, collection };

enum class ValueKind { none, element, boolean, integer, collection };

enum class ExceptionKind { empty_container, index_out_of_bounds };

inline std::string_view to_string(ValueKind k)
{
    switch (k) {
    case ValueKind::none: return "none";
    case ValueKind::element: return "element";
    case ValueKind::boolean: return "boolean";
    case ValueKind::integer: return "int";
    case ValueKind::collection: return "collection";
    }
    return "?";
}

inline std::string_view to_string(ExceptionKind k)
{
    switch (k) {
    case ExceptionKind::empty_container: return "EmptyContainer";
    case ExceptionKind::index_out_of_bounds: return "IndexOutOfBounds";
    }
    return "?";
}

/// A method's return value. Scalar kinds use `number`; collections use `items`.
struct Value {
    ValueKind kind = ValueKind::none;
    Element number = 0;
    ElementList items;

    static Value none() { return {}; }
    static Value element(Element e) { return {ValueKind::element, e, {}}; }
    static Value boolean(bool b) { return {ValueKind::boolean, b ? 1 : 0, {}}; }
    static Value integer(Element i) { return {ValueKind::integer, i, {}}; }
    static Value collection(ElementList xs) { return {ValueKind::collection, 0, std::move(xs)}; }

    bool is_none() const { return kind == ValueKind::none; }

    friend bool operator==(const Value&, const Value&) = default;
};

inline std::string to_string(const Value& v)
{
    switch (v.kind) {
    case ValueKind::none: return "none";
    case ValueKind::boolean: return v.number ? "true" : "false";
    case ValueKind::element:
    case ValueKind::integer: return std::to_string(v.number);
    case ValueKind::collection: {
        std::string s = "[";
        for (std::size_t i = 0; i < v.items.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(v.items[i]);
        }
        return s + "]";
    }
    }
    return "?";
}

/// Result of one call: a value, or the exception it raised.
struct Outcome {
    Value value;
    std::optional<ExceptionKind> exception;

    static Outcome returned(Value v) { return {std::move(v), std::nullopt}; }
    static Outcome raised(ExceptionKind k) { return {Value::none(), k}; }

    bool threw() const { return exception.has_value(); }

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

inline std::string to_string(const Outcome& o)
{
    return o.threw() ? "throws " + std::string(to_string(*o.exception)) : to_string(o.value);
}

/// Concrete argument handed to a method implementation.
using ArgValue = std::variant<Element, ElementList>;

} // namespace esg
