#pragma once

// Parser for the statement language:
//
//   s0 = new Stack()
//   s0.addElement(0)
//   r0 = s0.pop()            # comment (Java "//" comments work too)
//
// Java-flavoured noise is tolerated so listings can be pasted with light
// editing: leading type names ("Stack<Integer> s0 = ..."), trailing ';',
// casts such as "(Object)10" and parenthesized literals "(Object)(-1)".

#include "esg/sequence.hpp"

#include <cctype>
#include <charconv>
#include <map>

namespace esg {

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column)
    {
    }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

namespace detail {

struct VarInfo {
    bool subject = false;
    ValueKind kind = ValueKind::none;
};

class LineParser {
public:
    LineParser(const SubjectApi& api, std::string_view text, std::size_t line_no,
               std::map<std::string, VarInfo>& vars)
        : api_(api), text_(text), line_(line_no), vars_(vars)
    {
    }

    Statement parse()
    {
        skip_ws();
        // [Type] VAR '=' ... | VAR '.' method(...)
        std::size_t first_col = pos_;
        std::string first = ident("variable or type name");
        skip_generic();
        skip_ws();
        std::optional<std::string> bind;
        std::size_t bind_col = first_col;
        if (peek() == '=' ) {
            bind = first;
        } else if (peek() != '.' && std::isalpha(static_cast<unsigned char>(peek()))) {
            bind_col = pos_;
            bind = ident("variable name"); // first token was a type name
            skip_ws();
            if (peek() != '=') fail("expected '='");
        }
        if (bind) {
            ++pos_;
            skip_ws();
            if (vars_.count(*bind)) fail_at(bind_col, "variable '" + *bind + "' is already bound");
            std::size_t rhs_col = pos_;
            std::string word = ident("expression");
            if (word == "new") {
                skip_ws();
                std::size_t cls_col = pos_;
                std::string cls = ident("class name");
                if (cls != api_.class_name())
                    fail_at(cls_col, "unknown class '" + cls + "' (api " + api_.name() + " constructs " +
                                         api_.class_name() + ")");
                skip_generic();
                expect('(');
                expect(')');
                finish();
                vars_[*bind] = VarInfo{true, ValueKind::none};
                return Statement::construct(*bind);
            }
            Statement st = call(word, rhs_col);
            st.result = *bind;
            const auto& sig = api_.sig(st.method);
            if (sig.returns == ValueKind::none) fail_at(bind_col, sig.name + " returns no value");
            vars_[*bind] = VarInfo{false, sig.returns};
            return st;
        }
        return call(first, first_col);
    }

private:
    Statement call(const std::string& receiver, std::size_t recv_col)
    {
        auto it = vars_.find(receiver);
        if (it == vars_.end()) fail_at(recv_col, "unbound variable " + receiver);
        if (!it->second.subject) fail_at(recv_col, "variable " + receiver + " is not a " + api_.class_name());
        skip_ws();
        expect('.');
        skip_ws();
        std::size_t name_col = pos_;
        std::string name = ident("method name");
        auto candidates = api_.overloads(name);
        if (candidates.empty()) fail_at(name_col, "unknown method '" + name + "'");
        skip_ws();
        expect('(');
        std::vector<Arg> args;
        std::vector<std::size_t> cols;
        skip_ws();
        if (peek() != ')') {
            while (true) {
                skip_ws();
                cols.push_back(pos_);
                args.push_back(arg());
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                break;
            }
        }
        expect(')');
        finish();

        std::vector<MethodId> same_arity;
        for (MethodId id : candidates)
            if (api_.sig(id).arity() == args.size()) same_arity.push_back(id);
        if (same_arity.empty())
            fail_at(name_col, "arity mismatch: " + name + " does not take " + std::to_string(args.size()) +
                                  " argument(s)");
        MethodId chosen = same_arity.front();
        if (same_arity.size() > 1) chosen = pick_overload(same_arity, args);
        const auto& sig = api_.sig(chosen);
        for (std::size_t i = 0; i < args.size(); ++i) check_kind(args[i], sig.params[i], cols[i]);
        return Statement::invoke(receiver, chosen, std::move(args));
    }

    MethodId pick_overload(const std::vector<MethodId>& ids, const std::vector<Arg>& args) const
    {
        // A cast to an object type selects the element overload; a bare scalar selects int.
        for (MethodId id : ids) {
            const auto& sig = api_.sig(id);
            bool ok = true;
            for (std::size_t i = 0; i < args.size() && ok; ++i) {
                bool marked = is_object_cast(args[i].cast);
                bool is_list_arg = args[i].kind == Arg::Kind::list ||
                                   (args[i].kind == Arg::Kind::variable && var_is_collection(args[i].variable));
                switch (sig.params[i]) {
                case ParamKind::element: ok = marked && !is_list_arg; break;
                case ParamKind::index:
                case ParamKind::integer: ok = !marked && !is_list_arg; break;
                case ParamKind::collection: ok = is_list_arg; break;
                }
            }
            if (ok) return id;
        }
        return ids.front();
    }

    static bool is_object_cast(const std::string& c) { return c == "Object" || c == "Integer" || c == "E"; }

    bool var_is_collection(const std::string& v) const
    {
        auto it = vars_.find(v);
        return it != vars_.end() && (it->second.subject || it->second.kind == ValueKind::collection);
    }

    void check_kind(const Arg& a, ParamKind k, std::size_t col) const
    {
        if (a.kind == Arg::Kind::variable) {
            auto it = vars_.find(a.variable);
            if (it == vars_.end()) fail_at(col, "unbound variable " + a.variable);
            bool collection = it->second.subject || it->second.kind == ValueKind::collection;
            bool scalar = !it->second.subject &&
                          (it->second.kind == ValueKind::element || it->second.kind == ValueKind::integer);
            if (k == ParamKind::collection ? !collection : !scalar)
                fail_at(col, "variable " + a.variable + " has the wrong kind for a " +
                                 std::string(param_type_name(k)) + " parameter");
            return;
        }
        if (k == ParamKind::collection && a.kind != Arg::Kind::list)
            fail_at(col, "expected a collection argument");
        if (k != ParamKind::collection && a.kind == Arg::Kind::list)
            fail_at(col, "unexpected list literal for a " + std::string(param_type_name(k)) + " parameter");
    }

    Arg arg()
    {
        std::string cast;
        if (peek() == '(' && cast_ahead()) {
            ++pos_;
            skip_ws();
            cast = ident("type");
            skip_generic();
            skip_ws();
            expect(')');
            skip_ws();
        }
        Arg a = atom();
        a.cast = cast;
        return a;
    }

    // "(Ident)" followed by something other than an operator.
    bool cast_ahead() const
    {
        std::size_t p = pos_ + 1;
        while (p < text_.size() && text_[p] == ' ') ++p;
        if (p >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[p]))) return false;
        while (p < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_' ||
                                    text_[p] == '<' || text_[p] == '>' || text_[p] == '?'))
            ++p;
        while (p < text_.size() && text_[p] == ' ') ++p;
        return p < text_.size() && text_[p] == ')';
    }

    Arg atom()
    {
        char c = peek();
        if (c == '(') {
            ++pos_;
            skip_ws();
            Arg inner = atom();
            skip_ws();
            expect(')');
            return inner;
        }
        if (c == '[') {
            ++pos_;
            ElementList xs;
            skip_ws();
            if (peek() != ']') {
                while (true) {
                    skip_ws();
                    xs.push_back(integer());
                    skip_ws();
                    if (peek() == ',') {
                        ++pos_;
                        continue;
                    }
                    break;
                }
            }
            expect(']');
            return Arg::list(std::move(xs));
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) return Arg::literal(integer());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t col = pos_;
            std::string v = ident("argument");
            if (!vars_.count(v)) fail_at(col, "unbound variable " + v);
            return Arg::var(v);
        }
        fail("malformed literal");
    }

    Element integer()
    {
        std::size_t start = pos_;
        if (peek() == '-' || peek() == '+') ++pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string_view tok = text_.substr(start, pos_ - start);
        if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
        Element v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size())
            fail_at(start, "malformed literal '" + std::string(text_.substr(start, pos_ - start)) + "'");
        return v;
    }

    std::string ident(const char* what)
    {
        std::size_t start = pos_;
        if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
        }
        if (start == pos_) fail(std::string("expected ") + what);
        return std::string(text_.substr(start, pos_ - start));
    }

    void skip_generic()
    {
        if (peek() != '<') return;
        int depth = 0;
        while (pos_ < text_.size()) {
            char c = text_[pos_++];
            if (c == '<') ++depth;
            if (c == '>' && --depth == 0) return;
        }
        fail("unterminated type arguments");
    }

    void finish()
    {
        skip_ws();
        if (peek() == ';') ++pos_;
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing text");
    }

    void expect(char c)
    {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }
    [[noreturn]] void fail_at(std::size_t col, const std::string& what) const
    {
        throw ParseError(line_, col + 1, what);
    }

    const SubjectApi& api_;
    std::string_view text_;
    std::size_t line_;
    std::map<std::string, VarInfo>& vars_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses statement-language text into a well-formed Sequence; throws ParseError.
inline Sequence parse_sequence(const SubjectApi& api, std::string_view text)
{
    Sequence seq;
    std::map<std::string, detail::VarInfo> vars;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (auto slashes = line.find("//"); slashes != std::string_view::npos) line = line.substr(0, slashes);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
        if (!blank) seq.statements.push_back(detail::LineParser(api, line, line_no, vars).parse());
        if (end == text.size()) break;
        start = end + 1;
    }
    return seq;
}

} // namespace esg
