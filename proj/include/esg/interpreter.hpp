#pragma once

#include "esg/sequence.hpp"

#include <map>
#include <variant>

namespace esg {

/// What a variable holds: a subject instance or a returned value.
using Binding = std::variant<ObjectState, Value>;

struct StepRecord {
    std::size_t index = 0;
    Outcome outcome;
    ObjectState receiver_after; ///< receiver state after the step (the bound instance for construct)

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct ReplayTrace {
    std::vector<StepRecord> steps;
    std::map<std::string, Binding> env;
    std::optional<std::size_t> aborted_at; ///< index of the statement that raised

    bool completed() const { return !aborted_at.has_value(); }

    const ObjectState* state_of(const std::string& var) const
    {
        auto it = env.find(var);
        if (it == env.end()) return nullptr;
        return std::get_if<ObjectState>(&it->second);
    }

    friend bool operator==(const ReplayTrace&, const ReplayTrace&) = default;
};

/// Incremental interpreter over one variable environment.
class Session {
public:
    explicit Session(const SubjectApi& api) : api_(&api) {}

    const SubjectApi& api() const { return *api_; }
    const std::map<std::string, Binding>& env() const { return env_; }

    /// Executes one statement. Exceptions are reported in the outcome; state is untouched then.
    StepRecord execute(const Statement& st)
    {
        StepRecord rec;
        if (st.kind == Statement::Kind::construct) {
            env_[st.receiver] = ObjectState{};
            rec.outcome = Outcome::returned(Value::none());
            return rec;
        }
        auto it = env_.find(st.receiver);
        if (it == env_.end() || !std::holds_alternative<ObjectState>(it->second))
            throw Error("replay of ill-formed sequence: " + st.receiver + " is not a live instance");
        std::vector<ArgValue> args = resolve(st);
        auto& state = std::get<ObjectState>(env_[st.receiver]);
        rec.outcome = api_->invoke(st.method, state, args);
        rec.receiver_after = state;
        if (!rec.outcome.threw() && st.result) env_[*st.result] = rec.outcome.value;
        return rec;
    }

    std::vector<ArgValue> resolve(const Statement& st) const
    {
        std::vector<ArgValue> out;
        out.reserve(st.args.size());
        const auto& sig = api_->sig(st.method);
        for (std::size_t i = 0; i < st.args.size(); ++i) {
            const Arg& a = st.args[i];
            bool wants_list = sig.params[i] == ParamKind::collection;
            switch (a.kind) {
            case Arg::Kind::literal: out.emplace_back(a.value); break;
            case Arg::Kind::list: out.emplace_back(a.items); break;
            case Arg::Kind::variable: {
                auto it = env_.find(a.variable);
                if (it == env_.end()) throw Error("replay of ill-formed sequence: unbound " + a.variable);
                if (auto* obj = std::get_if<ObjectState>(&it->second)) {
                    if (!wants_list) throw Error("instance " + a.variable + " passed as a scalar");
                    out.emplace_back(obj->elements);
                } else {
                    const Value& v = std::get<Value>(it->second);
                    if (wants_list) out.emplace_back(v.items);
                    else out.emplace_back(v.number);
                }
                break;
            }
            }
        }
        return out;
    }

private:
    const SubjectApi* api_;
    std::map<std::string, Binding> env_;
};

/// Replays a sequence; execution stops at the first statement that raises.
inline ReplayTrace replay(const SubjectApi& api, const Sequence& seq)
{
    Session session(api);
    ReplayTrace trace;
    for (std::size_t i = 0; i < seq.statements.size(); ++i) {
        const Statement& st = seq.statements[i];
        StepRecord rec = session.execute(st);
        rec.index = i;
        if (st.kind == Statement::Kind::construct) rec.receiver_after = ObjectState{};
        bool threw = rec.outcome.threw();
        trace.steps.push_back(std::move(rec));
        if (threw) {
            trace.aborted_at = i;
            break;
        }
    }
    trace.env = session.env();
    return trace;
}

} // namespace esg
