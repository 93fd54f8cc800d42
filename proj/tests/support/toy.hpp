#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tempo/model.hpp"
#include "tempo/temporal.hpp"

namespace toy {

using namespace tempo;

inline Constant sym(const std::string& s) { return Constant::symbol(s); }

// Durative jobs with fixed durations. A job may claim a machine, which no
// other job can use while it runs.
struct Jobs {
    SymbolPtr job = FunctionSymbol::predicate("Job", "?x");
    SymbolPtr uses = FunctionSymbol::predicate("Uses", "?x ?m");
    SymbolPtr dur = FunctionSymbol::function("Dur", "?x", Range::Numeric);
    SymbolPtr done = FunctionSymbol::predicate("Done", "?x", {{}, {}, {}, {}, true});
    SymbolPtr busy = FunctionSymbol::predicate("Busy", "?m", {{}, {}, {}, {}, true});
    SymbolPtr after = FunctionSymbol::predicate("After", "?x ?y");
    SymbolPtr released = FunctionSymbol::predicate("Released", "?x", {{}, {}, {}, {}, true});

    ActionPtr run = [this] {
        DurativeSpec spec;
        spec.start_cond = {holds((*job)("?x")), equals((*done)("?x"), Constant::boolean(false))};
        spec.duration = (*dur)("?x");
        spec.end_eff = {assign((*done)("?x"), Constant::boolean(true))};
        return Action::durative("run", "?x", spec);
    }();
    ActionPtr run_on = [this] {
        DurativeSpec spec;
        spec.start_cond = {holds((*job)("?x")), holds((*uses)("?x", "?m")),
                           equals((*done)("?x"), Constant::boolean(false)),
                           equals((*busy)("?m"), Constant::boolean(false))};
        spec.start_eff = {assign((*busy)("?m"), Constant::boolean(true))};
        spec.duration = (*dur)("?x");
        spec.end_eff = {assign((*done)("?x"), Constant::boolean(true)), assign((*busy)("?m"), Constant::boolean(false))};
        return Action::durative("run_on", "?x ?m", spec);
    }();
    // Instantaneous step that needs ?y finished.
    ActionPtr release = Action::instantaneous(
        "release", "?x ?y", {holds((*after)("?x", "?y")), equals((*done)("?y"), Constant::boolean(true))},
        {assign((*released)("?x"), Constant::boolean(true))});

    void add(State& s, const std::string& name, double duration) const {
        s.assign({job.get(), {sym(name)}}, Constant::boolean(true));
        s.assign({dur.get(), {sym(name)}}, Constant::number(duration));
    }

    State initial(const std::vector<std::pair<std::string, double>>& jobs) const {
        State s;
        for (const auto& [name, d] : jobs) add(s, name, d);
        return s;
    }

    std::vector<Condition> goal(const std::vector<std::string>& names) const {
        std::vector<Condition> g;
        for (const auto& n : names) g.push_back(holds((*done)(sym(n))));
        return g;
    }

};

// Step of a compiled action list by source name, arguments and role.
inline InstancePtr pick_step(const std::vector<InstancePtr>& steps, const std::string& name,
                             const std::vector<Constant>& args, StepRole role) {
    for (const auto& inst : steps) {
        const auto& owner = inst->action->source() ? inst->action->source() : inst->action;
        if (owner->name() == name && inst->args == args && inst->role() == role) return inst;
    }
    return nullptr;
}

}  // namespace toy
