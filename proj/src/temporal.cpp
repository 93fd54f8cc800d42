#include "tempo/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "tempo/grounding.hpp"

namespace tempo {

namespace {

constexpr double kTimeTolerance = 1e-6;

std::vector<Term> param_terms(const std::vector<std::string>& params) {
    std::vector<Term> out;
    for (const auto& p : params) out.push_back(Term::param(p));
    return out;
}

std::vector<Constant> to_vector(std::span<const Constant> args) { return {args.begin(), args.end()}; }

}  // namespace

Condition over_condition() {
    return procedure_condition("OverCondition", {}, [](const State& state, std::span<const Constant>) {
        for (const auto& [inst, remaining] : state.ongoing()) {
            if (!check_all(state, inst->over_cond)) return false;
        }
        return true;
    });
}

Condition nothing_ongoing() {
    return procedure_condition("NothingOngoing", {},
                               [](const State& state, std::span<const Constant>) { return state.ongoing().empty(); });
}

CompiledPair compile_durative(const ActionPtr& action) {
    if (!action->is_durative()) {
        std::vector<Condition> cond = action->cond();
        cond.push_back(over_condition());
        return {Action::compiled(action->name(), action->params(), std::move(cond), action->eff(), action->cost(),
                                 StepRole::Instant, action, nullptr),
                nullptr};
    }
    const auto& spec = action->durative_spec();
    auto interner = std::make_shared<DurativeInterner>(action);
    const std::vector<Term> params = param_terms(action->params());

    std::vector<Condition> start_cond = spec.start_cond;
    start_cond.push_back(procedure_condition("NotOngoing", params,
                                             [interner](const State& state, std::span<const Constant> args) {
                                                 return state.remaining(*interner->intern(to_vector(args), state)) ==
                                                        nullptr;
                                             }));
    start_cond.push_back(over_condition());
    std::vector<Effect> start_eff = spec.start_eff;
    start_eff.push_back(procedure_effect("Begin", params,
                                         [interner](const State& pre, State& post, std::span<const Constant> args) {
                                             auto inst = interner->intern(to_vector(args), pre);
                                             post.set_ongoing(inst, inst->duration_value);
                                         }));

    std::vector<Condition> end_cond = spec.end_cond;
    end_cond.push_back(procedure_condition("Ongoing", params,
                                           [interner](const State& state, std::span<const Constant> args) {
                                               return state.remaining(*interner->intern(to_vector(args), state)) !=
                                                      nullptr;
                                           }));
    end_cond.push_back(over_condition());
    std::vector<Effect> end_eff = spec.end_eff;
    end_eff.push_back(procedure_effect("Elapse", params,
                                       [interner](const State& pre, State& post, std::span<const Constant> args) {
                                           auto inst = interner->intern(to_vector(args), pre);
                                           const double* remaining = pre.remaining(*inst);
                                           post.elapse(remaining ? std::max(0.0, *remaining) : 0.0);
                                           post.erase_ongoing(*inst);
                                       }));

    // The end step's cost term is only an estimate; search charges the
    // remaining duration read from the state.
    return {Action::compiled(action->name() + ".start", action->params(), std::move(start_cond), std::move(start_eff),
                             Constant::number(0.0), StepRole::Start, action, interner),
            Action::compiled(action->name() + ".end", action->params(), std::move(end_cond), std::move(end_eff),
                             spec.duration, StepRole::End, action, interner)};
}

ActionPtr sequentialize(const ActionPtr& action) {
    if (!action->is_durative()) return action;
    const auto& spec = action->durative_spec();
    std::vector<Condition> cond = spec.start_cond;
    cond.insert(cond.end(), spec.over_cond.begin(), spec.over_cond.end());
    cond.insert(cond.end(), spec.end_cond.begin(), spec.end_cond.end());
    // End effects overwrite start effects on the same target.
    std::set<std::string> end_targets;
    for (const auto& e : spec.end_eff) {
        if (e.is_assignment()) end_targets.insert(e.assignment().target.str());
    }
    std::vector<Effect> eff;
    for (const auto& e : spec.start_eff) {
        if (e.is_assignment() && end_targets.count(e.assignment().target.str())) continue;
        eff.push_back(e);
    }
    eff.insert(eff.end(), spec.end_eff.begin(), spec.end_eff.end());
    return Action::compiled(action->name(), action->params(), std::move(cond), std::move(eff), spec.duration,
                            StepRole::Serial, action, std::make_shared<DurativeInterner>(action));
}

std::vector<InstancePtr> ground_compiled(const State& state, const std::vector<ActionPtr>& actions,
                                         Compilation compilation) {
    std::vector<ActionPtr> sources;
    std::map<const Action*, std::vector<ActionPtr>> compiled;
    for (const auto& a : actions) {
        sources.push_back(a);
        if (compilation == Compilation::Serial) {
            compiled[a.get()] = {sequentialize(a)};
            continue;
        }
        auto pair = compile_durative(a);
        if (pair.end) {
            compiled[a.get()] = {pair.start, pair.end};
        } else {
            compiled[a.get()] = {pair.start};
        }
    }
    std::vector<InstancePtr> out;
    for (const auto& inst : instantiate_actions(state, sources)) {
        for (const auto& step : compiled.at(inst->action.get())) {
            if (step == inst->action) {
                out.push_back(inst);
            } else {
                out.push_back(ground_action(step, inst->args, state));
            }
        }
    }
    return out;
}

std::vector<Condition> temporal_goal(const std::vector<Condition>& goal) {
    std::vector<Condition> out = goal;
    out.push_back(nothing_ongoing());
    return out;
}

Schedule extract_schedule(const Plan& plan) {
    Schedule schedule;
    double now = 0.0;
    std::map<const ActionInstance*, std::size_t> open;
    for (const auto& step : plan.steps) {
        const ActionPtr& owner = step->action->source() ? step->action->source() : step->action;
        switch (step->role()) {
            case StepRole::Start: {
                if (!step->source) throw IllFormedPlanError("start step without source: " + step->str());
                if (open.count(step->source.get())) throw IllFormedPlanError("restart of ongoing " + step->str());
                open[step->source.get()] = schedule.entries.size();
                schedule.event_order.push_back({schedule.entries.size(), EventKind::Start});
                schedule.entries.push_back({now, now, owner, step->args});
                break;
            }
            case StepRole::End: {
                auto it = step->source ? open.find(step->source.get()) : open.end();
                if (it == open.end()) throw IllFormedPlanError("end without matching start: " + step->str());
                ScheduleEntry& entry = schedule.entries[it->second];
                const double dt = step->source->duration_value - (now - entry.start);
                now += std::max(0.0, dt);
                entry.end = now;
                schedule.event_order.push_back({it->second, EventKind::End});
                open.erase(it);
                break;
            }
            case StepRole::Serial: {
                const std::size_t index = schedule.entries.size();
                const double start = now;
                now += step->duration_value;
                schedule.entries.push_back({start, now, owner, step->args});
                schedule.event_order.push_back({index, EventKind::Start});
                schedule.event_order.push_back({index, EventKind::End});
                break;
            }
            case StepRole::Instant: {
                schedule.event_order.push_back({schedule.entries.size(), EventKind::Instant});
                schedule.entries.push_back({now, now, owner, step->args});
                break;
            }
        }
    }
    if (!open.empty()) throw IllFormedPlanError("plan leaves actions ongoing");
    return schedule;
}

ScheduleOutcome schedule(const State& initial, const std::vector<Condition>& goal,
                         const std::vector<ActionPtr>& actions, const ScheduleOptions& options) {
    ScheduleOutcome outcome;
    const auto steps = ground_compiled(initial, actions, options.compilation);
    const auto full_goal = temporal_goal(goal);
    SearchResult result = search(initial, full_goal, steps, options.search);
    outcome.status = result.status;
    if (!result.solved()) return outcome;
    Plan plan = std::move(*result.plan);
    if (options.reschedule && options.compilation == Compilation::Temporal) {
        SearchOptions again = options.search;
        if (plan.steps.size() <= options.blind_reschedule_limit) again.mode = SearchMode::Blind;
        plan = reschedule(initial, full_goal, plan, again);
    }
    outcome.schedule = extract_schedule(plan);
    outcome.plan = std::move(plan);
    return outcome;
}

ValidationReport validate_schedule(const State& initial, const std::vector<Condition>& goal,
                                   const Schedule& schedule) {
    auto fail = [](std::string message, std::optional<std::size_t> event = std::nullopt) {
        return ValidationReport{false, std::move(message), event};
    };
    const std::size_t n = schedule.entries.size();
    std::vector<InstancePtr> ground(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = schedule.entries[i];
        if (!e.action) return fail("entry " + std::to_string(i) + " has no action");
        if (any_lazy(e.args)) return fail("entry " + e.label() + " mentions a placeholder constant");
        try {
            ground[i] = ground_action(e.action, e.args, initial);
        } catch (const std::exception& ex) {
            return fail("entry " + e.label() + ": " + ex.what());
        }
        if (!std::isfinite(e.start) || !std::isfinite(e.end) || e.start < -kTimeTolerance) {
            return fail("entry " + e.label() + " has invalid times");
        }
        if (e.end < e.start - kTimeTolerance) return fail("entry " + e.label() + " ends before it starts");
        if (e.action->is_durative() && e.start + ground[i]->duration_value > e.end + kTimeTolerance) {
            std::ostringstream os;
            os << "entry " << e.label() << " lasts " << (e.end - e.start) << " s, shorter than its duration "
               << ground[i]->duration_value << " s";
            return fail(os.str());
        }
    }

    // Each durative entry needs one start and one later end; instantaneous
    // entries need one instant event.
    std::vector<int> starts(n, 0), ends(n, 0), instants(n, 0);
    for (std::size_t k = 0; k < schedule.event_order.size(); ++k) {
        const auto& ev = schedule.event_order[k];
        if (ev.entry >= n) return fail("event refers to missing entry", k);
        const bool durative = schedule.entries[ev.entry].action->is_durative();
        switch (ev.kind) {
            case EventKind::Start:
                if (!durative || starts[ev.entry]++ > 0) return fail("unexpected start event", k);
                break;
            case EventKind::End:
                if (!durative || starts[ev.entry] == 0 || ends[ev.entry]++ > 0) {
                    return fail("unexpected end event", k);
                }
                break;
            case EventKind::Instant:
                if (durative || instants[ev.entry]++ > 0) return fail("unexpected instant event", k);
                break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool durative = schedule.entries[i].action->is_durative();
        if (durative ? (starts[i] != 1 || ends[i] != 1) : instants[i] != 1) {
            return fail("entry " + schedule.entries[i].label() + " is missing from the event order");
        }
    }

    State state = initial;
    std::vector<std::size_t> ongoing;
    double last_time = 0.0;
    for (std::size_t k = 0; k < schedule.event_order.size(); ++k) {
        const auto& ev = schedule.event_order[k];
        const ScheduleEntry& entry = schedule.entries[ev.entry];
        const ActionInstance& inst = *ground[ev.entry];
        const double t = ev.kind == EventKind::End ? entry.end : entry.start;
        if (t < last_time - kTimeTolerance) return fail("event " + entry.label() + " goes back in time", k);
        last_time = std::max(last_time, t);

        const std::vector<Condition>* conds = nullptr;
        const std::vector<Effect>* effs = nullptr;
        const char* what = "";
        switch (ev.kind) {
            case EventKind::Start:
                conds = &inst.start_cond;
                effs = &inst.start_eff;
                what = "start";
                break;
            case EventKind::End:
                conds = &inst.end_cond;
                effs = &inst.end_eff;
                what = "end";
                break;
            case EventKind::Instant:
                conds = &inst.cond;
                effs = &inst.eff;
                what = "instant";
                break;
        }
        for (const auto& c : *conds) {
            if (!check_condition(state, c)) {
                return fail(std::string(what) + " condition " + c.str() + " of " + entry.label() + " fails", k);
            }
        }
        try {
            state = apply_effects(state, *effs);
        } catch (const std::exception& ex) {
            return fail(std::string(what) + " effects of " + entry.label() + ": " + ex.what(), k);
        }
        if (ev.kind == EventKind::Start) ongoing.push_back(ev.entry);
        if (ev.kind == EventKind::End) std::erase(ongoing, ev.entry);
        for (std::size_t i : ongoing) {
            for (const auto& c : ground[i]->over_cond) {
                if (!check_condition(state, c)) {
                    return fail("over condition " + c.str() + " of " + schedule.entries[i].label() + " fails after " +
                                    what + " of " + entry.label(),
                                k);
                }
            }
        }
    }
    for (const auto& c : goal) {
        if (!check_condition(state, c)) return fail("goal " + c.str() + " does not hold");
    }
    return {};
}

ValidationReport validate_schedule(const Problem& problem, const Schedule& schedule) {
    return validate_schedule(problem.initial, problem.goal, schedule);
}

}  // namespace tempo
