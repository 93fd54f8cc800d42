#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempo/model.hpp"
#include "tempo/search.hpp"

namespace tempo {

// Start and end halves of a durative action. Instantaneous actions compile to
// a single Instant step (`end` is null).
struct CompiledPair {
    ActionPtr start;
    ActionPtr end;
};

// Host condition: every ongoing instance's over_cond holds.
Condition over_condition();
// Host condition: the ongoing map is empty.
Condition nothing_ongoing();

CompiledPair compile_durative(const ActionPtr& action);
// Folds a durative action into one instantaneous step costing its duration.
ActionPtr sequentialize(const ActionPtr& action);

enum class Compilation { Temporal, Serial };

// Grounds `actions` over `state` and returns the compiled steps.
std::vector<InstancePtr> ground_compiled(const State& state, const std::vector<ActionPtr>& actions,
                                         Compilation compilation);

std::vector<Condition> temporal_goal(const std::vector<Condition>& goal);

// Turns a plan over compiled steps into a schedule. Start steps record the
// current time, end steps advance it by whatever duration is left.
Schedule extract_schedule(const Plan& plan);

struct ScheduleOptions {
    SearchOptions search;
    Compilation compilation = Compilation::Temporal;
    bool reschedule = true;
    // Plans with at most this many steps are rescheduled blind (exact over
    // their step multiset).
    std::size_t blind_reschedule_limit = 16;
};

struct ScheduleOutcome {
    SearchStatus status = SearchStatus::Unsolvable;
    std::optional<Schedule> schedule;
    Plan plan;
};

ScheduleOutcome schedule(const State& initial, const std::vector<Condition>& goal,
                         const std::vector<ActionPtr>& actions, const ScheduleOptions& options = {});

struct ValidationReport {
    bool ok = true;
    std::string message;
    std::optional<std::size_t> event;  // index into event_order

    explicit operator bool() const { return ok; }
};

ValidationReport validate_schedule(const State& initial, const std::vector<Condition>& goal,
                                   const Schedule& schedule);
ValidationReport validate_schedule(const Problem& problem, const Schedule& schedule);

}  // namespace tempo
