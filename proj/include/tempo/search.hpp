#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tempo/model.hpp"

namespace tempo {

using Clock = std::chrono::steady_clock;

enum class SearchMode { Heuristic, Blind };

struct SearchOptions {
    double weight = 5.0;
    SearchMode mode = SearchMode::Heuristic;
    std::size_t max_expansions = 200000;
    std::optional<Clock::time_point> deadline;
};

struct Plan {
    std::vector<InstancePtr> steps;
    double total_cost = 0.0;
};

enum class SearchStatus { Solved, Unsolvable, ResourceLimit };

struct SearchResult {
    SearchStatus status = SearchStatus::Unsolvable;
    std::optional<Plan> plan;
    std::size_t expansions = 0;
    std::size_t evaluations = 0;

    bool solved() const { return status == SearchStatus::Solved; }
};

// Non-negative cost of applying `step` in `state`. End steps cost the source
// instance's remaining duration.
double step_cost(const State& state, const ActionInstance& step);
bool applicable(const State& state, const ActionInstance& step);
// Replays `plan` from `initial`; true iff every step applies and the goal holds
// at the end. `cost` receives the accumulated step cost.
bool replay_plan(const State& initial, const std::vector<Condition>& goal, const Plan& plan,
                 double* cost = nullptr);

struct HeuristicValue {
    double cost = 0.0;
    std::size_t length = 0;  // number of actions in the relaxed plan

    bool infinite() const { return cost == std::numeric_limits<double>::infinity(); }
    static HeuristicValue infinity() { return {std::numeric_limits<double>::infinity(), 0}; }
};

// Delete-relaxed plan cost over flat fluent equalities. Procedural and nested
// conditions are treated as satisfied; function assignments accumulate every
// value reached. End steps are charged their full duration.
class RelaxedPlanHeuristic {
public:
    RelaxedPlanHeuristic(const State& context, const std::vector<Condition>& goal,
                         const std::vector<InstancePtr>& actions);
    HeuristicValue evaluate(const State& state) const;

private:
    struct Fact {
        GroundAtom atom;
        Constant value;
        const ActionInstance* ongoing = nullptr;  // set for Ongoing(a) facts
    };
    struct RelaxedAction {
        std::vector<int> pre;
        std::vector<int> add;
        double cost = 0.0;
    };

    int intern_value(GroundAtom atom, Constant value);
    int intern_ongoing(const ActionInstance* instance);
    // Marks the facts true in `state`.
    void holding(const State& state, std::vector<char>& out) const;

    std::vector<Fact> facts_;
    std::map<std::pair<GroundAtom, Constant>, int> value_ids_;
    std::unordered_map<GroundAtom, std::vector<int>, GroundAtomHash> atom_facts_;
    std::vector<char> default_holds_;
    std::map<const ActionInstance*, int> ongoing_ids_;
    std::vector<RelaxedAction> actions_;
    std::vector<std::vector<int>> consumers_;
    std::vector<int> goal_;
    bool goal_impossible_ = false;
};

HeuristicValue ff_heuristic(const State& state, const std::vector<Condition>& goal,
                            const std::vector<InstancePtr>& actions);

// Lazy weighted A*: nodes are queued with their parent's heuristic and
// evaluated when popped. Ties prefer lower h, then insertion order. With `limits`, step i may be used at most limits[i] times
// and the usage counts become part of the search state.
SearchResult search(const State& initial, const std::vector<Condition>& goal, const std::vector<InstancePtr>& actions,
                    const SearchOptions& options, const std::vector<int>* limits = nullptr);

// Re-runs search restricted to the plan's own steps (each at most as often as it
// appears) with weight 1. Never returns a costlier plan than `plan`.
Plan reschedule(const State& initial, const std::vector<Condition>& goal, const Plan& plan,
                SearchOptions options = {});

}  // namespace tempo
