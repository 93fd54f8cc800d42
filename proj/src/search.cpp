#include "tempo/search.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <unordered_map>

namespace tempo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_cost(const Constant& c) {
    if (c.kind() != ConstantKind::Number) return 0.0;
    return std::max(0.0, c.as_number());
}

bool mentions_fluent(const Term& term) {
    if (!term.is_application()) return false;
    const auto& app = term.application();
    if (app.symbol->fluent()) return true;
    return std::any_of(app.args.begin(), app.args.end(), mentions_fluent);
}

bool all_constant_args(const Application& app) {
    return std::all_of(app.args.begin(), app.args.end(), [](const Term& t) { return t.is_constant(); });
}

GroundAtom flat_atom(const Application& app) {
    GroundAtom atom{app.symbol.get(), {}};
    for (const auto& a : app.args) atom.args.push_back(a.constant());
    return atom;
}

}  // namespace

double step_cost(const State& state, const ActionInstance& step) {
    if (step.role() == StepRole::End && step.source) {
        const double* r = state.remaining(*step.source);
        return r ? std::max(0.0, *r) : 0.0;
    }
    return clamp_cost(evaluate_term(state, step.cost));
}

bool applicable(const State& state, const ActionInstance& step) { return check_all(state, step.cond); }

bool replay_plan(const State& initial, const std::vector<Condition>& goal, const Plan& plan, double* cost) {
    State state = initial;
    double total = 0.0;
    for (const auto& step : plan.steps) {
        if (!applicable(state, *step)) return false;
        total += step_cost(state, *step);
        state = apply_effects(state, step->eff);
    }
    if (cost) *cost = total;
    return check_all(state, goal);
}

// ---------------------------------------------------------------------------
// Relaxed plan heuristic

int RelaxedPlanHeuristic::intern_value(GroundAtom atom, Constant value) {
    auto key = std::make_pair(atom, value);
    auto it = value_ids_.find(key);
    if (it != value_ids_.end()) return it->second;
    const int id = static_cast<int>(facts_.size());
    default_holds_.push_back(constants_match(atom.symbol->default_value(), value) ? 1 : 0);
    atom_facts_[atom].push_back(id);
    facts_.push_back(Fact{std::move(atom), std::move(value), nullptr});
    consumers_.emplace_back();
    value_ids_.emplace(std::move(key), id);
    return id;
}

int RelaxedPlanHeuristic::intern_ongoing(const ActionInstance* instance) {
    auto it = ongoing_ids_.find(instance);
    if (it != ongoing_ids_.end()) return it->second;
    const int id = static_cast<int>(facts_.size());
    default_holds_.push_back(0);
    facts_.push_back(Fact{{}, {}, instance});
    consumers_.emplace_back();
    ongoing_ids_.emplace(instance, id);
    return id;
}

void RelaxedPlanHeuristic::holding(const State& state, std::vector<char>& out) const {
    out = default_holds_;
    for (const auto& [atom, value] : state.fluents()) {
        auto it = atom_facts_.find(atom);
        if (it == atom_facts_.end()) continue;
        for (int f : it->second) out[static_cast<std::size_t>(f)] = constants_match(value, facts_[static_cast<std::size_t>(f)].value);
    }
    for (const auto& [inst, remaining] : state.ongoing()) {
        auto it = ongoing_ids_.find(inst.get());
        if (it != ongoing_ids_.end()) out[static_cast<std::size_t>(it->second)] = 1;
    }
}

RelaxedPlanHeuristic::RelaxedPlanHeuristic(const State& context, const std::vector<Condition>& goal,
                                           const std::vector<InstancePtr>& actions) {
    enum class Verdict { Fact, Satisfied, Impossible };
    auto classify = [&](const Condition& cond, int& fact) {
        if (!cond.is_equality()) return Verdict::Satisfied;
        Term lhs = cond.equality().lhs;
        Term rhs = cond.equality().rhs;
        if (!lhs.is_application() && rhs.is_application()) std::swap(lhs, rhs);
        if (lhs.is_application() && lhs.application().symbol->fluent()) {
            const auto& app = lhs.application();
            if (!all_constant_args(app)) return Verdict::Satisfied;
            if (mentions_fluent(rhs)) return Verdict::Satisfied;
            fact = intern_value(flat_atom(app), evaluate_term(context, rhs));
            return Verdict::Fact;
        }
        if (mentions_fluent(lhs) || mentions_fluent(rhs)) return Verdict::Satisfied;
        return check_condition(context, cond) ? Verdict::Satisfied : Verdict::Impossible;
    };

    for (const auto& cond : goal) {
        int fact = -1;
        switch (classify(cond, fact)) {
            case Verdict::Fact:
                goal_.push_back(fact);
                break;
            case Verdict::Impossible:
                goal_impossible_ = true;
                break;
            case Verdict::Satisfied:
                break;
        }
    }

    for (const auto& inst : actions) {
        RelaxedAction ra;
        bool possible = true;
        for (const auto& cond : inst->cond) {
            int fact = -1;
            const Verdict v = classify(cond, fact);
            if (v == Verdict::Impossible) {
                possible = false;
                break;
            }
            if (v == Verdict::Fact) ra.pre.push_back(fact);
        }
        if (!possible) continue;
        const StepRole role = inst->role();
        if (role == StepRole::End && inst->source) ra.pre.push_back(intern_ongoing(inst->source.get()));
        if (role == StepRole::Start && inst->source) ra.add.push_back(intern_ongoing(inst->source.get()));
        for (const auto& eff : inst->eff) {
            if (!eff.is_assignment()) continue;
            const auto& target = eff.assignment().target;
            if (!target.is_application() || !target.application().symbol->fluent()) continue;
            const auto& app = target.application();
            GroundAtom atom{app.symbol.get(), {}};
            for (const auto& a : app.args) atom.args.push_back(evaluate_term(context, a));
            ra.add.push_back(intern_value(std::move(atom), evaluate_term(context, eff.assignment().value)));
        }
        switch (role) {
            case StepRole::Start:
                ra.cost = 0.0;
                break;
            case StepRole::End:
                ra.cost = inst->source ? inst->source->duration_value : 0.0;
                break;
            default:
                ra.cost = clamp_cost(evaluate_term(context, inst->cost));
        }
        std::sort(ra.pre.begin(), ra.pre.end());
        ra.pre.erase(std::unique(ra.pre.begin(), ra.pre.end()), ra.pre.end());
        actions_.push_back(std::move(ra));
    }
    for (std::size_t a = 0; a < actions_.size(); ++a) {
        for (int f : actions_[a].pre) consumers_[static_cast<std::size_t>(f)].push_back(static_cast<int>(a));
    }
}

HeuristicValue RelaxedPlanHeuristic::evaluate(const State& state) const {
    if (goal_impossible_) return HeuristicValue::infinity();
    const std::size_t nf = facts_.size();
    std::vector<double> cost(nf, kInf);
    std::vector<int> supporter(nf, -1);
    std::vector<char> initial;
    holding(state, initial);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t f = 0; f < nf; ++f) {
        if (initial[f]) {
            cost[f] = 0.0;
            heap.emplace(0.0, static_cast<int>(f));
        }
    }
    std::vector<std::size_t> waiting(actions_.size());
    std::vector<double> pre_sum(actions_.size(), 0.0);
    auto fire = [&](std::size_t a) {
        const double c = pre_sum[a] + actions_[a].cost;
        for (int e : actions_[a].add) {
            const auto ue = static_cast<std::size_t>(e);
            if (c < cost[ue]) {
                cost[ue] = c;
                supporter[ue] = static_cast<int>(a);
                heap.emplace(c, e);
            }
        }
    };
    for (std::size_t a = 0; a < actions_.size(); ++a) {
        waiting[a] = actions_[a].pre.size();
        if (waiting[a] == 0) fire(a);
    }
    std::vector<char> done(nf, 0);
    while (!heap.empty()) {
        const auto [c, f] = heap.top();
        heap.pop();
        const auto uf = static_cast<std::size_t>(f);
        if (done[uf] || c > cost[uf]) continue;
        done[uf] = 1;
        for (int a : consumers_[uf]) {
            const auto ua = static_cast<std::size_t>(a);
            pre_sum[ua] += c;
            if (--waiting[ua] == 0) fire(ua);
        }
    }
    for (int g : goal_) {
        if (cost[static_cast<std::size_t>(g)] == kInf) return HeuristicValue::infinity();
    }

    HeuristicValue out;
    std::vector<char> marked(actions_.size(), 0);
    std::vector<char> visited(nf, 0);
    std::vector<int> stack(goal_.begin(), goal_.end());
    while (!stack.empty()) {
        const auto f = static_cast<std::size_t>(stack.back());
        stack.pop_back();
        if (visited[f]) continue;
        visited[f] = 1;
        if (initial[f]) continue;
        const int a = supporter[f];
        if (a < 0 || marked[static_cast<std::size_t>(a)]) continue;
        marked[static_cast<std::size_t>(a)] = 1;
        out.cost += actions_[static_cast<std::size_t>(a)].cost;
        ++out.length;
        for (int p : actions_[static_cast<std::size_t>(a)].pre) stack.push_back(p);
    }
    return out;
}

HeuristicValue ff_heuristic(const State& state, const std::vector<Condition>& goal,
                            const std::vector<InstancePtr>& actions) {
    return RelaxedPlanHeuristic(state, goal, actions).evaluate(state);
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct NodeKey {
    State state;
    std::vector<std::uint16_t> used;

    friend bool operator==(const NodeKey& a, const NodeKey& b) { return a.used == b.used && a.state == b.state; }
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
        std::size_t h = k.state.hash();
        for (auto u : k.used) h = hash_combine(h, u);
        return h;
    }
};

struct Node {
    NodeKey key;
    int parent;
    int via;
    double g;
};

struct Record {
    double g;
    bool expanded;
};

struct OpenEntry {
    double f;
    double h;
    std::uint64_t seq;
    int node;
};

struct OpenOrder {
    bool operator()(const OpenEntry& a, const OpenEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.h != b.h) return a.h > b.h;
        return a.seq > b.seq;
    }
};

constexpr double kCostSlack = 1e-9;

// Flat fluent equalities each step requires, so most inapplicable steps are
// rejected without evaluating terms.
class StepFilter {
public:
    explicit StepFilter(const std::vector<InstancePtr>& actions) {
        required_.resize(actions.size());
        for (std::size_t i = 0; i < actions.size(); ++i) {
            for (const auto& cond : actions[i]->cond) {
                if (!cond.is_equality()) continue;
                const Term* lhs = &cond.equality().lhs;
                const Term* rhs = &cond.equality().rhs;
                if (lhs->is_constant()) std::swap(lhs, rhs);
                if (!lhs->is_application() || !rhs->is_constant()) continue;
                const auto& app = lhs->application();
                if (!app.symbol->fluent() || !all_constant_args(app)) continue;
                required_[i].push_back(intern(flat_atom(app), rhs->constant()));
            }
        }
    }

    void holding(const State& state, std::vector<char>& out) const {
        out = default_holds_;
        for (const auto& [atom, value] : state.fluents()) {
            auto it = atom_facts_.find(atom);
            if (it == atom_facts_.end()) continue;
            for (int f : it->second) {
                out[static_cast<std::size_t>(f)] = constants_match(value, values_[static_cast<std::size_t>(f)]);
            }
        }
    }

    bool possible(std::size_t step, const std::vector<char>& holds) const {
        for (int f : required_[step]) {
            if (!holds[static_cast<std::size_t>(f)]) return false;
        }
        return true;
    }

private:
    int intern(GroundAtom atom, Constant value) {
        auto& ids = atom_facts_[atom];
        for (int f : ids) {
            if (values_[static_cast<std::size_t>(f)] == value) return f;
        }
        const int id = static_cast<int>(values_.size());
        default_holds_.push_back(constants_match(atom.symbol->default_value(), value) ? 1 : 0);
        values_.push_back(std::move(value));
        ids.push_back(id);
        return id;
    }

    std::vector<std::vector<int>> required_;
    std::vector<Constant> values_;
    std::vector<char> default_holds_;
    std::unordered_map<GroundAtom, std::vector<int>, GroundAtomHash> atom_facts_;
};

}  // namespace

SearchResult search(const State& initial, const std::vector<Condition>& goal, const std::vector<InstancePtr>& actions,
                    const SearchOptions& options, const std::vector<int>* limits) {
    if (options.weight < 1.0) throw ConfigurationError("search weight must be at least 1");
    if (limits && limits->size() != actions.size()) throw ConfigurationError("limits must match actions");
    const bool blind = options.mode == SearchMode::Blind;
    const double weight = blind ? 1.0 : options.weight;
    std::optional<RelaxedPlanHeuristic> heuristic;
    if (!blind) heuristic.emplace(initial, goal, actions);
    const StepFilter filter(actions);
    std::vector<char> holds;

    SearchResult result;
    std::vector<Node> nodes;
    std::unordered_map<NodeKey, Record, NodeKeyHash> seen;
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
    std::uint64_t seq = 0;

    NodeKey root{initial, {}};
    if (limits) root.used.assign(actions.size(), 0);
    seen.emplace(root, Record{0.0, false});
    nodes.push_back(Node{std::move(root), -1, -1, 0.0});
    open.push(OpenEntry{0.0, 0.0, seq++, 0});

    while (!open.empty()) {
        const OpenEntry entry = open.top();
        open.pop();
        const Node& node = nodes[static_cast<std::size_t>(entry.node)];
        Record& record = seen.at(node.key);
        if (record.expanded || node.g > record.g + kCostSlack) continue;
        record.expanded = true;

        if (check_all(node.key.state, goal)) {
            Plan plan;
            plan.total_cost = node.g;
            for (int n = entry.node; nodes[static_cast<std::size_t>(n)].parent >= 0;
                 n = nodes[static_cast<std::size_t>(n)].parent) {
                plan.steps.push_back(actions[static_cast<std::size_t>(nodes[static_cast<std::size_t>(n)].via)]);
            }
            std::reverse(plan.steps.begin(), plan.steps.end());
            result.status = SearchStatus::Solved;
            result.plan = std::move(plan);
            return result;
        }

        if (result.expansions >= options.max_expansions) {
            result.status = SearchStatus::ResourceLimit;
            return result;
        }
        if (options.deadline && (result.expansions % 32) == 0 && Clock::now() >= *options.deadline) {
            result.status = SearchStatus::ResourceLimit;
            return result;
        }
        ++result.expansions;

        double h = 0.0;
        if (heuristic) {
            ++result.evaluations;
            const HeuristicValue hv = heuristic->evaluate(node.key.state);
            if (hv.infinite()) continue;
            h = hv.cost;
        }

        const int parent_index = entry.node;
        const double parent_g = node.g;
        // Copy: `nodes` may reallocate while children are added.
        const NodeKey parent_key = node.key;
        filter.holding(parent_key.state, holds);
        for (std::size_t i = 0; i < actions.size(); ++i) {
            if (limits && static_cast<int>(parent_key.used[i]) >= (*limits)[i]) continue;
            if (!filter.possible(i, holds)) continue;
            const ActionInstance& step = *actions[i];
            if (!applicable(parent_key.state, step)) continue;
            const double g = parent_g + step_cost(parent_key.state, step);
            NodeKey child{apply_effects(parent_key.state, step.eff), parent_key.used};
            if (limits) ++child.used[i];
            auto it = seen.find(child);
            if (it != seen.end()) {
                if (it->second.g <= g + kCostSlack) continue;
                it->second = Record{g, false};
            } else {
                seen.emplace(child, Record{g, false});
            }
            nodes.push_back(Node{std::move(child), parent_index, static_cast<int>(i), g});
            open.push(OpenEntry{g + weight * h, h, seq++, static_cast<int>(nodes.size() - 1)});
        }
    }
    result.status = SearchStatus::Unsolvable;
    return result;
}

Plan reschedule(const State& initial, const std::vector<Condition>& goal, const Plan& plan, SearchOptions options) {
    if (plan.steps.size() <= 1) return plan;
    std::vector<InstancePtr> unique;
    std::vector<int> limits;
    for (const auto& step : plan.steps) {
        auto it = std::find(unique.begin(), unique.end(), step);
        if (it == unique.end()) {
            unique.push_back(step);
            limits.push_back(1);
        } else {
            ++limits[static_cast<std::size_t>(it - unique.begin())];
        }
    }
    options.weight = 1.0;
    SearchResult result;
    try {
        result = search(initial, goal, unique, options, &limits);
    } catch (const std::exception&) {
        return plan;
    }
    if (!result.solved()) return plan;
    double current = 0.0;
    if (replay_plan(initial, goal, plan, &current) && result.plan->total_cost > current) {
        Plan same = plan;
        same.total_cost = current;
        return same;
    }
    return *result.plan;
}

}  // namespace tempo
