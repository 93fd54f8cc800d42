#include "tempo/grounding.hpp"

#include <algorithm>
#include <set>

namespace tempo {

FactIndex::FactIndex(const State& state) : keep_alive_(state.statics_ptr()) {
    const Constant yes = Constant::boolean(true);
    for (const auto& [atom, value] : keep_alive_->entries()) {
        if (value == yes) by_symbol_[atom.symbol].push_back(&atom);
    }
}

const std::vector<const GroundAtom*>& FactIndex::facts(const FunctionSymbol* symbol) const {
    static const std::vector<const GroundAtom*> empty;
    auto it = by_symbol_.find(symbol);
    return it == by_symbol_.end() ? empty : it->second;
}

namespace {

struct JoinAtom {
    const FunctionSymbol* symbol;
    // For each argument: parameter slot index, or -1 with a fixed constant.
    std::vector<int> slots;
    std::vector<Constant> fixed;
};

class Joiner {
public:
    Joiner(const FactIndex& index, std::vector<JoinAtom> atoms, std::size_t num_params,
           const std::vector<Constant>& fallback)
        : index_(index), atoms_(std::move(atoms)), fallback_(fallback), values_(num_params), bound_(num_params) {}

    std::vector<std::vector<Constant>> run() {
        order_atoms();
        recurse(0);
        return std::move(results_);
    }

private:
    void order_atoms() {
        std::vector<bool> bound(values_.size(), false);
        std::vector<JoinAtom> ordered;
        std::vector<bool> used(atoms_.size(), false);
        for (std::size_t step = 0; step < atoms_.size(); ++step) {
            std::size_t best = atoms_.size();
            long best_bound = -1;
            std::size_t best_size = 0;
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (used[i]) continue;
                long nbound = 0;
                for (int s : atoms_[i].slots) {
                    if (s >= 0 && bound[static_cast<std::size_t>(s)]) ++nbound;
                }
                const std::size_t size = index_.facts(atoms_[i].symbol).size();
                if (best == atoms_.size() || nbound > best_bound || (nbound == best_bound && size < best_size)) {
                    best = i;
                    best_bound = nbound;
                    best_size = size;
                }
            }
            used[best] = true;
            for (int s : atoms_[best].slots) {
                if (s >= 0) bound[static_cast<std::size_t>(s)] = true;
            }
            ordered.push_back(atoms_[best]);
        }
        atoms_ = std::move(ordered);
    }

    void recurse(std::size_t depth) {
        if (depth == atoms_.size()) {
            fill_unbound(0);
            return;
        }
        const JoinAtom& atom = atoms_[depth];
        for (const GroundAtom* fact : index_.facts(atom.symbol)) {
            std::vector<std::size_t> newly;
            bool ok = true;
            for (std::size_t k = 0; k < atom.slots.size() && ok; ++k) {
                const int s = atom.slots[k];
                const Constant& v = fact->args[k];
                if (s < 0) {
                    ok = atom.fixed[k] == v;
                } else if (bound_[static_cast<std::size_t>(s)]) {
                    ok = values_[static_cast<std::size_t>(s)] == v;
                } else {
                    bound_[static_cast<std::size_t>(s)] = true;
                    values_[static_cast<std::size_t>(s)] = v;
                    newly.push_back(static_cast<std::size_t>(s));
                }
            }
            if (ok) recurse(depth + 1);
            for (std::size_t s : newly) bound_[s] = false;
        }
    }

    void fill_unbound(std::size_t slot) {
        while (slot < values_.size() && bound_[slot]) ++slot;
        if (slot == values_.size()) {
            results_.push_back(values_);
            return;
        }
        for (const auto& c : fallback_) {
            bound_[slot] = true;
            values_[slot] = c;
            fill_unbound(slot + 1);
            bound_[slot] = false;
        }
    }

    const FactIndex& index_;
    std::vector<JoinAtom> atoms_;
    const std::vector<Constant>& fallback_;
    std::vector<Constant> values_;
    std::vector<bool> bound_;
    std::vector<std::vector<Constant>> results_;
};

bool is_positive_static_atom(const Condition& cond) {
    if (!cond.is_equality()) return false;
    const auto& eq = cond.equality();
    if (!eq.lhs.is_flat_application()) return false;
    if (eq.lhs.application().symbol->fluent()) return false;
    return eq.rhs.is_constant() && eq.rhs.constant() == Constant::boolean(true);
}

// Static, non-nested equality whose truth can be decided once bound.
bool is_static_filter(const Condition& cond) {
    if (!cond.is_equality()) return false;
    const auto& eq = cond.equality();
    if (!eq.lhs.is_flat_application() || eq.lhs.application().symbol->fluent()) return false;
    return eq.rhs.is_constant() || eq.rhs.is_param();
}

}  // namespace

std::vector<std::vector<Constant>> join_atoms(const FactIndex& index, const std::vector<std::string>& params,
                                              const std::vector<Term>& atoms,
                                              const std::vector<Constant>& fallback) {
    std::vector<JoinAtom> join;
    for (const auto& t : atoms) {
        const auto& app = t.application();
        JoinAtom ja{app.symbol.get(), {}, {}};
        for (const auto& arg : app.args) {
            if (arg.is_param()) {
                auto it = std::find(params.begin(), params.end(), arg.param_name());
                if (it == params.end()) throw MalformedTermError("unknown parameter " + arg.param_name());
                ja.slots.push_back(static_cast<int>(it - params.begin()));
                ja.fixed.emplace_back();
            } else {
                ja.slots.push_back(-1);
                ja.fixed.push_back(arg.constant());
            }
        }
        join.push_back(std::move(ja));
    }
    return Joiner(index, std::move(join), params.size(), fallback).run();
}

std::vector<InstancePtr> instantiate_actions(const State& state, const std::vector<ActionPtr>& actions) {
    const FactIndex index(state);
    std::vector<Constant> universe;
    bool universe_ready = false;
    std::vector<InstancePtr> out;
    for (const auto& action : actions) {
        std::vector<const Condition*> conds;
        if (action->is_durative()) {
            for (const auto& c : action->durative_spec().start_cond) conds.push_back(&c);
            for (const auto& c : action->durative_spec().end_cond) conds.push_back(&c);
        } else {
            for (const auto& c : action->cond()) conds.push_back(&c);
        }
        std::vector<Term> atoms;
        std::vector<Condition> filters;
        std::set<std::string> covered;
        for (const Condition* c : conds) {
            if (is_positive_static_atom(*c)) {
                atoms.push_back(c->equality().lhs);
                for (const auto& a : c->equality().lhs.application().args) {
                    if (a.is_param()) covered.insert(a.param_name());
                }
            } else if (is_static_filter(*c)) {
                filters.push_back(*c);
            }
        }
        if (covered.size() < action->params().size() && !universe_ready) {
            universe = state.constants();
            universe_ready = true;
        }
        std::set<std::vector<Constant>> seen;
        for (auto& args : join_atoms(index, action->params(), atoms, universe)) {
            if (!seen.insert(args).second) continue;
            const Binding binding = make_binding(action->params(), args);
            bool ok = true;
            for (const auto& f : filters) {
                if (!check_condition(state, substitute(f, binding))) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back(ground_action(action, std::move(args), state));
        }
    }
    return out;
}

std::string StreamInstance::str() const { return stream->name() + "(" + join_constants(inputs) + ")"; }

StreamInstancePtr StreamRegistry::get(const StreamPtr& stream, const std::vector<Constant>& inputs) {
    auto key = std::make_pair(stream.get(), inputs);
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    auto inst = std::make_shared<StreamInstance>();
    inst->stream = stream;
    inst->inputs = inputs;
    table_.emplace(std::move(key), inst);
    order_.push_back(inst);
    return inst;
}

std::vector<StreamInstancePtr> instantiate_streams(const State& state, const std::vector<StreamPtr>& streams,
                                                   StreamRegistry& registry) {
    const FactIndex index(state);
    std::vector<Constant> universe;
    std::vector<StreamInstancePtr> out;
    for (const auto& stream : streams) {
        std::set<std::string> covered;
        for (const auto& atom : stream->input_cond()) {
            for (const auto& a : atom.application().args) {
                if (a.is_param()) covered.insert(a.param_name());
            }
        }
        if (covered.size() < stream->inputs().size() && universe.empty()) universe = state.constants();
        for (const auto& inputs : join_atoms(index, stream->inputs(), stream->input_cond(), universe)) {
            out.push_back(registry.get(stream, inputs));
        }
    }
    return out;
}

}  // namespace tempo
