#include "tempo/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>

namespace tempo {

namespace {

std::atomic<std::uint64_t> g_instance_serial{1};

void collect_params(const Term& term, std::set<std::string>& out) {
    if (term.is_param()) {
        out.insert(term.param_name());
    } else if (term.is_application()) {
        for (const auto& a : term.application().args) collect_params(a, out);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Terms

Term Term::param(std::string name) {
    Term t;
    t.node = std::move(name);
    return t;
}

bool Term::is_ground() const {
    if (is_param()) return false;
    if (is_constant()) return true;
    for (const auto& a : application().args) {
        if (!a.is_ground()) return false;
    }
    return true;
}

bool Term::is_flat_application() const {
    if (!is_application()) return false;
    for (const auto& a : application().args) {
        if (a.is_application()) return false;
    }
    return true;
}

std::string Term::str() const {
    if (is_constant()) return constant().str();
    if (is_param()) return param_name();
    const auto& app = application();
    std::string out = app.symbol->name() + "(";
    for (std::size_t i = 0; i < app.args.size(); ++i) {
        if (i) out += ",";
        out += app.args[i].str();
    }
    return out + ")";
}

Term to_term(Term t) { return t; }
Term to_term(Constant c) { return Term(std::move(c)); }
Term to_term(const char* s) { return to_term(std::string(s)); }
Term to_term(const std::string& s) {
    if (!s.empty() && (s.front() == '?' || s.front() == '#')) return Term::param(s);
    return Term(Constant::symbol(s));
}

std::vector<std::string> split_params(std::string_view params) {
    std::vector<std::string> out;
    std::string current;
    for (char c : params) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    for (const auto& p : out) {
        if (p.front() != '?') throw MalformedTermError("parameter names must start with '?': " + p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Function symbols

FunctionSymbol::FunctionSymbol(std::string name, std::vector<std::string> params, Range range,
                               SymbolOptions options)
    : name_(std::move(name)),
      params_(std::move(params)),
      range_(range),
      fluent_(options.fluent),
      cond_(std::move(options.cond)),
      fn_(std::move(options.fn)),
      test_(std::move(options.test)) {
    if (options.default_value) {
        default_ = *options.default_value;
    } else {
        switch (range_) {
            case Range::Boolean: default_ = Constant::boolean(false); break;
            case Range::Numeric: default_ = Constant::number(0.0); break;
            case Range::Object: default_ = Constant::none(); break;
        }
    }
    if (test_ && range_ != Range::Boolean) {
        throw MalformedTermError("only predicates take a test procedure: " + name_);
    }
}

SymbolPtr FunctionSymbol::predicate(std::string name, std::string_view params, SymbolOptions options) {
    return std::make_shared<const FunctionSymbol>(std::move(name), split_params(params), Range::Boolean,
                                                  std::move(options));
}

SymbolPtr FunctionSymbol::function(std::string name, std::string_view params, Range range,
                                   SymbolOptions options) {
    return std::make_shared<const FunctionSymbol>(std::move(name), split_params(params), range,
                                                  std::move(options));
}

Term FunctionSymbol::apply(std::vector<Term> args) const {
    if (args.size() != params_.size()) {
        throw MalformedTermError(name_ + " expects " + std::to_string(params_.size()) + " arguments, got " +
                                 std::to_string(args.size()));
    }
    return Term(Application{shared_from_this(), std::move(args)});
}

Constant FunctionSymbol::compute(std::span<const Constant> args) const {
    std::vector<Constant> key(args.begin(), args.end());
    {
        std::shared_lock lock(memo_mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    Constant value;
    if (test_) {
        value = Constant::boolean(test_(args));
    } else if (fn_) {
        value = fn_(args);
    } else {
        value = default_;
    }
    std::unique_lock lock(memo_mutex_);
    memo_.emplace(std::move(key), value);
    return value;
}

std::strong_ordering operator<=>(const GroundAtom& a, const GroundAtom& b) {
    if (a.symbol != b.symbol) {
        if (auto c = a.symbol->name().compare(b.symbol->name()); c != 0) return c <=> 0;
        return std::less<const FunctionSymbol*>{}(a.symbol, b.symbol) ? std::strong_ordering::less
                                                                       : std::strong_ordering::greater;
    }
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

std::string GroundAtom::str() const { return symbol->name() + "(" + join_constants(args) + ")"; }

std::size_t GroundAtomHash::operator()(const GroundAtom& a) const {
    return hash_combine(std::hash<const void*>{}(a.symbol), ConstantsHash{}(a.args));
}

// ---------------------------------------------------------------------------
// Conditions and effects

std::string Condition::str() const {
    if (is_equality()) return equality().lhs.str() + "==" + equality().rhs.str();
    std::string out = procedure().name + "(";
    for (std::size_t i = 0; i < procedure().args.size(); ++i) {
        if (i) out += ",";
        out += procedure().args[i].str();
    }
    return out + ")";
}

Condition equals(Term lhs, Term rhs) { return Condition{Equality{std::move(lhs), std::move(rhs)}}; }
Condition holds(Term atom) { return equals(std::move(atom), Constant::boolean(true)); }
Condition procedure_condition(std::string name, std::vector<Term> args, ProcedureTest fn) {
    return Condition{ProcedureCondition{std::move(name), std::move(args), std::move(fn)}};
}

std::string Effect::str() const {
    if (is_assignment()) return assignment().target.str() + "<=" + assignment().value.str();
    std::string out = procedure().name + "(";
    for (std::size_t i = 0; i < procedure().args.size(); ++i) {
        if (i) out += ",";
        out += procedure().args[i].str();
    }
    return out + ")";
}

Effect assign(Term target, Term value) {
    if (!target.is_application()) throw MalformedTermError("assignment target must be a function term");
    return Effect{Assignment{std::move(target), std::move(value)}};
}

Effect procedure_effect(std::string name, std::vector<Term> args, ProcedureUpdate fn) {
    return Effect{ProcedureEffect{std::move(name), std::move(args), std::move(fn)}};
}

// ---------------------------------------------------------------------------
// States

const Constant* StaticFacts::find(const GroundAtom& atom) const {
    auto it = index_.find(atom);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
}

void StaticFacts::set(GroundAtom atom, Constant value) {
    auto it = index_.find(atom);
    if (it != index_.end()) {
        entries_[it->second].second = std::move(value);
        return;
    }
    index_.emplace(atom, entries_.size());
    entries_.emplace_back(std::move(atom), std::move(value));
}

State::State() : statics_(std::make_shared<const StaticFacts>()) {}

std::optional<Constant> State::lookup(const GroundAtom& atom) const {
    if (atom.symbol->fluent()) {
        auto it = fluents_.find(atom);
        if (it == fluents_.end()) return std::nullopt;
        return it->second;
    }
    if (const Constant* c = statics_->find(atom)) return *c;
    return std::nullopt;
}

void State::assign(const GroundAtom& atom, const Constant& value) {
    if (atom.symbol->fluent()) {
        if (value == atom.symbol->default_value()) {
            fluents_.erase(atom);
        } else {
            fluents_.insert_or_assign(atom, value);
        }
        return;
    }
    if (const Constant* existing = statics_->find(atom); existing && *existing == value) return;
    auto copy = std::make_shared<StaticFacts>(*statics_);
    copy->set(atom, value);
    statics_ = std::move(copy);
}

const double* State::remaining(const ActionInstance& instance) const {
    for (const auto& [inst, rem] : ongoing_) {
        if (inst.get() == &instance) return &rem;
    }
    return nullptr;
}

void State::set_ongoing(const InstancePtr& instance, double remaining) {
    auto it = std::lower_bound(ongoing_.begin(), ongoing_.end(), instance->serial,
                               [](const OngoingEntry& e, std::uint64_t serial) { return e.first->serial < serial; });
    if (it != ongoing_.end() && it->first == instance) {
        it->second = remaining;
    } else {
        ongoing_.insert(it, {instance, remaining});
    }
}

void State::erase_ongoing(const ActionInstance& instance) {
    std::erase_if(ongoing_, [&](const OngoingEntry& e) { return e.first.get() == &instance; });
}

void State::elapse(double amount) {
    for (auto& entry : ongoing_) entry.second -= amount;
}

std::vector<Constant> State::constants() const {
    std::set<Constant> seen;
    std::vector<Constant> out;
    auto add = [&](const Constant& c) {
        if (seen.insert(c).second) out.push_back(c);
    };
    for (const auto& [atom, value] : statics_->entries()) {
        for (const auto& a : atom.args) add(a);
        add(value);
    }
    for (const auto& [atom, value] : fluents_) {
        for (const auto& a : atom.args) add(a);
        add(value);
    }
    return out;
}

bool operator==(const State& a, const State& b) {
    if (a.fluents_ != b.fluents_) return false;
    if (a.ongoing_.size() != b.ongoing_.size()) return false;
    for (std::size_t i = 0; i < a.ongoing_.size(); ++i) {
        if (a.ongoing_[i].first != b.ongoing_[i].first) return false;
        if (a.ongoing_[i].second != b.ongoing_[i].second) return false;
    }
    if (a.statics_ == b.statics_) return true;
    return a.statics_->entries() == b.statics_->entries();
}

std::size_t State::hash() const {
    std::size_t h = fluents_.size();
    GroundAtomHash atom_hash;
    for (const auto& [atom, value] : fluents_) {
        h = hash_combine(h, atom_hash(atom));
        h = hash_combine(h, value.hash());
    }
    for (const auto& [inst, rem] : ongoing_) {
        h = hash_combine(h, std::hash<std::uint64_t>{}(inst->serial));
        h = hash_combine(h, std::hash<double>{}(rem));
    }
    return h;
}

std::string State::str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [atom, value] : fluents_) {
        os << (first ? "" : ", ") << atom.str() << "=" << value.str();
        first = false;
    }
    for (const auto& [inst, rem] : ongoing_) {
        os << (first ? "" : ", ") << "Remaining(" << inst->str() << ")=" << rem;
        first = false;
    }
    os << "}";
    return os.str();
}

// ---------------------------------------------------------------------------
// Actions

ActionPtr Action::instantaneous(std::string name, std::string_view params, std::vector<Condition> cond,
                                std::vector<Effect> eff, Term cost) {
    auto a = std::make_shared<Action>();
    a->name_ = std::move(name);
    a->params_ = split_params(params);
    a->kind_ = ActionKind::Instantaneous;
    a->cond_ = std::move(cond);
    a->eff_ = std::move(eff);
    a->cost_ = std::move(cost);
    return a;
}

ActionPtr Action::durative(std::string name, std::string_view params, DurativeSpec spec) {
    auto a = std::make_shared<Action>();
    a->name_ = std::move(name);
    a->params_ = split_params(params);
    a->kind_ = ActionKind::Durative;
    a->spec_ = std::move(spec);
    return a;
}

ActionPtr Action::compiled(std::string name, std::vector<std::string> params, std::vector<Condition> cond,
                           std::vector<Effect> eff, Term cost, StepRole role, ActionPtr source,
                           std::shared_ptr<DurativeInterner> interner) {
    auto a = std::make_shared<Action>();
    a->name_ = std::move(name);
    a->params_ = std::move(params);
    a->kind_ = ActionKind::Instantaneous;
    a->cond_ = std::move(cond);
    a->eff_ = std::move(eff);
    a->cost_ = std::move(cost);
    a->role_ = role;
    a->source_ = std::move(source);
    a->interner_ = std::move(interner);
    return a;
}

std::string ActionInstance::str() const { return action->name() + "(" + join_constants(args) + ")"; }

namespace {

template <typename T>
std::vector<T> substitute_all(const std::vector<T>& items, const Binding& binding) {
    std::vector<T> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(substitute(item, binding));
    return out;
}

}  // namespace

InstancePtr ground_action(const ActionPtr& action, std::vector<Constant> args, const State& context) {
    if (args.size() != action->params().size()) {
        throw MalformedTermError("wrong number of arguments for " + action->name());
    }
    auto inst = std::make_shared<ActionInstance>();
    inst->action = action;
    inst->serial = g_instance_serial.fetch_add(1, std::memory_order_relaxed);
    const Binding binding = make_binding(action->params(), args);
    inst->args = std::move(args);
    if (action->is_durative()) {
        const auto& spec = action->durative_spec();
        inst->start_cond = substitute_all(spec.start_cond, binding);
        inst->over_cond = substitute_all(spec.over_cond, binding);
        inst->end_cond = substitute_all(spec.end_cond, binding);
        inst->start_eff = substitute_all(spec.start_eff, binding);
        inst->end_eff = substitute_all(spec.end_eff, binding);
        inst->duration = substitute(spec.duration, binding);
        const Constant d = evaluate_term(context, inst->duration);
        inst->duration_value = d.kind() == ConstantKind::Number ? d.as_number() : 0.0;
        if (!std::isfinite(inst->duration_value) || inst->duration_value < 0.0) {
            throw IllFormedActionError("duration of " + inst->str() + " must be finite and non-negative");
        }
    } else {
        inst->cond = substitute_all(action->cond(), binding);
        inst->eff = substitute_all(action->eff(), binding);
        inst->cost = substitute(action->cost(), binding);
        if (action->interner() && action->role() != StepRole::Instant) {
            std::vector<Constant> source_args(inst->args.begin(), inst->args.end());
            inst->source = action->interner()->intern(source_args, context);
            inst->duration_value = inst->source->duration_value;
        }
    }
    return inst;
}

InstancePtr DurativeInterner::intern(const std::vector<Constant>& args, const State& context) {
    std::lock_guard lock(mutex_);
    auto it = table_.find(args);
    if (it != table_.end()) return it->second;
    auto inst = ground_action(action_, args, context);
    table_.emplace(args, inst);
    return inst;
}

// ---------------------------------------------------------------------------
// Streams

namespace {

class FunctionSequence final : public OutputSequence {
public:
    FunctionSequence(std::function<std::optional<std::vector<Constant>>(std::size_t)> fn, std::size_t max_calls)
        : fn_(std::move(fn)), max_calls_(max_calls) {}

    std::optional<std::vector<Constant>> next() override {
        if (exhausted_) return std::nullopt;
        if (calls_ >= max_calls_) {
            exhausted_ = true;
            return std::nullopt;
        }
        auto out = fn_(calls_++);
        if (!out) exhausted_ = true;
        if (calls_ >= max_calls_) exhausted_ = true;
        return out;
    }

    bool exhausted() const override { return exhausted_; }

private:
    std::function<std::optional<std::vector<Constant>>(std::size_t)> fn_;
    std::size_t max_calls_;
    std::size_t calls_ = 0;
    bool exhausted_ = false;
};

}  // namespace

std::unique_ptr<OutputSequence> make_sequence(std::function<std::optional<std::vector<Constant>>(std::size_t)> fn,
                                              std::size_t max_calls) {
    return std::make_unique<FunctionSequence>(std::move(fn), max_calls);
}

StreamPtr Stream::make(std::string name, SymbolPtr certified, std::string_view inputs, GeneratorFn gen) {
    auto s = std::make_shared<Stream>();
    s->name_ = std::move(name);
    s->inputs_ = split_params(inputs);
    for (const auto& in : s->inputs_) {
        if (std::find(certified->params().begin(), certified->params().end(), in) == certified->params().end()) {
            throw MalformedTermError("stream input " + in + " is not a parameter of " + certified->name());
        }
    }
    for (const auto& p : certified->params()) {
        if (std::find(s->inputs_.begin(), s->inputs_.end(), p) == s->inputs_.end()) s->outputs_.push_back(p);
    }
    for (const auto& atom : certified->domain_cond()) {
        std::set<std::string> used;
        collect_params(atom, used);
        const bool only_inputs = std::all_of(used.begin(), used.end(), [&](const std::string& p) {
            return std::find(s->inputs_.begin(), s->inputs_.end(), p) != s->inputs_.end();
        });
        (only_inputs ? s->input_cond_ : s->output_cond_).push_back(atom);
    }
    std::vector<Term> params;
    for (const auto& p : certified->params()) params.push_back(Term::param(p));
    s->output_cond_.push_back(certified->apply(std::move(params)));
    s->certified_ = std::move(certified);
    s->gen_ = std::move(gen);
    return s;
}

std::vector<GroundAtom> Stream::certified_atoms(std::span<const Constant> inputs,
                                                std::span<const Constant> outputs) const {
    Binding binding = make_binding(inputs_, inputs);
    for (std::size_t i = 0; i < outputs_.size() && i < outputs.size(); ++i) binding[outputs_[i]] = outputs[i];
    std::vector<GroundAtom> atoms;
    for (const auto& atom : output_cond_) {
        const Term ground = substitute(atom, binding);
        GroundAtom g{ground.application().symbol.get(), {}};
        for (const auto& a : ground.application().args) g.args.push_back(a.constant());
        atoms.push_back(std::move(g));
    }
    return atoms;
}

// ---------------------------------------------------------------------------
// Schedules

std::string ScheduleEntry::label() const { return action->name() + "(" + join_constants(args) + ")"; }

double Schedule::makespan() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.end);
    return m;
}

std::string Schedule::str() const {
    std::ostringstream os;
    for (const auto& e : entries) os << "[" << e.start << ", " << e.label() << ", " << e.end << "]\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Semantics

Binding make_binding(const std::vector<std::string>& params, std::span<const Constant> args) {
    Binding b;
    for (std::size_t i = 0; i < params.size() && i < args.size(); ++i) b.emplace(params[i], args[i]);
    return b;
}

Term substitute(const Term& term, const Binding& binding) {
    if (term.is_constant()) return term;
    if (term.is_param()) {
        auto it = binding.find(term.param_name());
        return it == binding.end() ? term : Term(it->second);
    }
    const auto& app = term.application();
    Application out{app.symbol, {}};
    out.args.reserve(app.args.size());
    for (const auto& a : app.args) out.args.push_back(substitute(a, binding));
    return Term(std::move(out));
}

Condition substitute(const Condition& cond, const Binding& binding) {
    if (cond.is_equality()) {
        return equals(substitute(cond.equality().lhs, binding), substitute(cond.equality().rhs, binding));
    }
    const auto& p = cond.procedure();
    std::vector<Term> args;
    for (const auto& a : p.args) args.push_back(substitute(a, binding));
    return procedure_condition(p.name, std::move(args), p.fn);
}

Effect substitute(const Effect& eff, const Binding& binding) {
    if (eff.is_assignment()) {
        return assign(substitute(eff.assignment().target, binding), substitute(eff.assignment().value, binding));
    }
    const auto& p = eff.procedure();
    std::vector<Term> args;
    for (const auto& a : p.args) args.push_back(substitute(a, binding));
    return procedure_effect(p.name, std::move(args), p.fn);
}

namespace {

GroundAtom ground_atom(const State& state, const Application& app) {
    if (app.args.size() != app.symbol->arity()) {
        throw MalformedTermError("arity mismatch for " + app.symbol->name());
    }
    GroundAtom atom{app.symbol.get(), {}};
    atom.args.reserve(app.args.size());
    for (const auto& a : app.args) atom.args.push_back(evaluate_term(state, a));
    return atom;
}

}  // namespace

Constant evaluate_term(const State& state, const Term& term) {
    if (term.is_constant()) return term.constant();
    if (term.is_param()) throw MalformedTermError("cannot evaluate free parameter " + term.param_name());
    const auto& app = term.application();
    const GroundAtom atom = ground_atom(state, app);
    if (auto declared = state.lookup(atom)) return *declared;
    const FunctionSymbol& symbol = *app.symbol;
    if (symbol.has_procedure()) {
        if (any_lazy(atom.args)) return symbol.default_value();
        return symbol.compute(atom.args);
    }
    return symbol.default_value();
}

bool constants_match(const Constant& a, const Constant& b) {
    if (a.kind() == ConstantKind::Number && b.kind() == ConstantKind::Number) {
        return std::abs(a.as_number() - b.as_number()) <= kNumericTolerance;
    }
    return a == b;
}

bool check_condition(const State& state, const Condition& cond) {
    if (cond.is_equality()) {
        return constants_match(evaluate_term(state, cond.equality().lhs), evaluate_term(state, cond.equality().rhs));
    }
    const auto& p = cond.procedure();
    std::vector<Constant> args;
    args.reserve(p.args.size());
    for (const auto& a : p.args) args.push_back(evaluate_term(state, a));
    return p.fn(state, args);
}

bool check_all(const State& state, std::span<const Condition> conds) {
    for (const auto& c : conds) {
        if (!check_condition(state, c)) return false;
    }
    return true;
}

State apply_effects(const State& state, std::span<const Effect> effects) {
    std::vector<std::pair<GroundAtom, Constant>> writes;
    for (const auto& eff : effects) {
        if (!eff.is_assignment()) continue;
        const auto& a = eff.assignment();
        GroundAtom target = ground_atom(state, a.target.application());
        Constant value = evaluate_term(state, a.value);
        for (const auto& [other, other_value] : writes) {
            if (other == target && !(other_value == value)) {
                throw IllFormedActionError("conflicting assignments to " + target.str());
            }
        }
        writes.emplace_back(std::move(target), std::move(value));
    }
    State next = state;
    for (const auto& eff : effects) {
        if (eff.is_assignment()) continue;
        const auto& p = eff.procedure();
        std::vector<Constant> args;
        for (const auto& a : p.args) args.push_back(evaluate_term(state, a));
        p.fn(state, next, args);
    }
    for (const auto& [atom, value] : writes) next.assign(atom, value);
    return next;
}

}  // namespace tempo
