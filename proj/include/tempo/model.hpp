#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "tempo/constant.hpp"
#include "tempo/errors.hpp"

namespace tempo {

inline constexpr double kNumericTolerance = 1e-9;

class State;
class FunctionSymbol;
class Action;
struct ActionInstance;
class Stream;

using SymbolPtr = std::shared_ptr<const FunctionSymbol>;
using ActionPtr = std::shared_ptr<const Action>;
using InstancePtr = std::shared_ptr<const ActionInstance>;
using StreamPtr = std::shared_ptr<const Stream>;

// ---------------------------------------------------------------------------
// Terms

struct Term;

struct Application {
    SymbolPtr symbol;
    std::vector<Term> args;
};

// A constant, a parameter ("?x"), or a function symbol applied to terms.
struct Term {
    std::variant<Constant, std::string, Application> node;

    Term() = default;
    Term(Constant c) : node(std::move(c)) {}  // NOLINT(google-explicit-constructor)
    Term(Application a) : node(std::move(a)) {}  // NOLINT(google-explicit-constructor)

    static Term param(std::string name);

    bool is_constant() const { return std::holds_alternative<Constant>(node); }
    bool is_param() const { return std::holds_alternative<std::string>(node); }
    bool is_application() const { return std::holds_alternative<Application>(node); }

    const Constant& constant() const { return std::get<Constant>(node); }
    const std::string& param_name() const { return std::get<std::string>(node); }
    const Application& application() const { return std::get<Application>(node); }

    bool is_ground() const;
    // Application whose arguments are constants or parameters (no nesting).
    bool is_flat_application() const;

    std::string str() const;
};

// Converts the usual shorthand into terms: "?x" is a parameter, any other
// string is a symbol constant.
Term to_term(Term t);
Term to_term(Constant c);
Term to_term(const char* s);
Term to_term(const std::string& s);

std::vector<std::string> split_params(std::string_view params);

// ---------------------------------------------------------------------------
// Function symbols

enum class Range : std::uint8_t { Boolean, Object, Numeric };

using HostFunction = std::function<Constant(std::span<const Constant>)>;
using HostTest = std::function<bool(std::span<const Constant>)>;

struct SymbolOptions {
    std::vector<Term> cond;  // domain conditions over the symbol's params (atoms, == True)
    HostFunction fn;         // static value procedure
    HostTest test;           // Boolean procedure (predicates only)
    std::optional<Constant> default_value;
    bool fluent = false;
};

class FunctionSymbol : public std::enable_shared_from_this<FunctionSymbol> {
public:
    static SymbolPtr predicate(std::string name, std::string_view params, SymbolOptions options = {});
    static SymbolPtr function(std::string name, std::string_view params, Range range = Range::Object,
                              SymbolOptions options = {});

    const std::string& name() const { return name_; }
    const std::vector<std::string>& params() const { return params_; }
    std::size_t arity() const { return params_.size(); }
    Range range() const { return range_; }
    bool is_predicate() const { return range_ == Range::Boolean; }
    bool fluent() const { return fluent_; }
    const std::vector<Term>& domain_cond() const { return cond_; }
    const Constant& default_value() const { return default_; }
    bool has_procedure() const { return static_cast<bool>(fn_) || static_cast<bool>(test_); }

    // Calls the host procedure, memoized per argument tuple.
    Constant compute(std::span<const Constant> args) const;

    template <typename... Args>
    Term operator()(Args&&... args) const {
        return apply({to_term(std::forward<Args>(args))...});
    }
    Term apply(std::vector<Term> args) const;

    FunctionSymbol(std::string name, std::vector<std::string> params, Range range, SymbolOptions options);

private:
    std::string name_;
    std::vector<std::string> params_;
    Range range_;
    bool fluent_;
    std::vector<Term> cond_;
    HostFunction fn_;
    HostTest test_;
    Constant default_;

    mutable std::shared_mutex memo_mutex_;
    mutable std::unordered_map<std::vector<Constant>, Constant, ConstantsHash> memo_;
};

// A function symbol applied to constants.
struct GroundAtom {
    const FunctionSymbol* symbol = nullptr;
    std::vector<Constant> args;

    friend bool operator==(const GroundAtom& a, const GroundAtom& b) {
        return a.symbol == b.symbol && a.args == b.args;
    }
    friend std::strong_ordering operator<=>(const GroundAtom& a, const GroundAtom& b);
    std::string str() const;
};

struct GroundAtomHash {
    std::size_t operator()(const GroundAtom& a) const;
};

// ---------------------------------------------------------------------------
// Conditions and effects

struct Equality {
    Term lhs;
    Term rhs;
};

using ProcedureTest = std::function<bool(const State&, std::span<const Constant>)>;
using ProcedureUpdate = std::function<void(const State& pre, State& post, std::span<const Constant>)>;

struct ProcedureCondition {
    std::string name;
    std::vector<Term> args;
    ProcedureTest fn;
};

struct Condition {
    std::variant<Equality, ProcedureCondition> body;

    bool is_equality() const { return std::holds_alternative<Equality>(body); }
    const Equality& equality() const { return std::get<Equality>(body); }
    const ProcedureCondition& procedure() const { return std::get<ProcedureCondition>(body); }
    std::string str() const;
};

Condition equals(Term lhs, Term rhs);
Condition holds(Term atom);  // atom == True
Condition procedure_condition(std::string name, std::vector<Term> args, ProcedureTest fn);

struct Assignment {
    Term target;
    Term value;
};

struct ProcedureEffect {
    std::string name;
    std::vector<Term> args;
    ProcedureUpdate fn;
};

struct Effect {
    std::variant<Assignment, ProcedureEffect> body;

    bool is_assignment() const { return std::holds_alternative<Assignment>(body); }
    const Assignment& assignment() const { return std::get<Assignment>(body); }
    const ProcedureEffect& procedure() const { return std::get<ProcedureEffect>(body); }
    std::string str() const;
};

Effect assign(Term target, Term value);
Effect procedure_effect(std::string name, std::vector<Term> args, ProcedureUpdate fn);

// ---------------------------------------------------------------------------
// States

// Assignments to static symbols. Shared between states and copied on write.
class StaticFacts {
public:
    const Constant* find(const GroundAtom& atom) const;
    void set(GroundAtom atom, Constant value);
    // Insertion-ordered view.
    const std::vector<std::pair<GroundAtom, Constant>>& entries() const { return entries_; }

private:
    std::vector<std::pair<GroundAtom, Constant>> entries_;
    std::unordered_map<GroundAtom, std::size_t, GroundAtomHash> index_;
};

class State {
public:
    using OngoingEntry = std::pair<InstancePtr, double>;

    State();

    // Declared value, if any (no defaults, no procedures).
    std::optional<Constant> lookup(const GroundAtom& atom) const;
    // Assignment; fluent values equal to the symbol default are erased so
    // equal states have equal maps.
    void assign(const GroundAtom& atom, const Constant& value);

    const std::map<GroundAtom, Constant>& fluents() const { return fluents_; }
    const StaticFacts& statics() const { return *statics_; }
    const std::shared_ptr<const StaticFacts>& statics_ptr() const { return statics_; }

    // Durative instances in progress with their remaining duration, ordered by
    // instance serial.
    const std::vector<OngoingEntry>& ongoing() const { return ongoing_; }
    const double* remaining(const ActionInstance& instance) const;
    void set_ongoing(const InstancePtr& instance, double remaining);
    void erase_ongoing(const ActionInstance& instance);
    void elapse(double amount);

    // Every constant mentioned by an assignment (arguments and values).
    std::vector<Constant> constants() const;

    friend bool operator==(const State& a, const State& b);
    std::size_t hash() const;
    std::string str() const;

private:
    std::shared_ptr<const StaticFacts> statics_;
    std::map<GroundAtom, Constant> fluents_;
    std::vector<OngoingEntry> ongoing_;
};

struct StateHash {
    std::size_t operator()(const State& s) const { return s.hash(); }
};

// ---------------------------------------------------------------------------
// Actions

enum class ActionKind : std::uint8_t { Instantaneous, Durative };

// Role of a compiled instantaneous action relative to its source.
enum class StepRole : std::uint8_t { Instant, Start, End, Serial };

struct DurativeSpec {
    std::vector<Condition> start_cond;
    std::vector<Condition> over_cond;
    std::vector<Condition> end_cond;
    std::vector<Effect> start_eff;
    std::vector<Effect> end_eff;
    Term duration = Constant::number(0.0);
};

class DurativeInterner;

class Action {
public:
    static ActionPtr instantaneous(std::string name, std::string_view params, std::vector<Condition> cond,
                                   std::vector<Effect> eff, Term cost = Constant::number(0.0));
    static ActionPtr durative(std::string name, std::string_view params, DurativeSpec spec);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& params() const { return params_; }
    ActionKind kind() const { return kind_; }
    bool is_durative() const { return kind_ == ActionKind::Durative; }

    const std::vector<Condition>& cond() const { return cond_; }
    const std::vector<Effect>& eff() const { return eff_; }
    const Term& cost() const { return cost_; }
    const DurativeSpec& durative_spec() const { return spec_; }

    // Compiled actions remember where they came from.
    StepRole role() const { return role_; }
    const ActionPtr& source() const { return source_; }
    const std::shared_ptr<DurativeInterner>& interner() const { return interner_; }

    // Used by the temporal compiler.
    static ActionPtr compiled(std::string name, std::vector<std::string> params, std::vector<Condition> cond,
                              std::vector<Effect> eff, Term cost, StepRole role, ActionPtr source,
                              std::shared_ptr<DurativeInterner> interner);

    Action() = default;

private:
    std::string name_;
    std::vector<std::string> params_;
    ActionKind kind_ = ActionKind::Instantaneous;
    std::vector<Condition> cond_;
    std::vector<Effect> eff_;
    Term cost_ = Constant::number(0.0);
    DurativeSpec spec_;
    StepRole role_ = StepRole::Instant;
    ActionPtr source_;
    std::shared_ptr<DurativeInterner> interner_;
};

// A ground action. For compiled start/end/serial steps, `source` is the ground
// instance of the original action.
struct ActionInstance {
    ActionPtr action;
    std::vector<Constant> args;
    std::uint64_t serial = 0;

    std::vector<Condition> cond;
    std::vector<Effect> eff;
    Term cost;

    std::vector<Condition> start_cond;
    std::vector<Condition> over_cond;
    std::vector<Condition> end_cond;
    std::vector<Effect> start_eff;
    std::vector<Effect> end_eff;
    Term duration;
    double duration_value = 0.0;

    InstancePtr source;

    StepRole role() const { return action->role(); }
    std::string str() const;
};

// Substitutes `args` for the action's parameters in every condition and effect.
// Duration is evaluated in `context`.
InstancePtr ground_action(const ActionPtr& action, std::vector<Constant> args, const State& context);

// Interns one ground instance per argument tuple of a durative action so the
// ongoing map can use pointer identity.
class DurativeInterner {
public:
    explicit DurativeInterner(ActionPtr action) : action_(std::move(action)) {}
    InstancePtr intern(const std::vector<Constant>& args, const State& context);
    const ActionPtr& action() const { return action_; }

private:
    ActionPtr action_;
    std::mutex mutex_;
    std::unordered_map<std::vector<Constant>, InstancePtr, ConstantsHash> table_;
};

// ---------------------------------------------------------------------------
// Streams

class OutputSequence {
public:
    virtual ~OutputSequence() = default;
    // Next output tuple, or nullopt when this call produced nothing.
    virtual std::optional<std::vector<Constant>> next() = 0;
    virtual bool exhausted() const = 0;
};

using GeneratorFn = std::function<std::unique_ptr<OutputSequence>(std::span<const Constant> inputs,
                                                                   std::uint64_t seed)>;

// Generator built from a per-call function; exhausted after `max_calls` calls
// or the first nullopt.
std::unique_ptr<OutputSequence> make_sequence(std::function<std::optional<std::vector<Constant>>(std::size_t)> fn,
                                              std::size_t max_calls);

class Stream {
public:
    // Inputs are a subset of the certified predicate's params; the remaining
    // params are outputs. Domain conditions are partitioned accordingly.
    static StreamPtr make(std::string name, SymbolPtr certified, std::string_view inputs, GeneratorFn gen);

    const std::string& name() const { return name_; }
    const SymbolPtr& certified() const { return certified_; }
    const std::vector<std::string>& inputs() const { return inputs_; }
    const std::vector<std::string>& outputs() const { return outputs_; }
    const std::vector<Term>& input_cond() const { return input_cond_; }
    // Includes the certified atom itself.
    const std::vector<Term>& output_cond() const { return output_cond_; }
    const GeneratorFn& gen() const { return gen_; }

    // Ground atoms asserted for one output tuple.
    std::vector<GroundAtom> certified_atoms(std::span<const Constant> inputs,
                                            std::span<const Constant> outputs) const;

private:
    std::string name_;
    SymbolPtr certified_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::vector<Term> input_cond_;
    std::vector<Term> output_cond_;
    GeneratorFn gen_;
};

// ---------------------------------------------------------------------------
// Problems and schedules

struct Problem {
    std::string name;
    State initial;
    std::vector<Condition> goal;
    std::vector<ActionPtr> actions;
    std::vector<StreamPtr> streams;
    std::uint64_t seed = 0;
};

enum class EventKind : std::uint8_t { Start, End, Instant };

struct ScheduleEntry {
    double start = 0.0;
    double end = 0.0;
    ActionPtr action;
    std::vector<Constant> args;

    std::string label() const;
};

struct ScheduleEvent {
    std::size_t entry = 0;
    EventKind kind = EventKind::Instant;
};

struct Schedule {
    std::vector<ScheduleEntry> entries;
    std::vector<ScheduleEvent> event_order;

    double makespan() const;
    std::string str() const;
};

// ---------------------------------------------------------------------------
// Semantics

using Binding = std::unordered_map<std::string, Constant>;

Binding make_binding(const std::vector<std::string>& params, std::span<const Constant> args);
Term substitute(const Term& term, const Binding& binding);
Condition substitute(const Condition& cond, const Binding& binding);
Effect substitute(const Effect& eff, const Binding& binding);

// Closed-world evaluation of a ground term.
Constant evaluate_term(const State& state, const Term& term);
bool check_condition(const State& state, const Condition& cond);
bool check_all(const State& state, std::span<const Condition> conds);
// Returns a new state; all values are read from `state`.
State apply_effects(const State& state, std::span<const Effect> effects);

bool constants_match(const Constant& a, const Constant& b);

}  // namespace tempo
