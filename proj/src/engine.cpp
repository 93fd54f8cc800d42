#include "tempo/engine.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "tempo/grounding.hpp"

namespace tempo {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : text) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

// Value-based rendering so seeds do not depend on allocation order.
std::string seed_text(const Constant& c) {
    std::ostringstream os;
    os.precision(9);
    switch (c.kind()) {
        case ConstantKind::Vector:
            os << c.tag() << "[";
            for (double v : c.values()) os << v << ",";
            os << "]";
            break;
        case ConstantKind::Path:
            os << c.tag() << "<" << c.waypoints().size();
            if (!c.waypoints().empty()) {
                for (double v : c.waypoints().front()) os << "," << v;
                for (double v : c.waypoints().back()) os << "," << v;
            }
            os << ">";
            break;
        default:
            os << c.str();
    }
    return os.str();
}

Constant bound_value(const Constant& c, const std::map<Constant, Constant>& binding) {
    auto it = binding.find(c);
    return it == binding.end() ? c : it->second;
}

std::vector<Constant> bound_values(const std::vector<Constant>& cs, const std::map<Constant, Constant>& binding) {
    std::vector<Constant> out;
    out.reserve(cs.size());
    for (const auto& c : cs) out.push_back(bound_value(c, binding));
    return out;
}

std::set<Constant> constant_set(const State& state) {
    auto cs = state.constants();
    return {cs.begin(), cs.end()};
}

State with_certified(const State& initial, const StreamPlan& plan) {
    State state = initial;
    const Constant yes = Constant::boolean(true);
    for (const auto& out : plan) {
        for (const auto& atom : out.certified()) state.assign(atom, yes);
    }
    return state;
}

bool schedule_has_lazy(const Schedule& schedule) {
    return std::any_of(schedule.entries.begin(), schedule.entries.end(),
                       [](const ScheduleEntry& e) { return any_lazy(e.args); });
}

Clock::time_point earlier(Clock::time_point a, const std::optional<Clock::time_point>& b) {
    return b ? std::min(a, *b) : a;
}

}  // namespace

std::string StreamOutput::str() const {
    return stream->name() + "(" + join_constants(inputs) + ")->(" + join_constants(outputs) + ")";
}

std::uint64_t stream_seed(std::uint64_t seed, const Stream& stream, std::span<const Constant> inputs) {
    std::uint64_t h = fnv1a(std::to_string(seed));
    h = fnv1a("|" + stream.name(), h);
    for (const auto& c : inputs) h = fnv1a("|" + seed_text(c), h);
    return h;
}

// ---------------------------------------------------------------------------
// Generator pool

GeneratorPool::Cursor& GeneratorPool::cursor(const StreamPtr& stream, const std::vector<Constant>& inputs) {
    auto key = StreamKey{stream.get(), inputs};
    auto it = cursors_.find(key);
    if (it != cursors_.end()) return it->second;
    Cursor c;
    try {
        c.sequence = stream->gen()(inputs, stream_seed(seed_, *stream, inputs));
    } catch (const std::exception& ex) {
        errors_.push_back(stream->name() + ": " + ex.what());
    }
    if (!c.sequence) c.done = true;
    return cursors_.emplace(std::move(key), std::move(c)).first->second;
}

bool GeneratorPool::pull(const StreamPtr& stream, Cursor& c) {
    if (c.done) return false;
    std::optional<std::vector<Constant>> out;
    try {
        out = c.sequence->next();
    } catch (const std::exception& ex) {
        errors_.push_back(stream->name() + ": " + ex.what());
        c.done = true;
        return false;
    }
    if (!out) {
        c.done = c.sequence->exhausted();
        return false;
    }
    if (out->size() != stream->outputs().size()) {
        errors_.push_back(stream->name() + ": wrong number of outputs");
        c.done = true;
        return false;
    }
    c.outputs.push_back(std::move(*out));
    return true;
}

std::optional<std::vector<Constant>> GeneratorPool::output(const StreamPtr& stream,
                                                           const std::vector<Constant>& inputs, std::size_t k) {
    Cursor& c = cursor(stream, inputs);
    while (c.outputs.size() <= k) {
        if (!pull(stream, c)) return std::nullopt;
    }
    return c.outputs[k];
}

std::optional<std::vector<Constant>> GeneratorPool::draw(const StreamPtr& stream,
                                                         const std::vector<Constant>& inputs) {
    Cursor& c = cursor(stream, inputs);
    if (!pull(stream, c)) return std::nullopt;
    return c.outputs.back();
}

std::size_t GeneratorPool::draws(const StreamPtr& stream, const std::vector<Constant>& inputs) const {
    auto it = cursors_.find(StreamKey{stream.get(), inputs});
    return it == cursors_.end() ? 0 : it->second.outputs.size();
}

OutputPolicy real_outputs(GeneratorPool& pool) {
    return [&pool](const StreamPtr& stream, const std::vector<Constant>& inputs, std::size_t call) {
        std::vector<std::vector<Constant>> batch;
        if (auto y = pool.output(stream, inputs, call)) batch.push_back(std::move(*y));
        return batch;
    };
}

Constant PlaceholderNames::make(const std::string& param, const std::string& origin) {
    std::string base = param;
    if (!base.empty() && (base.front() == '?' || base.front() == '#')) base.erase(0, 1);
    return Constant::lazy("@" + base + std::to_string(++counters_[base]), origin);
}

bool GeneratorPool::exhausted(const StreamPtr& stream, const std::vector<Constant>& inputs) const {
    auto it = cursors_.find(StreamKey{stream.get(), inputs});
    return it != cursors_.end() && it->second.done;
}

OutputPolicy lazy_generator(GeneratorPool& pool, PlaceholderNames& names) {
    return [&pool, &names](const StreamPtr& stream, const std::vector<Constant>& inputs, std::size_t call) {
        std::vector<std::vector<Constant>> batch;
        if (call > 0) return batch;
        if (!any_lazy(inputs)) {
            for (std::size_t k = 0, n = pool.draws(stream, inputs); k < n; ++k) {
                batch.push_back(*pool.output(stream, inputs, k));
            }
            if (!batch.empty() || pool.exhausted(stream, inputs)) return batch;
        }
        const std::string origin = stream->name() + "(" + join_constants(inputs) + ")";
        std::vector<Constant> out;
        for (const auto& p : stream->outputs()) out.push_back(names.make(p, origin));
        batch.push_back(std::move(out));
        return batch;
    };
}

// ---------------------------------------------------------------------------
// Eager stream scheduling

EagerOutcome eager_stream(const Problem& problem, const OutputPolicy& policy, const ScheduleOptions& options,
                          Clock::time_point deadline, bool settle_real) {
    EagerOutcome out;
    State state = problem.initial;
    StreamRegistry registry;
    std::set<std::pair<const StreamInstance*, std::vector<Constant>>> recorded;
    const Constant yes = Constant::boolean(true);
    // While streams can still add facts, a search that fails on a large
    // space is cut short; the full limit applies once the facts are fixed.
    bool capped = settle_real;
    while (true) {
        if (Clock::now() >= deadline) {
            out.timed_out = true;
            return out;
        }
        ScheduleOptions opts = options;
        opts.search.deadline = earlier(deadline, options.search.deadline);
        if (capped) opts.search.max_expansions = std::max<std::size_t>(1, options.search.max_expansions / 10);
        ScheduleOutcome attempt = schedule(state, problem.goal, problem.actions, opts);
        if (attempt.schedule) {
            out.solved = true;
            out.schedule = std::move(*attempt.schedule);
            out.augmented = std::move(state);
            return out;
        }
        if (attempt.status == SearchStatus::ResourceLimit && Clock::now() >= deadline) {
            out.timed_out = true;
            return out;
        }
        ++out.rounds;
        bool progress = false;
        bool live = false;
        std::set<const StreamInstance*> called;
        std::vector<StreamOutput> deferred;
        auto record = [&](StreamOutput y) {
            for (const auto& atom : y.certified()) state.assign(atom, yes);
            out.stream_plan.push_back(std::move(y));
        };
        for (bool again = true; again && Clock::now() < deadline;) {
            again = false;
            for (const auto& inst : instantiate_streams(state, problem.streams, registry)) {
                if (inst->exhausted || !called.insert(inst.get()).second) continue;
                auto batch = policy(inst->stream, inst->inputs, static_cast<std::size_t>(inst->call_count++));
                if (batch.empty()) {
                    inst->exhausted = true;
                    continue;
                }
                live = true;
                for (auto& y : batch) {
                    if (!recorded.emplace(inst.get(), y).second) continue;
                    progress = true;
                    StreamOutput output{inst->stream, inst->inputs, std::move(y)};
                    if (settle_real && !any_lazy(output.outputs)) {
                        record(std::move(output));
                        again = true;
                    } else {
                        deferred.push_back(std::move(output));
                    }
                }
                if (Clock::now() >= deadline) break;
            }
        }
        for (auto& y : deferred) record(std::move(y));
        if (!progress && !live) {
            if (!capped || attempt.status != SearchStatus::ResourceLimit) return out;
            capped = false;
        }
    }
}

// ---------------------------------------------------------------------------
// Preimage, retrace, skeleton binding

std::vector<Condition> preimage(const Schedule& schedule, const std::vector<Condition>& goal,
                                const std::vector<StreamPtr>& streams, const State* initial) {
    std::set<const FunctionSymbol*> certified;
    for (const auto& s : streams) {
        for (const auto& atom : s->output_cond()) certified.insert(atom.application().symbol.get());
    }
    std::set<Constant> known;
    if (initial) known = constant_set(*initial);
    auto relevant = [&](const Constant& c) { return c.is_lazy() || (initial && !known.count(c)); };

    std::vector<Condition> out;
    std::set<std::string> seen;
    std::function<void(const Condition&)> consider = [&](const Condition& cond) {
        if (!cond.is_equality()) return;
        const Term& lhs = cond.equality().lhs;
        if (!lhs.is_flat_application() || !lhs.is_ground()) return;
        const auto& app = lhs.application();
        if (!certified.count(app.symbol.get())) return;
        const bool mentions = std::any_of(app.args.begin(), app.args.end(),
                                          [&](const Term& t) { return relevant(t.constant()); });
        if (!mentions || !seen.insert(cond.str()).second) return;
        out.push_back(cond);
        // A certified atom also needs its domain conditions.
        std::vector<Constant> args;
        for (const auto& t : app.args) args.push_back(t.constant());
        const Binding binding = make_binding(app.symbol->params(), args);
        for (const auto& d : app.symbol->domain_cond()) consider(holds(substitute(d, binding)));
    };
    const State empty;
    const State& context = initial ? *initial : empty;
    for (const auto& entry : schedule.entries) {
        const InstancePtr inst = ground_action(entry.action, entry.args, context);
        for (const auto* list : {&inst->cond, &inst->start_cond, &inst->over_cond, &inst->end_cond}) {
            for (const auto& c : *list) consider(c);
        }
    }
    for (const auto& c : goal) {
        if (c.is_equality() && c.equality().lhs.is_ground()) consider(c);
    }
    return out;
}

StreamPlan retrace_streams(const State& initial, const StreamPlan& all, const std::vector<Condition>& targets) {
    const std::set<Constant> known = constant_set(initial);
    std::set<Constant> needed;
    for (const auto& cond : targets) {
        if (!cond.is_equality() || !cond.equality().lhs.is_application()) continue;
        for (const auto& arg : cond.equality().lhs.application().args) {
            if (arg.is_constant() && !known.count(arg.constant())) needed.insert(arg.constant());
        }
    }
    std::vector<bool> take(all.size(), false);
    std::set<Constant> produced;
    for (std::size_t i = all.size(); i-- > 0;) {
        const auto& el = all[i];
        const bool wanted = std::any_of(el.outputs.begin(), el.outputs.end(),
                                        [&](const Constant& c) { return needed.count(c) && !produced.count(c); });
        if (!wanted) continue;
        take[i] = true;
        for (const auto& c : el.outputs) produced.insert(c);
        for (const auto& c : el.inputs) {
            if (!known.count(c)) needed.insert(c);
        }
    }
    for (const auto& c : needed) {
        if (!produced.count(c)) throw InconsistencyError("no stream output produces " + c.str());
    }
    StreamPlan out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (take[i]) out.push_back(all[i]);
    }
    return out;
}

std::string skeleton_signature(const SkeletonPair& pair) {
    std::map<Constant, int> lazy_ids;
    auto render = [&](const Constant& c) -> std::string {
        if (c.is_lazy()) {
            auto it = lazy_ids.try_emplace(c, static_cast<int>(lazy_ids.size())).first;
            return "@" + std::to_string(it->second);
        }
        if (c.is_identity()) return "#" + std::to_string(c.serial());
        return c.str();
    };
    std::ostringstream os;
    for (const auto& ev : pair.skeleton.event_order) {
        const auto& e = pair.skeleton.entries[ev.entry];
        os << static_cast<int>(ev.kind) << e.action->name() << "(";
        for (const auto& a : e.args) os << render(a) << ",";
        os << ")";
    }
    os << "|";
    for (const auto& el : pair.stream_plan) {
        os << el.stream->name() << "(";
        for (const auto& a : el.inputs) os << render(a) << ",";
        os << ")(";
        for (const auto& a : el.outputs) os << render(a) << ",";
        os << ")";
    }
    return os.str();
}

namespace {

// Compiled steps for one source action, shared so identical entries map to
// the same durative instance.
class StepCompiler {
public:
    explicit StepCompiler(Compilation compilation) : compilation_(compilation) {}

    const std::vector<ActionPtr>& steps(const ActionPtr& action) {
        auto it = cache_.find(action.get());
        if (it != cache_.end()) return it->second;
        std::vector<ActionPtr> out;
        if (compilation_ == Compilation::Serial) {
            out.push_back(sequentialize(action));
        } else {
            auto pair = compile_durative(action);
            out.push_back(pair.start);
            if (pair.end) out.push_back(pair.end);
        }
        return cache_.emplace(action.get(), std::move(out)).first->second;
    }

private:
    Compilation compilation_;
    std::map<const Action*, std::vector<ActionPtr>> cache_;
};

std::optional<Schedule> reorder(const State& state, const std::vector<Condition>& goal, const Schedule& bound,
                                const EngineOptions& options, Clock::time_point deadline) {
    StepCompiler compiler(options.schedule.compilation);
    std::map<std::pair<const Action*, std::vector<Constant>>, std::size_t> index;
    std::vector<InstancePtr> steps;
    std::vector<int> limits;
    // Per entry, indices of its compiled steps in `steps`.
    std::vector<std::vector<std::size_t>> entry_steps;
    for (const auto& entry : bound.entries) {
        std::vector<std::size_t> mine;
        for (const auto& step : compiler.steps(entry.action)) {
            auto key = std::make_pair(step.get(), entry.args);
            auto it = index.find(key);
            if (it == index.end()) {
                it = index.emplace(key, steps.size()).first;
                steps.push_back(ground_action(step, entry.args, state));
                limits.push_back(0);
            }
            ++limits[it->second];
            mine.push_back(it->second);
        }
        entry_steps.push_back(std::move(mine));
    }
    const auto full_goal = temporal_goal(goal);
    SearchOptions search_options = options.schedule.search;
    search_options.weight = 1.0;
    search_options.deadline = earlier(deadline, search_options.deadline);
    if (steps.size() <= options.blind_reorder_limit) search_options.mode = SearchMode::Blind;
    try {
        SearchResult result = search(state, full_goal, steps, search_options, &limits);
        if (result.solved()) return extract_schedule(*result.plan);
    } catch (const std::exception&) {
    }

    // Fall back to the skeleton's own event order.
    Plan plan;
    for (const auto& ev : bound.event_order) {
        const auto& mine = entry_steps[ev.entry];
        if (ev.kind == EventKind::End) {
            if (mine.size() > 1) plan.steps.push_back(steps[mine[1]]);
        } else {
            plan.steps.push_back(steps[mine[0]]);
        }
    }
    if (!replay_plan(state, full_goal, plan)) return std::nullopt;
    return extract_schedule(plan);
}

BindOutcome bind_impl(const Problem& problem, const SkeletonPair& pair, GeneratorPool& pool,
                      const EngineOptions& options, Clock::time_point deadline) {
    BindOutcome out;
    std::map<Constant, Constant> binding;
    bool fresh = false;
    for (const auto& el : pair.stream_plan) {
        StreamOutput bound{el.stream, bound_values(el.inputs, binding), el.outputs};
        if (any_lazy(bound.inputs)) throw InconsistencyError("unbound input in " + el.str());
        if (any_lazy(el.outputs)) {
            auto y = pool.draw(el.stream, bound.inputs);
            if (y) {
                fresh = true;
            } else if (const std::size_t n = pool.draws(el.stream, bound.inputs); n > 0) {
                y = pool.output(el.stream, bound.inputs, n - 1);
            } else {
                out.failure = fresh ? BindFailure::Exhausted : BindFailure::Stuck;
                out.reason = el.stream->name() + "(" + join_constants(bound.inputs) + ") is exhausted";
                return out;
            }
            for (std::size_t i = 0; i < el.outputs.size(); ++i) {
                if (el.outputs[i].is_lazy()) binding[el.outputs[i]] = (*y)[i];
            }
            bound.outputs = std::move(*y);
        }
        out.stream_plan.push_back(std::move(bound));
    }
    Schedule bound_schedule = pair.skeleton;
    for (auto& entry : bound_schedule.entries) {
        entry.args = bound_values(entry.args, binding);
        if (any_lazy(entry.args)) throw InconsistencyError("unbound placeholder in " + entry.label());
    }
    const State state = with_certified(problem.initial, out.stream_plan);
    auto ordered = reorder(state, problem.goal, bound_schedule, options, deadline);
    if (!ordered) {
        out.failure = fresh ? BindFailure::Invalid : BindFailure::Stuck;
        out.reason = "no valid ordering of the bound actions";
        return out;
    }
    const ValidationReport report = validate_schedule(state, problem.goal, *ordered);
    if (!report.ok) {
        out.failure = fresh ? BindFailure::Invalid : BindFailure::Stuck;
        out.reason = report.message;
        return out;
    }
    out.ok = true;
    out.schedule = std::move(*ordered);
    return out;
}

}  // namespace

BindOutcome bind_skeleton(const Problem& problem, const SkeletonPair& pair, GeneratorPool& pool,
                          const ScheduleOptions& options, Clock::time_point deadline) {
    EngineOptions engine;
    engine.schedule = options;
    return bind_impl(problem, pair, pool, engine, deadline);
}

// ---------------------------------------------------------------------------
// Solvers

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Sequential: return "sequential";
        case Algorithm::Hierarchical: return "hierarchical";
        case Algorithm::Eager: return "eager";
        case Algorithm::Lazy: return "lazy";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    for (auto a : {Algorithm::Sequential, Algorithm::Hierarchical, Algorithm::Eager, Algorithm::Lazy}) {
        if (to_string(a) == name) return a;
    }
    throw ConfigurationError("unknown algorithm: " + name);
}

namespace {

Solution finish(StreamPlan plan, Schedule schedule) {
    Solution s;
    s.makespan = schedule.makespan();
    s.stream_plan = std::move(plan);
    s.schedule = std::move(schedule);
    return s;
}

struct LazyState {
    explicit LazyState(std::uint64_t seed) : pool(seed) {}
    GeneratorPool pool;
    PlaceholderNames names;
    struct Entry {
        SkeletonPair pair;
        bool retired = false;
    };
    std::vector<Entry> skeletons;
    std::set<std::string> signatures;
};

// One lazy pass: plan optimistically and record the skeleton. Returns false
// if no skeleton exists at all.
bool add_skeleton(const Problem& problem, const EngineOptions& options, LazyState& lazy,
                  Clock::time_point eager_deadline, bool& added, bool& timed_out) {
    added = false;
    auto policy = lazy_generator(lazy.pool, lazy.names);
    EagerOutcome eager = eager_stream(problem, policy, options.schedule, eager_deadline, true);
    timed_out = eager.timed_out;
    if (!eager.solved) return false;
    SkeletonPair pair;
    const auto targets = preimage(eager.schedule, problem.goal, problem.streams, &problem.initial);
    pair.stream_plan = retrace_streams(problem.initial, eager.stream_plan, targets);
    pair.skeleton = std::move(eager.schedule);
    pair.signature = skeleton_signature(pair);
    if (!lazy.signatures.insert(pair.signature).second) return true;
    lazy.skeletons.push_back({std::move(pair), false});
    added = true;
    return true;
}

}  // namespace

SolveOutcome eager_solve(const Problem& problem, const EngineOptions& options, Clock::time_point deadline) {
    SolveOutcome out;
    GeneratorPool pool(problem.seed);
    EagerOutcome eager = eager_stream(problem, real_outputs(pool), options.schedule, deadline);
    out.iterations = eager.rounds + 1;
    if (!eager.solved) {
        out.message = eager.timed_out ? "budget exhausted" : "streams exhausted without a schedule";
        return out;
    }
    const auto targets = preimage(eager.schedule, problem.goal, problem.streams, &problem.initial);
    StreamPlan plan = retrace_streams(problem.initial, eager.stream_plan, targets);
    const ValidationReport report = validate_schedule(with_certified(problem.initial, plan), problem.goal,
                                                      eager.schedule);
    if (!report.ok) {
        out.message = "internal error: " + report.message;
        return out;
    }
    out.solution = finish(std::move(plan), std::move(eager.schedule));
    return out;
}

SolveOutcome lazy_stream(const Problem& problem, const EngineOptions& options, Clock::time_point deadline) {
    SolveOutcome out;
    LazyState lazy(problem.seed);
    while (Clock::now() < deadline) {
        ++out.iterations;
        const auto now = Clock::now();
        const auto eager_deadline = now + (deadline - now) / 2;
        bool added = false;
        bool timed_out = false;
        const bool found = add_skeleton(problem, options, lazy, eager_deadline, added, timed_out);
        out.skeletons = lazy.skeletons.size();
        if (!found && !timed_out && lazy.skeletons.empty()) {
            out.message = "no optimistic skeleton exists";
            return out;
        }
        bool any_live = false;
        for (auto& pair : lazy.skeletons) {
            if (pair.retired) continue;
            if (Clock::now() >= deadline) break;
            ++out.bindings;
            BindOutcome bound = bind_impl(problem, pair.pair, lazy.pool, options, deadline);
            if (bound.ok) {
                out.solution = finish(std::move(bound.stream_plan), std::move(bound.schedule));
                return out;
            }
            // Nothing new was sampled, so another attempt would repeat this one.
            if (bound.failure == BindFailure::Stuck) {
                pair.retired = true;
            } else {
                any_live = true;
            }
            out.message = bound.reason;
        }
        if (!added && !timed_out && !any_live && Clock::now() < deadline) {
            out.message = "no skeleton can be bound: " + out.message;
            return out;
        }
    }
    if (out.message.empty()) out.message = "budget exhausted";
    return out;
}

SolveOutcome hierarchical_stream(const Problem& problem, const EngineOptions& options, Clock::time_point deadline) {
    SolveOutcome out;
    LazyState lazy(problem.seed);
    bool added = false;
    bool timed_out = false;
    out.iterations = 1;
    if (!add_skeleton(problem, options, lazy, deadline, added, timed_out)) {
        out.message = timed_out ? "budget exhausted" : "no optimistic skeleton exists";
        return out;
    }
    out.skeletons = 1;
    const SkeletonPair& pair = lazy.skeletons.front().pair;
    for (int k = 0; k < options.hierarchical_draws && Clock::now() < deadline; ++k) {
        ++out.bindings;
        BindOutcome bound = bind_impl(problem, pair, lazy.pool, options, deadline);
        if (bound.ok) {
            out.solution = finish(std::move(bound.stream_plan), std::move(bound.schedule));
            return out;
        }
        out.message = bound.reason;
        if (bound.failure == BindFailure::Stuck) break;
    }
    return out;
}

SolveOutcome sequential_stream(const Problem& problem, const EngineOptions& options, Clock::time_point deadline) {
    EngineOptions serial = options;
    serial.schedule.compilation = Compilation::Serial;
    return lazy_stream(problem, serial, deadline);
}

SolveOutcome solve(const Problem& problem, Algorithm algorithm, const EngineOptions& options,
                   Clock::time_point deadline) {
    SolveOutcome out;
    switch (algorithm) {
        case Algorithm::Sequential: out = sequential_stream(problem, options, deadline); break;
        case Algorithm::Hierarchical: out = hierarchical_stream(problem, options, deadline); break;
        case Algorithm::Eager: out = eager_solve(problem, options, deadline); break;
        case Algorithm::Lazy: out = lazy_stream(problem, options, deadline); break;
    }
    if (out.solution && schedule_has_lazy(out.solution->schedule)) {
        throw InconsistencyError("placeholder constant in a returned schedule");
    }
    return out;
}

std::vector<Emission> anytime_solve(const Problem& problem, double budget_s, Algorithm algorithm,
                                    const AnytimeOptions& options, const std::function<void(const Emission&)>& on_emit) {
    std::vector<Emission> emissions;
    if (!(budget_s > 0.0)) return emissions;
    const auto start = Clock::now();
    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget_s));
    double incumbent = std::numeric_limits<double>::infinity();
    const int episodes = problem.streams.empty() ? 1 : std::max(1, options.max_episodes);
    for (int k = 0; k < episodes && Clock::now() < deadline; ++k) {
        Problem episode = problem;
        episode.seed = problem.seed + static_cast<std::uint64_t>(k);
        SolveOutcome outcome = solve(episode, algorithm, options.engine, deadline);
        if (!outcome.solution) continue;
        if (outcome.solution->makespan < incumbent - kNumericTolerance) {
            incumbent = outcome.solution->makespan;
            Emission e;
            e.solution = std::move(*outcome.solution);
            e.time_s = std::chrono::duration<double>(Clock::now() - start).count();
            e.episode = k;
            if (on_emit) on_emit(e);
            emissions.push_back(std::move(e));
        }
    }
    return emissions;
}

}  // namespace tempo
