#include <gtest/gtest.h>

#include <set>

#include "tempo/bench.hpp"
#include "tempo/engine.hpp"

using namespace tempo;

namespace {

Constant sym(const std::string& s) { return Constant::symbol(s); }

Clock::time_point in_seconds(double s) {
    return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(s));
}

StreamPtr stream_named(const Problem& p, const std::string& name) {
    for (const auto& s : p.streams) {
        if (s->name() == name) return s;
    }
    return nullptr;
}

bool schedule_mentions_lazy(const Schedule& s) {
    for (const auto& e : s.entries) {
        if (any_lazy(e.args)) return true;
    }
    return false;
}

// Every input of every element is known initially or produced earlier.
bool dependency_closed(const State& initial, const StreamPlan& plan) {
    std::set<Constant> known;
    for (const auto& c : initial.constants()) known.insert(c);
    for (const auto& el : plan) {
        for (const auto& x : el.inputs) {
            if (!known.count(x)) return false;
        }
        for (const auto& y : el.outputs) known.insert(y);
    }
    return true;
}

struct Optimistic {
    std::shared_ptr<bench::Domain> domain;
    GeneratorPool pool{0};
    PlaceholderNames names;
    EagerOutcome eager;
    SkeletonPair pair;

    explicit Optimistic(const std::string& fixture) : domain(bench::Domain::build(bench::fixture(fixture))) {
        const Problem& p = domain->problem();
        eager = eager_stream(p, lazy_generator(pool, names), {}, in_seconds(10));
        if (!eager.solved) return;
        pair.stream_plan =
            retrace_streams(p.initial, eager.stream_plan, preimage(eager.schedule, p.goal, p.streams, &p.initial));
        pair.skeleton = eager.schedule;
        pair.signature = skeleton_signature(pair);
    }
    const Problem& problem() const { return domain->problem(); }
};

// Two arms, known trajectories, no streams.
Problem streamless() {
    auto motion = FunctionSymbol::predicate("Motion", "?arm ?q1 ?t ?q2");
    auto dur = FunctionSymbol::function("Duration", "?t", Range::Numeric);
    auto at = FunctionSymbol::function("At", "?arm", Range::Object, {{}, {}, {}, {}, true});
    DurativeSpec spec;
    spec.start_cond = {holds((*motion)("?arm", "?q1", "?t", "?q2")), equals((*at)("?arm"), Term::param("?q1"))};
    spec.end_eff = {assign((*at)("?arm"), Term::param("?q2"))};
    spec.duration = (*dur)("?t");
    Problem p;
    p.name = "streamless";
    p.actions = {Action::durative("move", "?arm ?q1 ?t ?q2", spec)};
    for (const char* arm : {"arm1", "arm2"}) {
        const std::string a(arm);
        p.initial.assign({at.get(), {sym(a)}}, sym(a + "_q0"));
        p.initial.assign({motion.get(), {sym(a), sym(a + "_q0"), sym(a + "_t"), sym(a + "_q1")}},
                         Constant::boolean(true));
        p.initial.assign({dur.get(), {sym(a + "_t")}}, Constant::number(a == "arm1" ? 2.0 : 1.0));
        p.goal.push_back(equals((*at)(sym(a)), sym(a + "_q1")));
    }
    return p;
}

}  // namespace

TEST(Placeholders, NamesAreUniquePerParameter) {
    PlaceholderNames names;
    EXPECT_EQ(names.make("?t", "x").name(), "@t1");
    EXPECT_EQ(names.make("?t", "x").name(), "@t2");
    EXPECT_EQ(names.make("?g", "y").name(), "@g1");
    EXPECT_TRUE(names.make("?q", "z").is_lazy());
}

TEST(LazyGenerator, OnePlaceholderTuplePerPass) {
    auto d = bench::Domain::build(bench::fixture("problem1"));
    const Problem& p = d->problem();
    GeneratorPool pool(0);
    PlaceholderNames names;
    auto policy = lazy_generator(pool, names);
    const auto motions = stream_named(p, "motions");
    ASSERT_TRUE(motions);
    const std::vector<Constant> inputs{sym("arm1"), d->home("arm1"), names.make("?q", "ik_qs")};
    auto first = policy(motions, inputs, 0);
    ASSERT_EQ(first.size(), 1u);
    ASSERT_EQ(first[0].size(), 1u);
    EXPECT_EQ(first[0][0].name(), "@t1");
    EXPECT_TRUE(policy(motions, inputs, 1).empty());
}

TEST(LazyGenerator, DrawnInstancesReplayRealOutputs) {
    auto d = bench::Domain::build(bench::fixture("problem1"));
    const Problem& p = d->problem();
    GeneratorPool pool(0);
    PlaceholderNames names;
    const auto grasps = stream_named(p, "grasps");
    const std::vector<Constant> inputs{sym("arm1"), sym("obj1")};
    auto drawn = pool.draw(grasps, inputs);
    ASSERT_TRUE(drawn.has_value());
    auto batch = lazy_generator(pool, names)(grasps, inputs, 0);
    ASSERT_EQ(batch.size(), 1u);
    EXPECT_FALSE(any_lazy(batch[0]));
    EXPECT_EQ(batch[0], *drawn);
}

TEST(EagerStream, StreamlessProblemSolvesImmediately) {
    const Problem p = streamless();
    GeneratorPool pool(0);
    auto out = eager_stream(p, real_outputs(pool), {}, in_seconds(5));
    ASSERT_TRUE(out.solved);
    EXPECT_EQ(out.rounds, 0u);
    EXPECT_TRUE(out.stream_plan.empty());
    EXPECT_NEAR(out.schedule.makespan(), 2.0, 1e-9);
}

TEST(EagerStream, Problem1UsesEveryStreamForBothArms) {
    auto d = bench::Domain::build(bench::fixture("problem1"));
    auto out = eager_solve(d->problem(), {}, in_seconds(10));
    ASSERT_TRUE(out.solution.has_value()) << out.message;
    std::set<std::pair<std::string, std::string>> used;
    for (const auto& el : out.solution->stream_plan) used.insert({el.stream->name(), el.inputs[0].str()});
    for (const char* arm : {"arm1", "arm2"}) {
        for (const char* s : {"grasps", "ik_qs", "motions"}) {
            EXPECT_TRUE(used.count({s, arm})) << s << " for " << arm;
        }
    }
    EXPECT_TRUE(validate_schedule(d->problem(), out.solution->schedule));
    EXPECT_TRUE(dependency_closed(d->problem().initial, out.solution->stream_plan));
}

TEST(EagerStream, ExhaustedStreamsFail) {
    auto object = FunctionSymbol::predicate("Thing", "?x");
    auto found = FunctionSymbol::predicate("Found", "?x ?y", {{(*object)("?x")}});
    auto seen = FunctionSymbol::predicate("Seen", "?x", {{}, {}, {}, {}, true});
    auto look = Action::instantaneous("look", "?x ?y", {holds((*found)("?x", "?y"))},
                                      {assign((*seen)("?x"), Constant::boolean(true))});
    Problem p;
    p.initial.assign({object.get(), {sym("a")}}, Constant::boolean(true));
    p.actions = {look};
    p.streams = {Stream::make("finder", found, "?x", [](std::span<const Constant>, std::uint64_t) {
        return make_sequence([](std::size_t) { return std::nullopt; }, 3);
    })};
    p.goal = {holds((*seen)("a"))};
    auto out = eager_solve(p, {}, in_seconds(2));
    EXPECT_FALSE(out.solution.has_value());
    EXPECT_FALSE(out.message.empty());
}

TEST(Preimage, EmptyScheduleOverInitialConstants) {
    auto d = bench::Domain::build(bench::fixture("problem1"));
    const Problem& p = d->problem();
    EXPECT_TRUE(preimage(Schedule{}, p.goal, p.streams, &p.initial).empty());
    EXPECT_TRUE(retrace_streams(p.initial, {}, {}).empty());
}

TEST(Preimage, Problem1SkeletonNeedsCertifiedFactsForBothArms) {
    Optimistic o("problem1");
    ASSERT_TRUE(o.eager.solved);
    const Problem& p = o.problem();
    EXPECT_TRUE(schedule_mentions_lazy(o.pair.skeleton));
    const auto conds = preimage(o.pair.skeleton, p.goal, p.streams, &p.initial);
    std::set<std::pair<std::string, std::string>> kinds;
    for (const auto& c : conds) {
        const auto& app = c.equality().lhs.application();
        const std::string name = app.symbol->name();
        EXPECT_TRUE(name == "Grasp" || name == "Kin" || name == "Motion" || name == "Conf") << c.str();
        kinds.insert({name, app.args[0].constant().str()});
    }
    for (const char* arm : {"arm1", "arm2"}) {
        for (const char* s : {"Grasp", "Kin", "Motion"}) EXPECT_TRUE(kinds.count({s, arm})) << s << " " << arm;
    }
}

TEST(Retrace, FollowsDependencies) {
    Optimistic o("problem1");
    ASSERT_TRUE(o.eager.solved);
    const Problem& p = o.problem();
    const auto conds = preimage(o.pair.skeleton, p.goal, p.streams, &p.initial);
    const Condition* grasp = nullptr;
    const Condition* motion = nullptr;
    for (const auto& c : conds) {
        const auto& app = c.equality().lhs.application();
        if (app.args[0].constant() != sym("arm1")) continue;
        if (app.symbol->name() == "Grasp") grasp = &c;
        if (app.symbol->name() == "Motion" && app.args[3].constant().is_lazy()) motion = &c;
    }
    ASSERT_TRUE(grasp && motion);

    const auto only_grasp = retrace_streams(p.initial, o.eager.stream_plan, {*grasp});
    ASSERT_EQ(only_grasp.size(), 1u);
    EXPECT_EQ(only_grasp[0].stream->name(), "grasps");
    EXPECT_EQ(only_grasp[0].inputs, (std::vector<Constant>{sym("arm1"), sym("obj1")}));

    const auto chain = retrace_streams(p.initial, o.eager.stream_plan, {*motion});
    ASSERT_EQ(chain.size(), 3u);
    EXPECT_EQ(chain[0].stream->name(), "grasps");
    EXPECT_EQ(chain[1].stream->name(), "ik_qs");
    EXPECT_EQ(chain[2].stream->name(), "motions");
    EXPECT_TRUE(dependency_closed(p.initial, chain));
    EXPECT_TRUE(dependency_closed(p.initial, o.pair.stream_plan));
    EXPECT_TRUE(retrace_streams(p.initial, o.eager.stream_plan, {}).empty());
}

TEST(Bind, Problem1SkeletonBindsToValidSchedule) {
    Optimistic o("problem1");
    ASSERT_TRUE(o.eager.solved);
    auto bound = bind_skeleton(o.problem(), o.pair, o.pool, {}, in_seconds(10));
    ASSERT_TRUE(bound.ok) << bound.reason;
    EXPECT_FALSE(schedule_mentions_lazy(bound.schedule));
    EXPECT_TRUE(dependency_closed(o.problem().initial, bound.stream_plan));
    for (const auto& el : bound.stream_plan) EXPECT_FALSE(any_lazy(el.outputs));
}

TEST(Bind, UnreachableObjectExhaustsIk) {
    bench::Scene s;
    s.name = "far";
    s.arms = {{"arm1", {0.0, 0.0}, 0.8, 0.5, std::nullopt}};
    s.objects = {{"obj1", {2.0, 0.0}}};
    s.goal = {{"Holding", {"arm1"}, "obj1"}};
    auto d = bench::Domain::build(s);
    GeneratorPool pool(0);
    PlaceholderNames names;
    const Problem& p = d->problem();
    auto eager = eager_stream(p, lazy_generator(pool, names), {}, in_seconds(5));
    ASSERT_TRUE(eager.solved);
    SkeletonPair pair;
    pair.stream_plan = retrace_streams(p.initial, eager.stream_plan, preimage(eager.schedule, p.goal, p.streams, &p.initial));
    pair.skeleton = eager.schedule;
    auto bound = bind_skeleton(p, pair, pool, {}, in_seconds(5));
    EXPECT_FALSE(bound.ok);
    EXPECT_NE(bound.reason.find("ik_qs"), std::string::npos) << bound.reason;

    auto lazy = lazy_stream(p, {}, in_seconds(1));
    EXPECT_FALSE(lazy.solution.has_value());
}

TEST(Solve, SingleArmSingleObjectIsSerialPick) {
    bench::Scene s;
    s.name = "one";
    s.arms = {{"arm1", {0.0, 0.0}, 0.8, 0.5, std::nullopt}};
    s.objects = {{"obj1", {0.4, 0.4}}};
    s.goal = {{"Holding", {"arm1"}, "obj1"}};
    auto d = bench::Domain::build(s);
    auto out = lazy_stream(d->problem(), {}, in_seconds(5));
    ASSERT_TRUE(out.solution.has_value()) << out.message;
    const auto& entries = out.solution->schedule.entries;
    ASSERT_EQ(entries.size(), 2u);
    EXPECT_EQ(entries[0].action->name(), "move");
    EXPECT_EQ(entries[1].action->name(), "pick");
    EXPECT_TRUE(validate_schedule(d->problem(), out.solution->schedule));
}

TEST(Solve, HierarchicalMatchesLazyWhenFirstSkeletonWorks) {
    auto d = bench::Domain::build(bench::fixture("problem1"));
    auto lazy = lazy_stream(d->problem(), {}, in_seconds(10));
    auto hier = hierarchical_stream(d->problem(), {}, in_seconds(10));
    ASSERT_TRUE(lazy.solution && hier.solution);
    EXPECT_NEAR(lazy.solution->makespan, hier.solution->makespan, 1e-9);
}

TEST(Solve, HierarchicalFailsWithoutDownwardRefinability) {
    auto d = bench::Domain::build(bench::task("hold_any(2)", 0));
    auto hier = hierarchical_stream(d->problem(), {}, in_seconds(5));
    auto lazy = lazy_stream(d->problem(), {}, in_seconds(10));
    EXPECT_FALSE(hier.solution.has_value());
    ASSERT_TRUE(lazy.solution.has_value()) << lazy.message;
    EXPECT_TRUE(validate_schedule(d->problem(), lazy.solution->schedule));
}

TEST(Solve, StreamlessAlgorithmsReduceToSchedule) {
    const Problem p = streamless();
    auto direct = schedule(p.initial, p.goal, p.actions);
    ASSERT_TRUE(direct.schedule.has_value());
    for (auto a : {Algorithm::Lazy, Algorithm::Eager, Algorithm::Hierarchical}) {
        auto out = solve(p, a, {}, in_seconds(5));
        ASSERT_TRUE(out.solution.has_value()) << to_string(a);
        EXPECT_NEAR(out.solution->makespan, direct.schedule->makespan(), 1e-9) << to_string(a);
    }
}

TEST(Algorithm, NamesRoundTrip) {
    for (auto a : {Algorithm::Sequential, Algorithm::Hierarchical, Algorithm::Eager, Algorithm::Lazy}) {
        EXPECT_EQ(parse_algorithm(to_string(a)), a);
    }
    EXPECT_THROW(parse_algorithm("greedy"), ConfigurationError);
}

TEST(Anytime, ZeroBudgetEmitsNothing) {
    auto d = bench::Domain::build(bench::fixture("problem1"));
    EXPECT_TRUE(anytime_solve(d->problem(), 0.0, Algorithm::Lazy).empty());
}

TEST(Anytime, EmissionsStrictlyImprove) {
    for (const auto& name : bench::fixture_names()) {
        auto d = bench::Domain::build(bench::fixture(name));
        int calls = 0;
        auto out = anytime_solve(d->problem(), 5.0, Algorithm::Lazy, {}, [&](const Emission&) { ++calls; });
        ASSERT_FALSE(out.empty()) << name;
        EXPECT_EQ(calls, static_cast<int>(out.size()));
        for (std::size_t i = 1; i < out.size(); ++i) {
            EXPECT_LT(out[i].solution.makespan, out[i - 1].solution.makespan) << name;
            EXPECT_GE(out[i].time_s, out[i - 1].time_s);
        }
        for (const auto& e : out) {
            EXPECT_FALSE(schedule_mentions_lazy(e.solution.schedule));
            EXPECT_TRUE(validate_schedule(d->problem(), e.solution.schedule)) << name;
        }
    }
}

TEST(Anytime, SequentialIsSlowerOnProblem1) {
    auto d = bench::Domain::build(bench::fixture("problem1"));
    auto lazy = anytime_solve(d->problem(), 5.0, Algorithm::Lazy);
    auto seq = anytime_solve(d->problem(), 5.0, Algorithm::Sequential);
    ASSERT_FALSE(lazy.empty());
    ASSERT_FALSE(seq.empty());
    EXPECT_GT(seq.back().solution.makespan, lazy.back().solution.makespan);
}
