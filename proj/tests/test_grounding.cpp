#include <gtest/gtest.h>

#include <random>
#include <set>

#include "tempo/grounding.hpp"

using namespace tempo;

namespace {

Constant sym(const std::string& s) { return Constant::symbol(s); }

GeneratorFn no_outputs() {
    return [](std::span<const Constant>, std::uint64_t) {
        return make_sequence([](std::size_t) { return std::nullopt; }, 0);
    };
}

struct PickDomain {
    SymbolPtr arm = FunctionSymbol::predicate("Arm", "?arm");
    SymbolPtr object = FunctionSymbol::predicate("Object", "?obj");
    SymbolPtr conf = FunctionSymbol::predicate("Conf", "?arm ?q");
    SymbolPtr placement = FunctionSymbol::predicate("Placement", "?obj ?p");
    SymbolPtr grasp = FunctionSymbol::predicate("Grasp", "?arm ?obj ?g", {{(*arm)("?arm"), (*object)("?obj")}});
    SymbolPtr kin = FunctionSymbol::predicate(
        "Kin", "?arm ?q ?obj ?g ?p", {{(*conf)("?arm", "?q"), (*placement)("?obj", "?p"), (*grasp)("?arm", "?obj", "?g")}});
    SymbolPtr motion =
        FunctionSymbol::predicate("Motion", "?arm ?q1 ?t ?q2", {{(*conf)("?arm", "?q1"), (*conf)("?arm", "?q2")}});
    SymbolPtr at = FunctionSymbol::function("At", "?arm", Range::Object, {{}, {}, {}, {}, true});
    SymbolPtr holding = FunctionSymbol::function("Holding", "?arm", Range::Object, {{}, {}, {}, {}, true});

    ActionPtr pick = Action::instantaneous(
        "pick", "?arm ?q ?obj ?g ?p",
        {holds((*kin)("?arm", "?q", "?obj", "?g", "?p")), equals((*at)("?arm"), Term::param("?q")),
         equals((*holding)("?arm"), Constant::none())},
        {assign((*holding)("?arm"), Term::param("?obj"))});
    ActionPtr move = [this] {
        DurativeSpec spec;
        spec.start_cond = {holds((*motion)("?arm", "?q1", "?t", "?q2")), equals((*at)("?arm"), Term::param("?q1"))};
        spec.end_eff = {assign((*at)("?arm"), Term::param("?q2"))};
        spec.duration = Constant::number(1.0);
        return Action::durative("move", "?arm ?q1 ?t ?q2", spec);
    }();

    StreamPtr grasps = Stream::make("grasps", grasp, "?arm ?obj", no_outputs());
    StreamPtr ik = Stream::make("ik_qs", kin, "?arm ?obj ?g ?p", no_outputs());

    void fact(State& s, const SymbolPtr& p, std::vector<Constant> args) const {
        s.assign({p.get(), std::move(args)}, Constant::boolean(true));
    }
};

std::set<std::vector<Constant>> arg_set(const std::vector<InstancePtr>& instances, const ActionPtr& action) {
    std::set<std::vector<Constant>> out;
    for (const auto& inst : instances) {
        if (inst->action == action) out.insert(inst->args);
    }
    return out;
}

}  // namespace

TEST(InstantiateActions, SingleCertifiedTupleGivesOnePick) {
    PickDomain d;
    State s;
    d.fact(s, d.kin, {sym("arm1"), sym("q"), sym("o"), sym("g"), sym("p")});
    const auto insts = instantiate_actions(s, {d.pick, d.move});
    const auto picks = arg_set(insts, d.pick);
    ASSERT_EQ(picks.size(), 1u);
    EXPECT_EQ(*picks.begin(), (std::vector<Constant>{sym("arm1"), sym("q"), sym("o"), sym("g"), sym("p")}));
    EXPECT_TRUE(arg_set(insts, d.move).empty());
}

TEST(InstantiateActions, OneMovePerMotionFact) {
    PickDomain d;
    State s;
    d.fact(s, d.motion, {sym("arm1"), sym("q1"), sym("t1"), sym("q2")});
    d.fact(s, d.motion, {sym("arm1"), sym("q2"), sym("t2"), sym("q1")});
    EXPECT_EQ(arg_set(instantiate_actions(s, {d.move}), d.move).size(), 2u);
    EXPECT_TRUE(instantiate_actions(State{}, {d.move}).empty());
}

TEST(InstantiateStreams, InputConditionsGateInstances) {
    PickDomain d;
    StreamRegistry registry;
    State s;
    EXPECT_TRUE(instantiate_streams(s, {d.grasps, d.ik}, registry).empty());
    d.fact(s, d.arm, {sym("arm1")});
    EXPECT_TRUE(instantiate_streams(s, {d.grasps, d.ik}, registry).empty());
    d.fact(s, d.object, {sym("obj1")});
    auto insts = instantiate_streams(s, {d.grasps, d.ik}, registry);
    ASSERT_EQ(insts.size(), 1u);
    EXPECT_EQ(insts[0]->stream, d.grasps);
    EXPECT_EQ(insts[0]->inputs, (std::vector<Constant>{sym("arm1"), sym("obj1")}));

    d.fact(s, d.grasp, {sym("arm1"), sym("obj1"), sym("g")});
    d.fact(s, d.placement, {sym("obj1"), sym("p")});
    d.fact(s, d.conf, {sym("arm1"), sym("q0")});
    insts = instantiate_streams(s, {d.grasps, d.ik}, registry);
    bool ik = false;
    for (const auto& i : insts) {
        if (i->stream == d.ik) {
            ik = true;
            EXPECT_EQ(i->inputs, (std::vector<Constant>{sym("arm1"), sym("obj1"), sym("g"), sym("p")}));
        }
    }
    EXPECT_TRUE(ik);
}

TEST(InstantiateStreams, RegistryReturnsTheSameInstance) {
    PickDomain d;
    StreamRegistry registry;
    State s;
    d.fact(s, d.arm, {sym("arm1")});
    d.fact(s, d.object, {sym("obj1")});
    auto a = instantiate_streams(s, {d.grasps}, registry);
    a[0]->call_count = 3;
    auto b = instantiate_streams(s, {d.grasps}, registry);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(a[0], b[0]);
    EXPECT_EQ(b[0]->call_count, 3);
    EXPECT_EQ(registry.size(), 1u);
}

// Random static fact sets: instantiate_actions must agree with enumerating
// every argument tuple over the state's constants.
TEST(InstantiateActions, AgreesWithBruteForceEnumeration) {
    auto r = FunctionSymbol::predicate("R", "?a ?b");
    auto u = FunctionSymbol::predicate("U", "?b");
    auto f = FunctionSymbol::function("F", "?a", Range::Object, {{}, {}, {}, {}, true});
    auto act = Action::instantaneous("act", "?a ?b ?c",
                                     {holds((*r)("?a", "?b")), holds((*u)("?b")), holds((*r)("?b", "?c")),
                                      equals((*f)("?a"), Term::param("?c"))},
                                     {assign((*f)("?a"), Term::param("?b"))});
    std::mt19937 rng(7);
    const std::vector<Constant> pool{sym("c1"), sym("c2"), sym("c3"), sym("c4")};
    for (int trial = 0; trial < 40; ++trial) {
        State s;
        std::bernoulli_distribution coin(0.35);
        for (const auto& x : pool) {
            if (coin(rng)) s.assign({u.get(), {x}}, Constant::boolean(true));
            for (const auto& y : pool) {
                if (coin(rng)) s.assign({r.get(), {x, y}}, Constant::boolean(true));
            }
        }
        std::set<std::vector<Constant>> expected;
        for (const auto& a : pool) {
            for (const auto& b : pool) {
                for (const auto& c : pool) {
                    const bool ok = s.lookup({r.get(), {a, b}}).has_value() && s.lookup({u.get(), {b}}).has_value() &&
                                    s.lookup({r.get(), {b, c}}).has_value();
                    if (ok) expected.insert({a, b, c});
                }
            }
        }
        const auto insts = instantiate_actions(s, {act});
        EXPECT_EQ(arg_set(insts, act), expected) << "trial " << trial;
        EXPECT_EQ(insts.size(), expected.size()) << "duplicate instances in trial " << trial;
    }
}
