#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tempo/bench.hpp"
#include "tempo/errors.hpp"

using namespace tempo;
using namespace tempo::bench;

namespace {

Constant sym(const std::string& s) { return Constant::symbol(s); }

// Closest approach between a point and a segment by sampling the segment.
double sampled_distance(Vec2 p, Vec2 a, Vec2 b, int samples = 4000) {
    double best = std::hypot(p.x - a.x, p.y - a.y);
    for (int i = 1; i <= samples; ++i) {
        const double u = static_cast<double>(i) / samples;
        const Vec2 x{a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
        best = std::min(best, std::hypot(p.x - x.x, p.y - x.y));
    }
    return best;
}

double sampled_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d, int samples = 800) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
        const double u = static_cast<double>(i) / samples;
        best = std::min(best, sampled_distance({a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)}, c, d, samples));
    }
    return best;
}

Scene one_arm(std::vector<ObstacleSpec> obstacles = {}) {
    Scene s;
    s.name = "one_arm";
    s.arms = {{"arm1", {0.0, 0.0}, 0.8, 0.5, std::nullopt}};
    s.objects = {{"obj1", {0.0, 0.5}}};
    s.obstacles = std::move(obstacles);
    s.goal = {{"HandFull", {"arm1"}, "True"}};
    return s;
}

Scene two_arms() {
    Scene s;
    s.name = "two_arms";
    s.arms = {{"arm1", {-0.5, 0.0}, 0.8, 0.5, std::nullopt}, {"arm2", {0.5, 0.0}, 0.8, 0.5, std::nullopt}};
    s.objects = {{"obj1", {-0.5, 0.5}}};
    return s;
}

Constant placement_at(Vec2 p) { return Constant::vector({p.x, p.y}, "placement", "p_test"); }

std::vector<Constant> drain(OutputSequence& seq) {
    std::vector<Constant> out;
    while (!seq.exhausted()) {
        if (auto y = seq.next()) out.push_back((*y)[0]);
    }
    return out;
}

}  // namespace

TEST(ObjCollision, FarTrajectoryIsFree) {
    auto d = Domain::build(one_arm());
    const Constant t = d->make_path("arm1", {{0.0, 0.2}, {0.0, 0.3}});
    EXPECT_FALSE(d->obj_collision(t, Constant::none(), placement_at({2.0, 2.0})));
}

TEST(ObjCollision, PassingThroughCenterCollides) {
    auto d = Domain::build(one_arm());
    const Constant t = d->make_path("arm1", {{-0.3, 0.4}, {0.0, 0.4}, {0.3, 0.4}});
    EXPECT_TRUE(d->obj_collision(t, Constant::none(), placement_at({0.0, 0.4})));
}

TEST(ObjCollision, ExactClearanceBoundaryIsFree) {
    auto d = Domain::build(one_arm());
    const Params& pr = d->params();
    const Vec2 tip{0.5, 0.0};
    const Vec2 object{0.25, pr.clearance + pr.object_radius};
    const Constant t = d->make_path("arm1", {{0.5, 0.0}});
    const double gap = sampled_distance(object, {0.0, 0.0}, tip) - pr.object_radius;
    EXPECT_NEAR(gap, pr.clearance, 1e-9);
    EXPECT_FALSE(d->obj_collision(t, Constant::none(), placement_at(object)));
    // Slightly inside the clearance band.
    const Vec2 closer{0.25, pr.clearance + pr.object_radius - 1e-3};
    EXPECT_LT(sampled_distance(closer, {0.0, 0.0}, tip) - pr.object_radius, pr.clearance);
    EXPECT_TRUE(d->obj_collision(t, Constant::none(), placement_at(closer)));
}

TEST(ObjCollision, HeldObjectSweepsWithTheArm) {
    auto d = Domain::build(one_arm());
    const Constant grasp = Constant::vector({0.0, 0.15}, "grasp", "g_test");
    const Constant t = d->make_path("arm1", {{0.3, 0.0}});
    const Constant p = placement_at({0.3, 0.35});
    EXPECT_FALSE(d->obj_collision(t, Constant::none(), p));
    EXPECT_TRUE(d->obj_collision(t, grasp, p));
}

TEST(ObjCollision, MatchesSampledOracle) {
    auto d = Domain::build(one_arm());
    const Params& pr = d->params();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int i = 0; i < 200; ++i) {
        const Vec2 tip{u(rng) * 0.7, std::abs(u(rng)) * 0.7};
        const Vec2 obj{u(rng), std::abs(u(rng))};
        const double gap = sampled_distance(obj, {0.0, 0.0}, tip) - pr.object_radius;
        if (std::abs(gap - pr.clearance) < 1e-3) continue;
        const Constant t = d->make_path("arm1", {tip});
        EXPECT_EQ(d->obj_collision(t, Constant::none(), placement_at(obj)), gap < pr.clearance) << i;
    }
}

TEST(ArmCollision, OppositeSidesAreFree) {
    auto d = Domain::build(two_arms());
    const Constant t1 = d->make_path("arm1", geom::densify({-0.5, 0.4}, {-0.7, 0.3}, 0.05));
    const Constant t2 = d->make_path("arm2", geom::densify({0.5, 0.4}, {0.7, 0.3}, 0.05));
    EXPECT_FALSE(d->arm_collision(t1, Constant::none(), t2, Constant::none()));
    EXPECT_FALSE(d->arm_collision(t2, Constant::none(), t1, Constant::none()));
}

TEST(ArmCollision, CrossingTrajectoriesCollideButParkedStartsDoNot) {
    auto d = Domain::build(two_arms());
    const Vec2 s1{-0.5, 0.4}, s2{0.5, 0.4};
    const Constant t1 = d->make_path("arm1", geom::densify(s1, {0.2, 0.2}, 0.05));
    const Constant t2 = d->make_path("arm2", geom::densify(s2, {-0.2, 0.2}, 0.05));
    EXPECT_TRUE(d->arm_collision(t1, Constant::none(), t2, Constant::none()));
    const Constant q1 = d->make_config("arm1", s1);
    const Constant q2 = d->make_config("arm2", s2);
    EXPECT_FALSE(d->arm_collision(t1, Constant::none(), q2, Constant::none()));
    EXPECT_FALSE(d->arm_collision(t2, Constant::none(), q1, Constant::none()));
}

TEST(ArmCollision, HalfPlaneTrajectoryAgainstParkedArmMatchesOracle) {
    auto d = Domain::build(two_arms());
    const Vec2 b1{-0.5, 0.0}, b2{0.5, 0.0};
    const Vec2 parked{0.5, 0.4};
    const auto pts = geom::densify({-0.5, 0.4}, {-0.1, 0.6}, 0.05);
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) closest = std::min(closest, sampled_segment_distance(b1, p, b2, parked, 200));
    EXPECT_GT(closest, d->params().clearance);
    EXPECT_FALSE(d->arm_collision(d->make_path("arm1", pts), Constant::none(), d->make_config("arm2", parked),
                                  Constant::none()));
}

TEST(ArmCollision, SameArmNeverCollides) {
    auto d = Domain::build(two_arms());
    const Constant t = d->make_path("arm1", {{-0.5, 0.4}});
    EXPECT_FALSE(d->arm_collision(t, Constant::none(), d->make_config("arm1", {-0.5, 0.4}), Constant::none()));
}

TEST(ArmCollision, IsSymmetric) {
    auto d = Domain::build(two_arms());
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ang(0.0, 3.14159);
    std::uniform_real_distribution<double> rad(0.2, 0.8);
    auto point = [&](Vec2 base) {
        const double a = ang(rng), r = rad(rng);
        return Vec2{base.x + r * std::cos(a), base.y + r * std::sin(a)};
    };
    const Constant grasp = Constant::vector({0.15, 0.0}, "grasp", "g_sym");
    int hits = 0;
    for (int i = 0; i < 100; ++i) {
        const Constant t1 = d->make_path("arm1", geom::densify(point({-0.5, 0.0}), point({-0.5, 0.0}), 0.05));
        const Constant t2 = d->make_path("arm2", geom::densify(point({0.5, 0.0}), point({0.5, 0.0}), 0.05));
        const Constant g1 = i % 2 ? grasp : Constant::none();
        const Constant g2 = i % 3 ? Constant::none() : grasp;
        const bool a = d->arm_collision(t1, g1, t2, g2);
        EXPECT_EQ(a, d->arm_collision(t2, g2, t1, g1)) << i;
        hits += a;
    }
    EXPECT_GT(hits, 0);
    EXPECT_LT(hits, 100);
}

TEST(Duration, LengthOverSpeed) {
    auto d = Domain::build(one_arm());
    const Constant t = d->make_path("arm1", geom::densify({0.0, 0.2}, {0.3, 0.6}, 0.05));
    EXPECT_NEAR(d->duration(t), 0.5 / 0.5, 1e-9);
    EXPECT_DOUBLE_EQ(d->duration(d->make_path("arm1", {{0.1, 0.1}, {0.1, 0.1}})), 0.0);
}

TEST(Grasps, CertifiedDeterministicAndFinite) {
    auto d = Domain::build(one_arm());
    auto a = d->grasps(sym("arm1"), sym("obj1"), 42);
    auto b = d->grasps(sym("arm1"), sym("obj1"), 42);
    const auto ga = drain(*a);
    const auto gb = drain(*b);
    ASSERT_EQ(ga.size(), 8u);
    ASSERT_EQ(gb.size(), ga.size());
    for (std::size_t i = 0; i < ga.size(); ++i) {
        EXPECT_TRUE(d->grasp_test(sym("arm1"), sym("obj1"), ga[i]));
        EXPECT_EQ(ga[i].values(), gb[i].values());
        EXPECT_NEAR(geom::norm(to_vec(ga[i])), 0.15, 1e-12);
    }
    EXPECT_FALSE(a->next().has_value());
}

TEST(Ik, RoundTripWithinTolerance) {
    auto d = Domain::build(one_arm());
    const Constant p = d->initial_pose("obj1");
    auto gs = d->grasps(sym("arm1"), sym("obj1"), 3);
    int yields = 0;
    for (const auto& g : drain(*gs)) {
        auto ik = d->ik(sym("arm1"), sym("obj1"), g, p, 0);
        for (const auto& q : drain(*ik)) {
            ++yields;
            const Vec2 back = to_vec(q) + to_vec(g);
            EXPECT_LE(geom::distance(back, to_vec(p)), 1e-6);
            EXPECT_TRUE(d->kin_test(sym("arm1"), q, sym("obj1"), g, p));
        }
    }
    EXPECT_GT(yields, 0);
}

TEST(Ik, OutOfReachExhaustsImmediately) {
    auto d = Domain::build(one_arm());
    const Constant g = Constant::vector({0.15, 0.0}, "grasp", "g_far");
    auto ik = d->ik(sym("arm1"), sym("obj1"), g, placement_at({2.0, 0.0}), 0);
    EXPECT_FALSE(ik->next().has_value());
    EXPECT_TRUE(ik->exhausted());
}

TEST(Motions, StraightLineFirst) {
    auto d = Domain::build(one_arm());
    const Constant q1 = d->make_config("arm1", {-0.3, 0.3});
    const Constant q2 = d->make_config("arm1", {0.3, 0.5});
    auto seq = d->motions(sym("arm1"), q1, q2, 1);
    auto t = seq->next();
    ASSERT_TRUE(t.has_value());
    const Constant& path = (*t)[0];
    EXPECT_TRUE(d->motion_test(sym("arm1"), q1, path, q2));
    std::vector<Vec2> pts;
    for (const auto& w : path.waypoints()) pts.push_back({w[0], w[1]});
    EXPECT_NEAR(geom::polyline_length(pts), geom::distance({-0.3, 0.3}, {0.3, 0.5}), 1e-9);
}

TEST(Motions, IdenticalEndpointsGiveZeroLength) {
    auto d = Domain::build(one_arm());
    const Constant q = d->make_config("arm1", {0.2, 0.3});
    auto t = d->motions(sym("arm1"), q, q, 0)->next();
    ASSERT_TRUE(t.has_value());
    EXPECT_DOUBLE_EQ(d->duration((*t)[0]), 0.0);
    EXPECT_TRUE(d->motion_test(sym("arm1"), q, (*t)[0], q));
}

TEST(Motions, DetourClearsBlockingObstacle) {
    // The obstacle sits on the link's sweep between the two configurations.
    const ObstacleSpec obstacle{{0.0, 0.3}, 0.08};
    auto d = Domain::build(one_arm({obstacle}));
    const Vec2 a{-0.5, 0.5}, b{0.5, 0.5};
    const Constant q1 = d->make_config("arm1", a);
    const Constant q2 = d->make_config("arm1", b);
    auto seq = d->motions(sym("arm1"), q1, q2, 7);
    auto t = seq->next();
    ASSERT_TRUE(t.has_value());
    std::vector<Vec2> pts;
    for (const auto& w : (*t)[0].waypoints()) pts.push_back({w[0], w[1]});
    EXPECT_GT(geom::polyline_length(pts), geom::distance(a, b) + 1e-6);
    const double clearance = d->params().clearance;
    for (const auto& p : pts) {
        EXPECT_GE(sampled_distance(obstacle.center, {0.0, 0.0}, p) - obstacle.radius, clearance - 1e-3);
        EXPECT_LE(geom::norm(p), 0.8 + 1e-9);
    }
    EXPECT_TRUE(d->motion_test(sym("arm1"), q1, (*t)[0], q2));
}

TEST(BuildDomain, SingleArmSingleObjectProblem) {
    auto d = Domain::build(one_arm());
    const Problem& p = d->problem();
    EXPECT_EQ(p.actions.size(), 3u);
    EXPECT_EQ(p.streams.size(), 3u);
    EXPECT_EQ(p.goal.size(), 1u);
    EXPECT_EQ(evaluate_term(p.initial, (*d->symbol("At"))(sym("arm1"))), d->home("arm1"));
    EXPECT_EQ(evaluate_term(p.initial, (*d->symbol("Holding"))(sym("arm1"))), Constant::none());
}

TEST(BuildDomain, MalformedScenesAreRejected) {
    Scene s = one_arm();
    s.arms[0].reach = 0.0;
    EXPECT_THROW(Domain::build(s), ConfigurationError);
    s = one_arm();
    s.goal = {{"Flying", {"arm1"}, "True"}};
    EXPECT_THROW(Domain::build(s), ConfigurationError);
    s = one_arm();
    s.objects.push_back({"obj1", {0.1, 0.1}});
    EXPECT_THROW(Domain::build(s), ConfigurationError);
    EXPECT_THROW(task("juggle(3)", 0), ConfigurationError);
}

TEST(Fixtures, AllBuild) {
    for (const auto& name : fixture_names()) {
        auto d = Domain::build(fixture(name));
        EXPECT_FALSE(d->problem().goal.empty()) << name;
    }
}

TEST(Fixtures, HoldAnyFirstObjectOnlyReachableByOneArm) {
    for (int n : {2, 3}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Scene s = hold_any(n, seed);
            ASSERT_EQ(s.objects.size(), static_cast<std::size_t>(n));
            const auto& arm1 = s.arms[0];
            const auto& arm2 = s.arms[1];
            EXPECT_GT(geom::distance(s.objects[0].pose, arm1.base), arm1.reach);
            EXPECT_LE(geom::distance(s.objects[0].pose, arm2.base), arm2.reach);
        }
    }
}

TEST(Fixtures, GeneratorsAreSeeded) {
    for (const char* t : {"hold_assigned(2)", "hold_any(3)", "pack(2)", "stack(2)"}) {
        const Scene a = task(t, 4), b = task(t, 4);
        ASSERT_EQ(a.objects.size(), b.objects.size());
        for (std::size_t i = 0; i < a.objects.size(); ++i) EXPECT_EQ(a.objects[i].pose, b.objects[i].pose) << t;
        EXPECT_NO_THROW(Domain::build(a)) << t;
    }
}
