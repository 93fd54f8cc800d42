#include "tempo/bench.hpp"

#include <cmath>
#include <random>
#include <regex>

namespace tempo::bench {

namespace {

ArmSpec arm(const std::string& name, Vec2 base, std::optional<Vec2> home = std::nullopt) {
    ArmSpec a;
    a.name = name;
    a.base = base;
    a.home = home;
    return a;
}

GoalSpec holding(const std::string& a, const std::string& o) { return {"Holding", {a}, o}; }

Scene two_arm_scene(std::string name) {
    Scene s;
    s.name = std::move(name);
    s.arms = {arm("arm1", {-0.5, 0.0}), arm("arm2", {0.5, 0.0})};
    return s;
}

// Home links sit at base + (0, 0.4 reach); objects must leave them room.
constexpr double kHomeClearance = 0.22;

bool far_enough(const Scene& s, Vec2 p, double gap) {
    for (const auto& o : s.objects) {
        if (geom::distance(o.pose, p) < gap) return false;
    }
    for (const auto& pl : s.placements) {
        if (geom::distance(pl.pose, p) < gap) return false;
    }
    for (const auto& a : s.arms) {
        const Vec2 home = a.home.value_or(a.base + Vec2{0.0, 0.4 * a.reach});
        if (geom::point_segment_distance(p, a.base, home) < kHomeClearance) return false;
    }
    return true;
}

// Uniform in the box, rejected until `ok` holds or attempts run out.
template <typename Pred>
Vec2 sample_in(std::mt19937_64& rng, const Scene& s, double x0, double x1, double y0, double y1, double gap,
               Pred ok) {
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    Vec2 p{};
    for (int i = 0; i < 1000; ++i) {
        p = {ux(rng), uy(rng)};
        if (far_enough(s, p, gap) && ok(p)) return p;
    }
    return p;
}

Vec2 sample_in(std::mt19937_64& rng, const Scene& s, double x0, double x1, double y0, double y1, double gap) {
    return sample_in(rng, s, x0, x1, y0, y1, gap, [](Vec2) { return true; });
}

constexpr double kGap = 0.32;

}  // namespace

Scene fixture(const std::string& name) {
    if (name == "problem1") {
        Scene s = two_arm_scene(name);
        s.objects = {{"obj1", {-0.6, 0.65}}, {"obj2", {0.6, 0.65}}};
        s.goal = {holding("arm1", "obj1"), holding("arm2", "obj2")};
        return s;
    }
    if (name == "problem2") {
        Scene s;
        s.name = name;
        s.arms = {arm("arm1", {-0.3, 0.0}, Vec2{0.15, 0.0}), arm("arm2", {0.4, 0.35}, Vec2{0.4, 0.7})};
        s.objects = {{"obj1", {-0.3, 0.6}}, {"obj2", {-0.15, -0.2}}};
        // Pick and retract: both arms end at home holding their objects.
        s.goal = {holding("arm1", "obj1"), holding("arm2", "obj2"), {"At", {"arm1"}, "home_arm1"},
                  {"At", {"arm2"}, "home_arm2"}};
        return s;
    }
    if (name == "problem3") {
        Scene s;
        s.name = name;
        s.arms = {arm("arm1", {-0.4, 0.6}), arm("arm2", {0.5, 0.0})};
        s.objects = {{"obj1", {0.2, 0.1}}, {"obj2", {-0.2, 0.1}}};
        s.goal = {holding("arm1", "obj1"), holding("arm2", "obj2")};
        return s;
    }
    throw ConfigurationError("unknown fixture " + name);
}

std::vector<std::string> fixture_names() { return {"problem1", "problem2", "problem3"}; }

Scene hold_assigned(int n, std::uint64_t seed) {
    if (n < 2 || n > 4) throw ConfigurationError("hold_assigned needs 2 <= n <= 4");
    std::mt19937_64 rng(seed);
    Scene s = two_arm_scene("hold_assigned(" + std::to_string(n) + ")");
    s.seed = seed;
    for (int i = 0; i < n; ++i) {
        const bool left = i % 2 == 0;
        const Vec2 p = left ? sample_in(rng, s, -0.95, -0.2, 0.3, 0.7, kGap) : sample_in(rng, s, 0.2, 0.95, 0.3, 0.7, kGap);
        s.objects.push_back({"obj" + std::to_string(i + 1), p});
    }
    s.goal = {holding("arm1", "obj1"), holding("arm2", "obj2")};
    return s;
}

Scene hold_any(int n, std::uint64_t seed) {
    if (n < 2 || n > 4) throw ConfigurationError("hold_any needs 2 <= n <= 4");
    std::mt19937_64 rng(seed);
    Scene s = two_arm_scene("hold_any(" + std::to_string(n) + ")");
    s.seed = seed;
    const Vec2 b1 = s.arms[0].base;
    // The first object is out of arm1's reach; the rest are within it.
    s.objects.push_back({"obj1", sample_in(rng, s, 0.75, 1.0, 0.35, 0.6, kGap)});
    for (int i = 1; i < n; ++i) {
        const Vec2 p = sample_in(rng, s, -1.0, 0.2, 0.2, 0.75, kGap,
                                 [&](Vec2 q) { return geom::distance(q, b1) <= 0.75; });
        s.objects.push_back({"obj" + std::to_string(i + 1), p});
    }
    s.goal = {{"HandFull", {"arm1"}, "True"}, {"HandFull", {"arm2"}, "True"}};
    return s;
}

Scene pack(int n, std::uint64_t seed) {
    if (n < 1 || n > 4) throw ConfigurationError("pack needs 1 <= n <= 4");
    std::mt19937_64 rng(seed);
    Scene s = two_arm_scene("pack(" + std::to_string(n) + ")");
    s.seed = seed;
    for (int i = 0; i < n; ++i) {
        const bool left = i % 2 == 0;
        const Vec2 p = left ? sample_in(rng, s, -0.95, -0.3, 0.3, 0.7, kGap) : sample_in(rng, s, 0.3, 0.95, 0.3, 0.7, kGap);
        s.objects.push_back({"obj" + std::to_string(i + 1), p});
    }
    for (int i = 0; i < n; ++i) {
        const std::string obj = "obj" + std::to_string(i + 1);
        const std::string target = "bin" + std::to_string(i + 1);
        const Vec2 p = sample_in(rng, s, -0.35, 0.35, 0.3, 0.75, kGap);
        s.placements.push_back({target, obj, p, {}});
        s.goal.push_back({"Pose", {obj}, target});
    }
    return s;
}

Scene stack(int n, std::uint64_t seed) {
    if (n < 1 || n > 4) throw ConfigurationError("stack needs 1 <= n <= 4");
    std::mt19937_64 rng(seed);
    Scene s = two_arm_scene("stack(" + std::to_string(n) + ")");
    s.seed = seed;
    for (int i = 0; i < n; ++i) {
        const bool left = i % 2 == 0;
        const Vec2 p = left ? sample_in(rng, s, -0.95, -0.3, 0.3, 0.7, kGap) : sample_in(rng, s, 0.3, 0.95, 0.3, 0.7, kGap);
        s.objects.push_back({"obj" + std::to_string(i + 1), p});
    }
    const Vec2 base = sample_in(rng, s, -0.2, 0.2, 0.35, 0.6, kGap);
    std::string below;
    for (int i = 0; i < n; ++i) {
        const std::string obj = "obj" + std::to_string(i + 1);
        const std::string level = "level" + std::to_string(i + 1);
        s.placements.push_back({level, obj, base, below});
        s.goal.push_back({"Pose", {obj}, level});
        below = level;
    }
    return s;
}

Scene task(const std::string& name, std::uint64_t seed) {
    static const std::regex pattern(R"((\w+)\((\d+)\))");
    std::smatch m;
    if (std::regex_match(name, m, pattern)) {
        const std::string kind = m[1];
        const int n = std::stoi(m[2]);
        if (kind == "hold_assigned") return hold_assigned(n, seed);
        if (kind == "hold_any") return hold_any(n, seed);
        if (kind == "pack") return pack(n, seed);
        if (kind == "stack") return stack(n, seed);
        throw ConfigurationError("unknown task " + kind);
    }
    Scene s = fixture(name);
    s.seed = seed;
    return s;
}

}  // namespace tempo::bench
