#include "tempo/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace tempo::bench {

namespace {

constexpr double kEps = 1e-9;
constexpr double kKinTolerance = 1e-6;
const char* const kGraspTag = "grasp";
const char* const kPlacementTag = "placement";
const char* const kLevelTag = "level";
const char* const kTable = "table";

Constant sym(const std::string& name) { return Constant::symbol(name); }

std::vector<Vec2> points_of(const Constant& c) {
    std::vector<Vec2> out;
    if (c.kind() == ConstantKind::Vector) {
        out.push_back(to_vec(c));
    } else if (c.kind() == ConstantKind::Path) {
        for (const auto& w : c.waypoints()) out.push_back({w.at(0), w.at(1)});
    }
    return out;
}

struct Fn {
    SymbolPtr ptr;

    template <typename... Args>
    Term operator()(Args&&... args) const {
        return (*ptr)(std::forward<Args>(args)...);
    }
    const FunctionSymbol* get() const { return ptr.get(); }
};

bool is_vector(const Constant& c) { return c.kind() == ConstantKind::Vector && c.values().size() == 2; }

}  // namespace

struct Body {
    bool disc = false;
    Vec2 a;
    Vec2 b;
    double radius = 0.0;
};

Vec2 to_vec(const Constant& c) {
    const auto& v = c.values();
    if (v.size() != 2) throw ConfigurationError("expected a planar vector, got " + c.str());
    return {v[0], v[1]};
}

std::shared_ptr<Domain> Domain::build(const Scene& scene, const Params& params) {
    std::shared_ptr<Domain> d(new Domain());
    d->scene_ = scene;
    d->params_ = params;
    d->counter_ = std::make_shared<std::atomic<std::uint64_t>>(0);
    d->build_problem();
    return d;
}

const ArmSpec& Domain::arm(const std::string& name) const {
    for (const auto& a : scene_.arms) {
        if (a.name == name) return a;
    }
    throw ConfigurationError("unknown arm " + name);
}

Constant Domain::home(const std::string& arm) const { return homes_.at(arm); }
Constant Domain::initial_pose(const std::string& object) const { return initial_poses_.at(object); }

Constant Domain::placement(const std::string& name) const {
    auto it = placements_.find(name);
    if (it == placements_.end()) throw ConfigurationError("unknown placement " + name);
    return it->second;
}

SymbolPtr Domain::symbol(const std::string& name) const {
    auto it = symbols_.find(name);
    if (it == symbols_.end()) throw ConfigurationError("unknown symbol " + name);
    return it->second;
}

Constant Domain::make_config(const std::string& arm, Vec2 q) const {
    return Constant::vector({q.x, q.y}, arm, "q" + std::to_string(++*counter_));
}

Constant Domain::make_path(const std::string& arm, const std::vector<Vec2>& waypoints) const {
    std::vector<std::vector<double>> w;
    w.reserve(waypoints.size());
    for (const auto& p : waypoints) w.push_back({p.x, p.y});
    return Constant::path(std::move(w), arm, "t" + std::to_string(++*counter_));
}

// ---------------------------------------------------------------------------
// Geometric tests

std::vector<Body> Domain::bodies(const Constant& s, const Constant& g) const {
    std::vector<Body> out;
    const ArmSpec* spec = nullptr;
    for (const auto& a : scene_.arms) {
        if (a.name == s.tag()) spec = &a;
    }
    if (!spec) return out;
    const bool holding = is_vector(g);
    const Vec2 offset = holding ? to_vec(g) : Vec2{};
    for (const Vec2& p : points_of(s)) {
        out.push_back(Body{false, spec->base, p, 0.0});
        if (holding) out.push_back(Body{true, p + offset, {}, params_.object_radius});
    }
    return out;
}

bool Domain::bodies_collide(const std::vector<Body>& a, const std::vector<Body>& b) const {
    const double limit = params_.clearance - kEps;
    for (const auto& x : a) {
        for (const auto& y : b) {
            double d;
            if (!x.disc && !y.disc) {
                d = geom::segment_distance(x.a, x.b, y.a, y.b);
            } else if (x.disc && y.disc) {
                d = geom::distance(x.a, y.a) - x.radius - y.radius;
            } else {
                const Body& disc = x.disc ? x : y;
                const Body& seg = x.disc ? y : x;
                d = geom::point_segment_distance(disc.a, seg.a, seg.b) - disc.radius;
            }
            if (d < limit) return true;
        }
    }
    return false;
}

bool Domain::obj_collision(const Constant& t, const Constant& g, const Constant& p) const {
    if (!is_vector(p) || p.tag() != kPlacementTag) return false;
    return bodies_collide(bodies(t, g), {Body{true, to_vec(p), {}, params_.object_radius}});
}

bool Domain::arm_collision(const Constant& t1, const Constant& g1, const Constant& s2, const Constant& g2) const {
    if (t1.tag().empty() || t1.tag() == s2.tag()) return false;
    return bodies_collide(bodies(t1, g1), bodies(s2, g2));
}

double Domain::duration(const Constant& t) const {
    if (t.kind() != ConstantKind::Path) return 0.0;
    const auto pts = points_of(t);
    return geom::polyline_length(pts) / arm(t.tag()).speed;
}

bool Domain::statically_free(const ArmSpec& arm, Vec2 q) const {
    for (const auto& o : scene_.obstacles) {
        if (geom::point_segment_distance(o.center, arm.base, q) - o.radius < params_.clearance - kEps) return false;
    }
    return true;
}

bool Domain::conf_test(const Constant& arm_c, const Constant& q) const {
    if (!is_vector(q) || q.tag() != arm_c.name()) return false;
    const ArmSpec& a = arm(arm_c.name());
    return geom::distance(to_vec(q), a.base) <= a.reach + kEps;
}

bool Domain::grasp_test(const Constant&, const Constant&, const Constant& g) const {
    return is_vector(g) && g.tag() == kGraspTag && std::abs(geom::norm(to_vec(g)) - params_.grasp_radius) < kKinTolerance;
}

bool Domain::kin_test(const Constant& arm_c, const Constant& q, const Constant& obj, const Constant& g,
                      const Constant& p) const {
    if (!conf_test(arm_c, q) || !grasp_test(arm_c, obj, g) || !is_vector(p)) return false;
    return geom::distance(to_vec(q) + to_vec(g), to_vec(p)) <= kKinTolerance;
}

bool Domain::motion_test(const Constant& arm_c, const Constant& q1, const Constant& t, const Constant& q2) const {
    if (t.kind() != ConstantKind::Path || t.tag() != arm_c.name()) return false;
    if (!conf_test(arm_c, q1) || !conf_test(arm_c, q2)) return false;
    const auto pts = points_of(t);
    if (pts.empty()) return false;
    if (geom::distance(pts.front(), to_vec(q1)) > kKinTolerance) return false;
    if (geom::distance(pts.back(), to_vec(q2)) > kKinTolerance) return false;
    const ArmSpec& a = arm(arm_c.name());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (geom::distance(pts[i], a.base) > a.reach + kEps) return false;
        if (!statically_free(a, pts[i])) return false;
        if (i > 0 && geom::distance(pts[i], pts[i - 1]) > params_.waypoint_spacing + kEps) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Samplers

std::unique_ptr<OutputSequence> Domain::grasps(const Constant& arm_c, const Constant& obj_c,
                                               std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    const int n = params_.grasp_count;
    const double step = 2.0 * std::numbers::pi / n;
    const double offset = std::uniform_real_distribution<double>(0.0, step)(rng);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    // Grasps approached from the arm's side of the object come first.
    auto pose = initial_poses_.find(obj_c.name());
    if (arm_c.kind() == ConstantKind::Symbol && pose != initial_poses_.end()) {
        const Vec2 dir = to_vec(pose->second) - arm(arm_c.name()).base;
        auto alignment = [&](int i) {
            const double angle = offset + i * step;
            return dir.x * std::cos(angle) + dir.y * std::sin(angle);
        };
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return alignment(a) > alignment(b); });
    }
    const double r = params_.grasp_radius;
    auto counter = counter_;
    return make_sequence(
        [order, offset, step, r, counter](std::size_t k) -> std::optional<std::vector<Constant>> {
            const double angle = offset + order[k] * step;
            return std::vector<Constant>{Constant::vector({r * std::cos(angle), r * std::sin(angle)}, kGraspTag,
                                                          "g" + std::to_string(++*counter))};
        },
        static_cast<std::size_t>(n));
}

std::unique_ptr<OutputSequence> Domain::ik(const Constant& arm_c, const Constant&, const Constant& g,
                                           const Constant& p, std::uint64_t) const {
    std::optional<Constant> q;
    if (is_vector(g) && is_vector(p)) {
        const ArmSpec& a = arm(arm_c.name());
        const Vec2 target = to_vec(p) - to_vec(g);
        const bool reachable = geom::distance(target, a.base) <= a.reach;
        // The link must not pass through the object it reaches for.
        const bool approachable = geom::point_segment_distance(to_vec(p), a.base, target) - params_.object_radius >=
                                  params_.clearance - kEps;
        if (reachable && approachable && statically_free(a, target)) q = make_config(a.name, target);
    }
    return make_sequence(
        [q](std::size_t) -> std::optional<std::vector<Constant>> {
            if (!q) return std::nullopt;
            return std::vector<Constant>{*q};
        },
        1);
}

std::unique_ptr<OutputSequence> Domain::motions(const Constant& arm_c, const Constant& q1, const Constant& q2,
                                                std::uint64_t seed) const {
    if (!is_vector(q1) || !is_vector(q2)) return make_sequence([](std::size_t) { return std::nullopt; }, 0);
    const ArmSpec a = arm(arm_c.name());
    const Vec2 start = to_vec(q1);
    const Vec2 goal = to_vec(q2);
    const Domain* self = this;
    auto rng = std::make_shared<std::mt19937_64>(seed);
    auto path_free = [self, a](const std::vector<Vec2>& pts) {
        return std::all_of(pts.begin(), pts.end(), [&](Vec2 p) {
            return geom::distance(p, a.base) <= a.reach + kEps && self->statically_free(a, p);
        });
    };
    if (geom::distance(start, goal) < 1e-12) {
        auto path = make_path(a.name, {start, goal});
        return make_sequence([path](std::size_t) { return std::optional<std::vector<Constant>>({path}); }, 1);
    }
    const double spacing = params_.waypoint_spacing;
    const int attempts = params_.via_attempts;
    return make_sequence(
        [self, a, start, goal, rng, path_free, spacing, attempts](std::size_t k) -> std::optional<std::vector<Constant>> {
            if (k == 0) {
                auto straight = geom::densify(start, goal, spacing);
                if (path_free(straight)) return std::vector<Constant>{self->make_path(a.name, straight)};
            }
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (int i = 0; i < attempts; ++i) {
                const double r = a.reach * std::sqrt(unit(*rng));
                const double theta = 2.0 * std::numbers::pi * unit(*rng);
                const Vec2 via = a.base + Vec2{r * std::cos(theta), r * std::sin(theta)};
                auto pts = geom::densify_polyline({start, via, goal}, spacing);
                if (path_free(pts)) return std::vector<Constant>{self->make_path(a.name, pts)};
            }
            return std::nullopt;
        },
        static_cast<std::size_t>(params_.motion_draws));
}

// ---------------------------------------------------------------------------
// Problem construction

void Domain::build_problem() {
    const Scene& s = scene_;
    if (s.arms.empty()) throw ConfigurationError("scene needs at least one arm");
    std::set<std::string> names;
    for (const auto& a : s.arms) {
        if (a.name.empty() || !names.insert(a.name).second) throw ConfigurationError("duplicate arm name " + a.name);
        if (!(a.reach > 0.0) || !(a.speed > 0.0)) throw ConfigurationError("arm " + a.name + " needs reach, speed > 0");
    }
    for (const auto& o : s.objects) {
        if (o.name.empty() || !names.insert(o.name).second) throw ConfigurationError("duplicate name " + o.name);
    }
    for (const auto& p : s.placements) {
        if (p.name.empty() || !names.insert(p.name).second) throw ConfigurationError("duplicate name " + p.name);
    }
    for (const auto& o : s.obstacles) {
        if (!(o.radius > 0.0)) throw ConfigurationError("obstacle radius must be positive");
    }

    const bool stacking = std::any_of(s.placements.begin(), s.placements.end(),
                                      [](const PlacementSpec& p) { return !p.support.empty(); });
    const Domain* self = this;

    auto Arm = Fn{FunctionSymbol::predicate("Arm", "?arm")};
    auto Object = Fn{FunctionSymbol::predicate("Object", "?obj")};
    SymbolOptions conf_opts;
    conf_opts.test = [self](std::span<const Constant> x) { return self->conf_test(x[0], x[1]); };
    auto Conf = Fn{FunctionSymbol::predicate("Conf", "?arm ?q", conf_opts)};
    auto Placement = Fn{FunctionSymbol::predicate("Placement", "?obj ?p")};

    SymbolOptions fluent_arm{{Arm("?arm")}, {}, {}, {}, true};
    SymbolOptions fluent_obj{{Object("?obj")}, {}, {}, {}, true};
    auto At = Fn{FunctionSymbol::function("At", "?arm", Range::Object, fluent_arm)};
    auto Holding = Fn{FunctionSymbol::function("Holding", "?arm", Range::Object, fluent_arm)};
    auto HandFull = Fn{FunctionSymbol::predicate("HandFull", "?arm", fluent_arm)};
    auto Attached = Fn{FunctionSymbol::function("Attached", "?obj", Range::Object, fluent_obj)};
    auto Pose = Fn{FunctionSymbol::function("Pose", "?obj", Range::Object, fluent_obj)};

    SymbolOptions grasp_opts;
    grasp_opts.cond = {Arm("?arm"), Object("?obj")};
    grasp_opts.test = [self](std::span<const Constant> x) { return self->grasp_test(x[0], x[1], x[2]); };
    auto Grasp = Fn{FunctionSymbol::predicate("Grasp", "?arm ?obj ?g", grasp_opts)};
    SymbolOptions kin_opts;
    kin_opts.cond = {Conf("?arm", "?q"), Placement("?obj", "?p"), Grasp("?arm", "?obj", "?g")};
    kin_opts.test = [self](std::span<const Constant> x) { return self->kin_test(x[0], x[1], x[2], x[3], x[4]); };
    auto Kin = Fn{FunctionSymbol::predicate("Kin", "?arm ?q ?obj ?g ?p", kin_opts)};
    SymbolOptions motion_opts;
    motion_opts.cond = {Conf("?arm", "?q1"), Conf("?arm", "?q2")};
    motion_opts.test = [self](std::span<const Constant> x) { return self->motion_test(x[0], x[1], x[2], x[3]); };
    auto Motion = Fn{FunctionSymbol::predicate("Motion", "?arm ?q1 ?t ?q2", motion_opts)};

    SymbolOptions duration_opts;
    duration_opts.fn = [self](std::span<const Constant> x) { return Constant::number(self->duration(x[0])); };
    auto Duration = Fn{FunctionSymbol::function("Duration", "?t", Range::Numeric, duration_opts)};
    SymbolOptions obj_coll;
    obj_coll.test = [self](std::span<const Constant> x) { return self->obj_collision(x[0], x[1], x[2]); };
    auto ObjCollision = Fn{FunctionSymbol::predicate("ObjCollision", "?t ?g ?p", obj_coll)};
    SymbolOptions arm_coll;
    arm_coll.test = [self](std::span<const Constant> x) { return self->arm_collision(x[0], x[1], x[2], x[3]); };
    auto ArmCollision = Fn{FunctionSymbol::predicate("ArmCollision", "?t1 ?g1 ?t2 ?g2", arm_coll)};

    Fn Occupied, Supports;
    if (stacking) {
        Occupied = Fn{FunctionSymbol::predicate("Occupied", "?p", SymbolOptions{{}, {}, {}, {}, true})};
        Supports = Fn{FunctionSymbol::predicate("Supports", "?pb ?p")};
    }

    for (const auto& sp : {Arm, Object, Conf, Placement, At, Holding, HandFull, Attached, Pose, Grasp, Kin, Motion,
                           Duration, ObjCollision, ArmCollision, Occupied, Supports}) {
        if (sp.ptr) symbols_[sp.ptr->name()] = sp.ptr;
    }

    // Actions.
    std::vector<Condition> collision_cond;
    for (const auto& o : s.objects) {
        collision_cond.push_back(
            equals(ObjCollision("?t", Pose(Holding("?arm")), Pose(sym(o.name))), Constant::boolean(false)));
    }
    for (const auto& a : s.arms) {
        collision_cond.push_back(equals(
            ArmCollision("?t", Pose(Holding("?arm")), At(sym(a.name)), Pose(Holding(sym(a.name)))),
            Constant::boolean(false)));
    }
    DurativeSpec move_spec;
    move_spec.start_cond = {holds(Motion("?arm", "?q1", "?t", "?q2")), equals(At("?arm"), Term::param("?q1"))};
    move_spec.start_eff = {assign(At("?arm"), Term::param("?t"))};
    move_spec.over_cond = collision_cond;
    move_spec.end_eff = {assign(At("?arm"), Term::param("?q2"))};
    move_spec.duration = Duration("?t");
    auto move = Action::durative("move", "?arm ?q1 ?t ?q2", move_spec);

    const Constant none;
    std::vector<Condition> pick_cond = {holds(Kin("?arm", "?q", "?obj", "?g", "?p")), equals(Attached("?obj"), none),
                                        equals(Pose("?obj"), Term::param("?p")), equals(Holding("?arm"), none),
                                        equals(At("?arm"), Term::param("?q"))};
    std::vector<Effect> pick_eff = {assign(Holding("?arm"), Term::param("?obj")),
                                    assign(Pose("?obj"), Term::param("?g")),
                                    assign(Attached("?obj"), Term::param("?arm")),
                                    assign(HandFull("?arm"), Constant::boolean(true))};
    std::vector<Condition> place_cond = {holds(Kin("?arm", "?q", "?obj", "?g", "?p")),
                                         equals(Attached("?obj"), Term::param("?arm")),
                                         equals(Pose("?obj"), Term::param("?g")),
                                         equals(Holding("?arm"), Term::param("?obj")),
                                         equals(At("?arm"), Term::param("?q"))};
    std::vector<Effect> place_eff = {assign(Holding("?arm"), none), assign(Pose("?obj"), Term::param("?p")),
                                     assign(Attached("?obj"), none),
                                     assign(HandFull("?arm"), Constant::boolean(false))};
    std::string place_params = "?arm ?q ?obj ?g ?p";
    if (stacking) {
        pick_eff.push_back(assign(Occupied("?p"), Constant::boolean(false)));
        place_cond.push_back(holds(Supports("?pb", "?p")));
        place_cond.push_back(equals(Occupied("?pb"), Constant::boolean(true)));
        place_cond.push_back(equals(Occupied("?p"), Constant::boolean(false)));
        place_eff.push_back(assign(Occupied("?p"), Constant::boolean(true)));
        place_params += " ?pb";
    }
    auto pick = Action::instantaneous("pick", "?arm ?q ?obj ?g ?p", pick_cond, pick_eff);
    auto place = Action::instantaneous("place", place_params, place_cond, place_eff);

    // Streams.
    auto grasps_stream = Stream::make("grasps", Grasp.ptr, "?arm ?obj", [self](std::span<const Constant> x, std::uint64_t seed) {
        return self->grasps(x[0], x[1], seed);
    });
    auto ik_stream = Stream::make("ik_qs", Kin.ptr, "?arm ?obj ?g ?p", [self](std::span<const Constant> x, std::uint64_t seed) {
        return self->ik(x[0], x[1], x[2], x[3], seed);
    });
    auto motion_stream = Stream::make("motions", Motion.ptr, "?arm ?q1 ?q2",
                                      [self](std::span<const Constant> x, std::uint64_t seed) {
                                          return self->motions(x[0], x[1], x[2], seed);
                                      });

    // Initial state.
    State init;
    const Constant yes = Constant::boolean(true);
    auto fact = [&](const Fn& f, std::vector<Constant> args, const Constant& value) {
        init.assign(GroundAtom{f.get(), std::move(args)}, value);
    };
    for (const auto& a : s.arms) {
        const Vec2 h = a.home.value_or(a.base + Vec2{0.0, 0.4 * a.reach});
        if (geom::distance(h, a.base) > a.reach + kEps) throw ConfigurationError("home of " + a.name + " out of reach");
        Constant q = Constant::vector({h.x, h.y}, a.name, "home_" + a.name);
        homes_[a.name] = q;
        scene_vectors_.push_back(q);
        fact(Arm, {sym(a.name)}, yes);
        fact(Conf, {sym(a.name), q}, yes);
        fact(At, {sym(a.name)}, q);
    }
    if (stacking) fact(Occupied, {sym(kTable)}, yes);
    for (const auto& o : s.objects) {
        Constant p = Constant::vector({o.pose.x, o.pose.y}, kPlacementTag, "p_" + o.name);
        initial_poses_[o.name] = p;
        placements_["p_" + o.name] = p;
        scene_vectors_.push_back(p);
        fact(Object, {sym(o.name)}, yes);
        fact(Placement, {sym(o.name), p}, yes);
        fact(Pose, {sym(o.name)}, p);
        if (stacking) {
            fact(Occupied, {p}, yes);
            fact(Supports, {sym(kTable), p}, yes);
        }
    }
    for (const auto& p : s.placements) {
        auto it = std::find_if(s.objects.begin(), s.objects.end(),
                               [&](const ObjectSpec& o) { return o.name == p.object; });
        if (it == s.objects.end()) throw ConfigurationError("placement " + p.name + " names unknown object " + p.object);
        Constant c = Constant::vector({p.pose.x, p.pose.y}, p.support.empty() ? kPlacementTag : kLevelTag, p.name);
        placements_[p.name] = c;
        scene_vectors_.push_back(c);
        fact(Placement, {sym(p.object), c}, yes);
    }
    if (stacking) {
        for (const auto& p : s.placements) {
            Constant below = sym(kTable);
            if (!p.support.empty()) {
                auto it = placements_.find(p.support);
                if (it == placements_.end()) throw ConfigurationError("unknown support " + p.support);
                below = it->second;
            }
            fact(Supports, {below, placements_.at(p.name)}, yes);
        }
    }

    // Goal.
    auto resolve = [&](const std::string& name) -> Constant {
        if (name == "True") return Constant::boolean(true);
        if (name == "False") return Constant::boolean(false);
        if (name == "None" || name.empty()) return Constant::none();
        if (auto it = placements_.find(name); it != placements_.end()) return it->second;
        for (const auto& [arm, q] : homes_) {
            if (q.name() == name) return q;
        }
        if (names.count(name)) return sym(name);
        throw ConfigurationError("unknown goal constant " + name);
    };
    std::vector<Condition> goal;
    for (const auto& g : s.goal) {
        auto it = symbols_.find(g.fn);
        if (it == symbols_.end()) throw ConfigurationError("unknown goal function " + g.fn);
        if (g.args.size() != it->second->arity()) throw ConfigurationError("wrong arity in goal " + g.fn);
        std::vector<Term> args;
        for (const auto& a : g.args) args.push_back(resolve(a));
        goal.push_back(equals(it->second->apply(std::move(args)), resolve(g.value)));
    }

    problem_.name = s.name;
    problem_.initial = std::move(init);
    problem_.goal = std::move(goal);
    problem_.actions = {move, pick, place};
    problem_.streams = {grasps_stream, ik_stream, motion_stream};
    problem_.seed = s.seed;
}

}  // namespace tempo::bench
