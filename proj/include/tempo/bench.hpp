#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tempo/geometry.hpp"
#include "tempo/model.hpp"

namespace tempo::bench {

using geom::Vec2;

struct ArmSpec {
    std::string name;
    Vec2 base;
    double reach = 0.8;
    double speed = 0.5;  // m/s
    std::optional<Vec2> home;
};

struct ObjectSpec {
    std::string name;
    Vec2 pose;
};

// Extra placement poses (targets). `support` names the placement an object
// must already occupy before this one can be used; stacked placements are
// raised above the desk and never block the arms.
struct PlacementSpec {
    std::string name;
    std::string object;
    Vec2 pose;
    std::string support;
};

struct ObstacleSpec {
    Vec2 center;
    double radius = 0.1;
};

struct GoalSpec {
    std::string fn;
    std::vector<std::string> args;
    std::string value;
};

struct Scene {
    std::string name;
    std::vector<ArmSpec> arms;
    std::vector<ObjectSpec> objects;
    std::vector<PlacementSpec> placements;
    std::vector<ObstacleSpec> obstacles;
    std::vector<GoalSpec> goal;
    std::uint64_t seed = 0;
};

struct Params {
    double clearance = 0.05;
    double object_radius = 0.1;
    double grasp_radius = 0.15;
    int grasp_count = 8;
    double waypoint_spacing = 0.05;
    int motion_draws = 8;
    int via_attempts = 50;
};

struct Body;

// Planar bimanual domain: arms are segments from a fixed base to a point end
// effector; objects are discs.
class Domain {
public:
    static std::shared_ptr<Domain> build(const Scene& scene, const Params& params = {});

    const Scene& scene() const { return scene_; }
    const Params& params() const { return params_; }
    const Problem& problem() const { return problem_; }

    const ArmSpec& arm(const std::string& name) const;
    Constant home(const std::string& arm) const;
    Constant initial_pose(const std::string& object) const;
    Constant placement(const std::string& name) const;
    // Scene-defined vector constants (homes and placements).
    const std::vector<Constant>& scene_vectors() const { return scene_vectors_; }

    // Symbols, for tests and serialization.
    SymbolPtr symbol(const std::string& name) const;

    bool obj_collision(const Constant& t, const Constant& g, const Constant& p) const;
    bool arm_collision(const Constant& t1, const Constant& g1, const Constant& s2, const Constant& g2) const;
    double duration(const Constant& t) const;
    bool grasp_test(const Constant& arm, const Constant& obj, const Constant& g) const;
    bool kin_test(const Constant& arm, const Constant& q, const Constant& obj, const Constant& g,
                  const Constant& p) const;
    bool motion_test(const Constant& arm, const Constant& q1, const Constant& t, const Constant& q2) const;
    bool conf_test(const Constant& arm, const Constant& q) const;
    // Link of `arm` at `q` is clear of every static obstacle.
    bool statically_free(const ArmSpec& arm, Vec2 q) const;

    std::unique_ptr<OutputSequence> grasps(const Constant& arm, const Constant& obj, std::uint64_t seed) const;
    std::unique_ptr<OutputSequence> ik(const Constant& arm, const Constant& obj, const Constant& g,
                                       const Constant& p, std::uint64_t seed) const;
    std::unique_ptr<OutputSequence> motions(const Constant& arm, const Constant& q1, const Constant& q2,
                                            std::uint64_t seed) const;

    Constant make_config(const std::string& arm, Vec2 q) const;
    Constant make_path(const std::string& arm, const std::vector<Vec2>& waypoints) const;

private:
    Domain() = default;
    void build_problem();
    std::vector<Body> bodies(const Constant& s, const Constant& g) const;
    bool bodies_collide(const std::vector<Body>& a, const std::vector<Body>& b) const;

    Scene scene_;
    Params params_;
    Problem problem_;
    std::map<std::string, SymbolPtr> symbols_;
    std::map<std::string, Constant> homes_;
    std::map<std::string, Constant> initial_poses_;
    std::map<std::string, Constant> placements_;
    std::vector<Constant> scene_vectors_;
    std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

Vec2 to_vec(const Constant& c);

// Fixtures: problem1 (parallel), problem2 (serial corridor), problem3 (retreat).
Scene fixture(const std::string& name);
std::vector<std::string> fixture_names();

// Seeded random scenes with two arms and n objects.
Scene hold_assigned(int n, std::uint64_t seed);
// Each arm must hold some object; one object is reachable by a single arm.
Scene hold_any(int n, std::uint64_t seed);
Scene pack(int n, std::uint64_t seed);
Scene stack(int n, std::uint64_t seed);
// "hold_any(2)", "problem1", ... Throws ConfigurationError for unknown names.
Scene task(const std::string& name, std::uint64_t seed);

}  // namespace tempo::bench
