#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tempo/bench.hpp"
#include "tempo/engine.hpp"
#include "tempo/io.hpp"

namespace py = pybind11;
using namespace tempo;

namespace {

bench::Scene scene_of(const std::string& task, std::uint64_t seed, const std::string& scene_json) {
    if (!scene_json.empty()) return io::scene_from_json(scene_json);
    return bench::task(task, seed);
}

// Best schedule as JSON plus the makespans of every emitted solution.
py::dict solve_scene(const std::string& task, const std::string& algorithm, double budget, std::uint64_t seed,
               const std::string& scene_json, int episodes, bool optimal) {
    const bench::Scene scene = scene_of(task, seed, scene_json);
    auto domain = bench::Domain::build(scene);
    AnytimeOptions options;
    options.max_episodes = episodes;
    if (optimal) options.engine.schedule.search.mode = SearchMode::Blind;
    std::vector<Emission> emissions;
    {
        py::gil_scoped_release release;
        emissions = anytime_solve(domain->problem(), budget, parse_algorithm(algorithm), options);
    }
    py::dict out;
    out["success"] = !emissions.empty();
    std::vector<double> makespans, times;
    for (const auto& e : emissions) {
        makespans.push_back(e.solution.makespan);
        times.push_back(e.time_s);
    }
    out["makespans"] = makespans;
    out["times"] = times;
    out["schedule"] = emissions.empty() ? py::object(py::none())
                                        : py::object(py::str(io::schedule_to_json(emissions.back().solution.schedule)));
    return out;
}

py::tuple validate_text(const std::string& task, const std::string& schedule_json, std::uint64_t seed,
                   const std::string& scene_json) {
    auto domain = bench::Domain::build(scene_of(task, seed, scene_json));
    const Schedule s = io::schedule_from_json(schedule_json, *domain);
    const auto report = validate_schedule(domain->problem(), s);
    return py::make_tuple(report.ok, report.message);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Temporal task and motion planner for a planar two-arm desk domain";

    py::register_exception<io::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);

    m.def("solve", &solve_scene, py::arg("task") = "problem1", py::arg("algorithm") = "lazy", py::arg("budget") = 5.0,
          py::arg("seed") = 0, py::arg("scene_json") = "", py::arg("episodes") = 3, py::arg("optimal") = false);
    m.def("validate", &validate_text, py::arg("task"), py::arg("schedule_json"), py::arg("seed") = 0,
          py::arg("scene_json") = "");
    m.def("scene_json", [](const std::string& task, std::uint64_t seed) {
        return io::scene_to_json(bench::task(task, seed));
    }, py::arg("task"), py::arg("seed") = 0);
    m.def("gantt", [](const std::string& task, const std::string& schedule_json, std::uint64_t seed) {
        auto domain = bench::Domain::build(bench::task(task, seed));
        return io::gantt(io::schedule_from_json(schedule_json, *domain), *domain);
    }, py::arg("task"), py::arg("schedule_json"), py::arg("seed") = 0);
    m.def("fixture_names", &bench::fixture_names);
    m.def("algorithms", [] { return std::vector<std::string>{"sequential", "hierarchical", "eager", "lazy"}; });
}
