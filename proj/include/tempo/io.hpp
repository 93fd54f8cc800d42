#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tempo/bench.hpp"
#include "tempo/model.hpp"

namespace tempo::io {

// Malformed documents (bad JSON, missing fields, unknown names).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string scene_to_json(const bench::Scene& scene);
bench::Scene scene_from_json(const std::string& text);
bench::Scene load_scene(const std::string& path);

// Vectors and paths are written with their coordinates. On reading, those
// matching a scene vector (same tag and values) become that constant; the
// rest are shared within the document by value.
std::string schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const std::string& text, const bench::Domain& domain);
Schedule load_schedule(const std::string& path, const bench::Domain& domain);

// One row per arm at `resolution` seconds per column; each bar is filled with
// the first letter of its action.
std::string gantt(const Schedule& schedule, const bench::Domain& domain, double resolution = 0.1);

void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace tempo::io
