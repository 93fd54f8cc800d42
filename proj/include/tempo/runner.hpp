#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tempo/bench.hpp"
#include "tempo/engine.hpp"

namespace tempo::bench {

struct RunRecord {
    std::string task;
    std::string algorithm;
    std::uint64_t seed = 0;
    bool success = false;
    double first_time_s = 0.0;
    double first_makespan_s = 0.0;
    double final_makespan_s = 0.0;
    int solutions = 0;
};

struct Suite {
    std::vector<std::string> tasks;
    std::vector<Algorithm> algorithms;
    std::vector<std::uint64_t> seeds;
    double budget_s = 60.0;
    int episodes = 3;
};

// {"tasks": [...], "algorithms": [...], "seeds": n | [..], "budget": s, "episodes": k}
Suite suite_from_json(const std::string& text);

RunRecord run_scene(const Scene& scene, Algorithm algorithm, double budget_s, const AnytimeOptions& options = {});

// Runs every task x algorithm x seed on `workers` threads; records come back in
// suite order.
std::vector<RunRecord> run_suite(const Suite& suite, int workers = 1,
                                 const std::function<void(const RunRecord&)>& on_record = {});

std::string csv_header();
std::string to_csv(const std::vector<RunRecord>& records);
// Success %, mean first time, mean first and final makespan per task and
// algorithm. Means are over successful runs.
std::string summary_table(const std::vector<RunRecord>& records);

}  // namespace tempo::bench
