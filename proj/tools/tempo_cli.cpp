#include <cstdio>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "tempo/bench.hpp"
#include "tempo/engine.hpp"
#include "tempo/io.hpp"
#include "tempo/runner.hpp"

using namespace tempo;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInvalid = 2;

struct SolveArgs {
    std::string scene;
    std::string task;
    std::string algorithm = "lazy";
    double budget = 60.0;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool gantt = true;
    bool optimal = false;
    int episodes = 3;
};

struct BenchArgs {
    std::string suite;
    std::optional<double> budget;
    std::optional<int> repeats;
    std::string out;
    int workers = 1;
};

struct ValidateArgs {
    std::string scene;
    std::string task;
    std::string schedule;
};

bench::Scene load(const std::string& file, const std::string& task, std::optional<std::uint64_t> seed) {
    bench::Scene scene;
    if (!task.empty()) {
        scene = bench::task(task, seed.value_or(0));
    } else {
        scene = io::load_scene(file);
        if (seed) scene.seed = *seed;
    }
    return scene;
}

int cmd_solve(const SolveArgs& args) {
    const Algorithm algorithm = parse_algorithm(args.algorithm);
    const bench::Scene scene = load(args.scene, args.task, args.seed);
    auto domain = bench::Domain::build(scene);

    AnytimeOptions options;
    options.max_episodes = args.episodes;
    if (args.optimal) options.engine.schedule.search.mode = SearchMode::Blind;
    auto report = [](const Emission& e) {
        std::printf("solution %d: makespan %.6f s at %.3f s\n", e.episode + 1, e.solution.makespan, e.time_s);
    };
    const auto emissions = anytime_solve(domain->problem(), args.budget, algorithm, options, report);
    if (emissions.empty()) {
        std::cerr << "no solution within " << args.budget << " s\n";
        return kFailed;
    }
    const Schedule& best = emissions.back().solution.schedule;
    if (args.gantt) std::cout << "\n" << io::gantt(best, *domain);
    std::cout << "\n" << best.str();
    if (!args.out.empty()) io::write_file(args.out, io::schedule_to_json(best));
    return kOk;
}

int cmd_bench(const BenchArgs& args) {
    bench::Suite suite = bench::suite_from_json(io::read_file(args.suite));
    if (args.budget) suite.budget_s = *args.budget;
    if (args.repeats) {
        suite.seeds.clear();
        for (int k = 0; k < *args.repeats; ++k) suite.seeds.push_back(static_cast<std::uint64_t>(k));
    }
    const auto records = bench::run_suite(suite, args.workers, [](const bench::RunRecord& r) {
        std::fprintf(stderr, "%s %s seed=%llu %s\n", r.task.c_str(), r.algorithm.c_str(),
                     static_cast<unsigned long long>(r.seed), r.success ? "ok" : "failed");
    });
    if (!args.out.empty()) io::write_file(args.out, bench::to_csv(records));
    std::cout << bench::summary_table(records);
    return kOk;
}

int cmd_validate(const ValidateArgs& args) {
    const bench::Scene scene = load(args.scene, args.task, std::nullopt);
    auto domain = bench::Domain::build(scene);
    const Schedule schedule = io::load_schedule(args.schedule, *domain);
    const ValidationReport report = validate_schedule(domain->problem(), schedule);
    if (!report.ok) {
        std::cout << "invalid: " << report.message << "\n";
        return kFailed;
    }
    std::cout << "valid, makespan " << schedule.makespan() << " s\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal task and motion planner for a planar two-arm desk domain"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Plan a scene and print the schedule");
    s->add_option("scene", solve.scene, "Scene JSON file");
    s->add_option("--task", solve.task, "Built-in scene instead of a file (problem1, hold_any(3), ...)");
    s->add_option("-a,--algorithm", solve.algorithm, "sequential, hierarchical, eager or lazy")->capture_default_str();
    s->add_option("-b,--budget", solve.budget, "Wall-clock budget in seconds")->capture_default_str();
    s->add_option("--seed", solve.seed, "Override the scene seed");
    s->add_option("-o,--out", solve.out, "Write the best schedule as JSON");
    s->add_flag("--gantt,!--no-gantt", solve.gantt, "Print an ASCII Gantt chart");
    s->add_flag("--optimal", solve.optimal, "Blind search when scheduling (exact makespan)");
    s->add_option("--episodes", solve.episodes, "Anytime episodes")->capture_default_str();

    BenchArgs bench_args;
    bench_args.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    auto* b = app.add_subcommand("bench", "Run a benchmark suite");
    b->add_option("suite", bench_args.suite, "Suite JSON file")->required();
    b->add_option("-b,--budget", bench_args.budget, "Per-run budget in seconds");
    b->add_option("-r,--repeats", bench_args.repeats, "Seeds 0..n-1 per task");
    b->add_option("-o,--out", bench_args.out, "CSV output");
    b->add_option("-j,--workers", bench_args.workers, "Parallel runs")->capture_default_str();

    ValidateArgs validate;
    auto* v = app.add_subcommand("validate", "Check a schedule against a scene");
    v->add_option("scene", validate.scene, "Scene JSON file");
    v->add_option("schedule", validate.schedule, "Schedule JSON file");
    v->add_option("--task", validate.task, "Built-in scene instead of a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (s->parsed()) {
            if (solve.scene.empty() == solve.task.empty()) {
                std::cerr << "solve needs exactly one of a scene file or --task\n";
                return kInvalid;
            }
            return cmd_solve(solve);
        }
        if (b->parsed()) return cmd_bench(bench_args);
        if (v->parsed()) {
            if (!validate.task.empty() && validate.schedule.empty()) std::swap(validate.scene, validate.schedule);
            if (validate.schedule.empty() || validate.scene.empty() == validate.task.empty()) {
                std::cerr << "validate needs a schedule and exactly one of a scene file or --task\n";
                return kInvalid;
            }
            return cmd_validate(validate);
        }
    } catch (const io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const ConfigurationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kInvalid;
}
