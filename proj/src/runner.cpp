#include "tempo/runner.hpp"

#include <atomic>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tempo/io.hpp"

namespace tempo::bench {

using nlohmann::json;

Suite suite_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw io::ParseError(e.what());
    }
    if (!j.is_object() || !j.contains("tasks")) throw io::ParseError("suite needs \"tasks\"");
    Suite s;
    try {
        s.tasks = j.at("tasks").get<std::vector<std::string>>();
        const auto algorithms =
            j.value("algorithms", std::vector<std::string>{"sequential", "hierarchical", "eager", "lazy"});
        for (const auto& a : algorithms) s.algorithms.push_back(parse_algorithm(a));
        if (!j.contains("seeds")) {
            s.seeds = {0};
        } else if (j["seeds"].is_number_integer()) {
            const auto n = j["seeds"].get<std::uint64_t>();
            for (std::uint64_t k = 0; k < n; ++k) s.seeds.push_back(k);
        } else {
            s.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        }
        s.budget_s = j.value("budget", s.budget_s);
        s.episodes = j.value("episodes", s.episodes);
    } catch (const json::exception& e) {
        throw io::ParseError(std::string("bad suite: ") + e.what());
    } catch (const ConfigurationError& e) {
        throw io::ParseError(e.what());
    }
    return s;
}

RunRecord run_scene(const Scene& scene, Algorithm algorithm, double budget_s, const AnytimeOptions& options) {
    RunRecord r;
    r.task = scene.name;
    r.algorithm = to_string(algorithm);
    r.seed = scene.seed;
    auto domain = Domain::build(scene);
    const auto emissions = anytime_solve(domain->problem(), budget_s, algorithm, options);
    if (emissions.empty()) return r;
    r.success = true;
    r.first_time_s = emissions.front().time_s;
    r.first_makespan_s = emissions.front().solution.makespan;
    r.final_makespan_s = emissions.back().solution.makespan;
    r.solutions = static_cast<int>(emissions.size());
    return r;
}

std::vector<RunRecord> run_suite(const Suite& suite, int workers,
                                 const std::function<void(const RunRecord&)>& on_record) {
    struct Job {
        std::string task;
        Algorithm algorithm;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& t : suite.tasks) {
        for (auto seed : suite.seeds) {
            for (auto a : suite.algorithms) jobs.push_back({t, a, seed});
        }
    }
    std::vector<RunRecord> records(jobs.size());
    AnytimeOptions options;
    options.max_episodes = suite.episodes;
    std::atomic<std::size_t> next{0};
    std::mutex report;
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            Scene scene = task(job.task, job.seed);
            scene.name = job.task;
            records[i] = run_scene(scene, job.algorithm, suite.budget_s, options);
            if (on_record) {
                std::lock_guard lock(report);
                on_record(records[i]);
            }
        }
    };
    const int n = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return records;
}

std::string csv_header() {
    return "task,algorithm,seed,success,first_time_s,first_makespan_s,final_makespan_s,solutions";
}

std::string to_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os << csv_header() << "\n" << std::setprecision(17);
    for (const auto& r : records) {
        os << '"' << r.task << '"' << ',' << r.algorithm << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',';
        if (r.success) {
            os << r.first_time_s << ',' << r.first_makespan_s << ',' << r.final_makespan_s;
        } else {
            os << ",,";
        }
        os << ',' << r.solutions << "\n";
    }
    return os.str();
}

std::string summary_table(const std::vector<RunRecord>& records) {
    struct Agg {
        int runs = 0, ok = 0;
        double time = 0, first = 0, final = 0;
    };
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, Agg> aggs;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.task, r.algorithm);
        if (!aggs.count(key)) order.push_back(key);
        Agg& a = aggs[key];
        ++a.runs;
        if (!r.success) continue;
        ++a.ok;
        a.time += r.first_time_s;
        a.first += r.first_makespan_s;
        a.final += r.final_makespan_s;
    }
    std::ostringstream os;
    os << std::left << std::setw(18) << "task" << std::setw(14) << "algorithm" << std::right << std::setw(9)
       << "success" << std::setw(10) << "time_s" << std::setw(10) << "t1_s" << std::setw(10) << "tinf_s" << "\n";
    os << std::fixed << std::setprecision(2);
    for (const auto& key : order) {
        const Agg& a = aggs[key];
        os << std::left << std::setw(18) << key.first << std::setw(14) << key.second << std::right << std::setw(8)
           << 100.0 * a.ok / a.runs << "%";
        if (a.ok > 0) {
            os << std::setw(10) << a.time / a.ok << std::setw(10) << a.first / a.ok << std::setw(10) << a.final / a.ok;
        } else {
            os << std::setw(10) << "-" << std::setw(10) << "-" << std::setw(10) << "-";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace tempo::bench
