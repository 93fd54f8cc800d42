#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tempo/model.hpp"
#include "tempo/search.hpp"
#include "tempo/temporal.hpp"

namespace tempo {

// One recorded stream output s(x)(y).
struct StreamOutput {
    StreamPtr stream;
    std::vector<Constant> inputs;
    std::vector<Constant> outputs;

    std::vector<GroundAtom> certified() const { return stream->certified_atoms(inputs, outputs); }
    std::string str() const;
};

using StreamPlan = std::vector<StreamOutput>;

struct SkeletonPair {
    StreamPlan stream_plan;
    Schedule skeleton;
    std::string signature;
};

using StreamKey = std::pair<const Stream*, std::vector<Constant>>;

std::uint64_t stream_seed(std::uint64_t seed, const Stream& stream, std::span<const Constant> inputs);

// Real generators, one cursor per stream instance, with every output kept so
// later passes can replay them.
class GeneratorPool {
public:
    explicit GeneratorPool(std::uint64_t seed) : seed_(seed) {}

    // The k-th output of s(x), drawing from the generator as needed.
    std::optional<std::vector<Constant>> output(const StreamPtr& stream, const std::vector<Constant>& inputs,
                                                std::size_t k);
    // A fresh output of s(x).
    std::optional<std::vector<Constant>> draw(const StreamPtr& stream, const std::vector<Constant>& inputs);
    std::size_t draws(const StreamPtr& stream, const std::vector<Constant>& inputs) const;
    bool exhausted(const StreamPtr& stream, const std::vector<Constant>& inputs) const;
    const std::vector<std::string>& errors() const { return errors_; }

private:
    struct Cursor {
        std::unique_ptr<OutputSequence> sequence;
        std::vector<std::vector<Constant>> outputs;
        bool done = false;
    };
    Cursor& cursor(const StreamPtr& stream, const std::vector<Constant>& inputs);
    bool pull(const StreamPtr& stream, Cursor& c);

    std::uint64_t seed_;
    std::map<StreamKey, Cursor> cursors_;
    std::vector<std::string> errors_;
};

// Chooses what a stream instance yields on its `call`-th invocation within
// one eager pass; an empty batch exhausts the instance for that pass.
using OutputPolicy = std::function<std::vector<std::vector<Constant>>(
    const StreamPtr& stream, const std::vector<Constant>& inputs, std::size_t call)>;

// One fresh output per call.
OutputPolicy real_outputs(GeneratorPool& pool);

// Counters for placeholder names ("@t1", "@g2", ...), shared by every pass of
// one lazy episode so names stay unique.
class PlaceholderNames {
public:
    Constant make(const std::string& param, const std::string& origin);

private:
    std::map<std::string, int> counters_;
};

// On its first call an instance yields every output already drawn for it by
// skeleton binding, or one tuple of fresh placeholders if nothing was drawn
// yet and the generator is not spent; later calls yield nothing.
OutputPolicy lazy_generator(GeneratorPool& pool, PlaceholderNames& names);

struct EagerOutcome {
    bool solved = false;
    bool timed_out = false;
    StreamPlan stream_plan;
    Schedule schedule;
    State augmented;
    std::size_t rounds = 0;
};

// With `settle_real`, outputs free of placeholders unlock further stream
// calls within the same round, so each round adds one level of placeholders.
EagerOutcome eager_stream(const Problem& problem, const OutputPolicy& policy, const ScheduleOptions& options,
                          Clock::time_point deadline, bool settle_real = false);

// Stream-certified static conditions required by the schedule and goal that
// mention a lazy constant, or (with `initial`) any constant absent from it,
// closed under the domain conditions of the certified symbols.
std::vector<Condition> preimage(const Schedule& schedule, const std::vector<Condition>& goal,
                                const std::vector<StreamPtr>& streams, const State* initial = nullptr);

// Minimal ordered subsequence of `all` producing every non-initial constant in
// `targets`, including producers of their inputs.
StreamPlan retrace_streams(const State& initial, const StreamPlan& all, const std::vector<Condition>& targets);

std::string skeleton_signature(const SkeletonPair& pair);

// Stuck: the attempt drew no fresh sample, so repeating it cannot help.
enum class BindFailure { None, Exhausted, Invalid, Stuck };

struct BindOutcome {
    bool ok = false;
    BindFailure failure = BindFailure::None;
    StreamPlan stream_plan;
    Schedule schedule;
    std::string reason;
};

// Draws concrete values for the skeleton's placeholders, re-orders the bound
// actions for minimum makespan and validates the result. A stream instance
// with no fresh sample left reuses its latest output.
BindOutcome bind_skeleton(const Problem& problem, const SkeletonPair& pair, GeneratorPool& pool,
                          const ScheduleOptions& options, Clock::time_point deadline);

enum class Algorithm { Sequential, Hierarchical, Eager, Lazy };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

struct EngineOptions {
    ScheduleOptions schedule;
    int hierarchical_draws = 10;
    // Restricted reordering after binding runs blind up to this many
    // compiled steps and weighted (w = 1) beyond.
    std::size_t blind_reorder_limit = 16;
};

struct Solution {
    StreamPlan stream_plan;
    Schedule schedule;
    double makespan = 0.0;
};

struct SolveOutcome {
    std::optional<Solution> solution;
    std::string message;
    std::size_t iterations = 0;
    std::size_t skeletons = 0;
    std::size_t bindings = 0;
};

SolveOutcome eager_solve(const Problem& problem, const EngineOptions& options, Clock::time_point deadline);
SolveOutcome lazy_stream(const Problem& problem, const EngineOptions& options, Clock::time_point deadline);
SolveOutcome hierarchical_stream(const Problem& problem, const EngineOptions& options, Clock::time_point deadline);
SolveOutcome sequential_stream(const Problem& problem, const EngineOptions& options, Clock::time_point deadline);
SolveOutcome solve(const Problem& problem, Algorithm algorithm, const EngineOptions& options,
                   Clock::time_point deadline);

struct Emission {
    Solution solution;
    double time_s = 0.0;
    int episode = 0;
};

struct AnytimeOptions {
    EngineOptions engine;
    int max_episodes = 3;
};

// Repeated episodes with seeds seed, seed+1, ...; reports each solution that
// strictly improves the incumbent makespan.
std::vector<Emission> anytime_solve(const Problem& problem, double budget_s, Algorithm algorithm,
                                    const AnytimeOptions& options = {},
                                    const std::function<void(const Emission&)>& on_emit = {});

}  // namespace tempo
