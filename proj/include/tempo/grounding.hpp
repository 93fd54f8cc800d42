#pragma once

#include <map>
#include <memory>
#include <vector>

#include "tempo/model.hpp"

namespace tempo {

// Atoms over static symbols declared True in a state, grouped by symbol in
// declaration order.
class FactIndex {
public:
    explicit FactIndex(const State& state);
    const std::vector<const GroundAtom*>& facts(const FunctionSymbol* symbol) const;

private:
    std::map<const FunctionSymbol*, std::vector<const GroundAtom*>> by_symbol_;
    std::shared_ptr<const StaticFacts> keep_alive_;
};

// Enumerates bindings of `params` that make every atom in `atoms` a declared
// True static fact. Parameters not mentioned by any atom range over
// `fallback` constants. Order follows fact declaration order.
std::vector<std::vector<Constant>> join_atoms(const FactIndex& index, const std::vector<std::string>& params,
                                              const std::vector<Term>& atoms,
                                              const std::vector<Constant>& fallback);

// Every binding of each action's parameters whose static conditions hold.
// Fluent conditions are left to search.
std::vector<InstancePtr> instantiate_actions(const State& state, const std::vector<ActionPtr>& actions);

struct StreamInstance {
    StreamPtr stream;
    std::vector<Constant> inputs;
    int call_count = 0;
    bool exhausted = false;

    std::string str() const;
};

using StreamInstancePtr = std::shared_ptr<StreamInstance>;

// Remembers stream instances so repeated instantiation returns the same
// objects (with their call counts).
class StreamRegistry {
public:
    StreamInstancePtr get(const StreamPtr& stream, const std::vector<Constant>& inputs);
    std::size_t size() const { return order_.size(); }

private:
    std::map<std::pair<const Stream*, std::vector<Constant>>, StreamInstancePtr> table_;
    std::vector<StreamInstancePtr> order_;
};

std::vector<StreamInstancePtr> instantiate_streams(const State& state, const std::vector<StreamPtr>& streams,
                                                   StreamRegistry& registry);

}  // namespace tempo
