#pragma once

#include <stdexcept>
#include <string>

namespace tempo {

struct MalformedTermError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllFormedActionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllFormedPlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stream plan refers to a constant that nothing produces.
struct InconsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace tempo
