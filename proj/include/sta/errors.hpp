#pragma once

#include <stdexcept>

namespace sta {

// Invalid parameters, malformed files, violated preconditions.
struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation that started out valid broke down along the way
// (norm drift, ODE breakdown, support escaping the grid, ...).
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A protocol file lacks a section required by the requested command.
struct MissingSection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sta
