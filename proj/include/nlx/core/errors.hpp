#pragma once

#include <stdexcept>
#include <string>

namespace nlx {

// Precondition or schema violation: the inputs do not describe a valid problem.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The inputs are well formed but the numerical method refuses to run on them
// (stability bound, truncation saturation, non-finite state).
class NumericRefusal : public std::runtime_error {
public:
    explicit NumericRefusal(const std::string& what, double suggestion = 0.0)
        : std::runtime_error(what), suggestion_(suggestion) {}

    // A parameter value that would be accepted (e.g. a time step), or 0.
    [[nodiscard]] double suggestion() const noexcept { return suggestion_; }

private:
    double suggestion_;
};

}  // namespace nlx
