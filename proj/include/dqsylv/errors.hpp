#pragma once

#include <stdexcept>
#include <string>

namespace dqsylv {

/// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A dense kernel failed, or a computed quantity lies where the theory says it cannot.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text or binary input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string shape_str(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace dqsylv
