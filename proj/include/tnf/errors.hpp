#pragma once

#include <stdexcept>
#include <string>

namespace tnf {

/// Malformed input: dimension mismatches, bad caps, order violations.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Mathematical failure: resonant divisor hit where a nonresonant one was
/// required, missing proportionality witness, unsupported configuration.
class math_error : public std::runtime_error {
public:
    explicit math_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tnf
