#pragma once

#include <stdexcept>
#include <string>

namespace mumford {

// Malformed textual/JSON input.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation ran out of known p-adic digits. Retrying with a larger
// working precision is usually the right response.
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

// Domain violations: division by zero, non-hyperbolic input where a
// hyperbolic matrix is required, singular matrices, and the like.
class math_error : public std::runtime_error {
public:
    explicit math_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mumford
