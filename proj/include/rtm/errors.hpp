#pragma once

#include <stdexcept>
#include <string>

namespace rtm {

// Violated mathematical precondition (bad arguments, hypothesis of a bound
// not satisfied, ...). Maps to CLI exit code 2.
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

// Resource cap exceeded (dense storage, enumeration size). Exit code 3.
class cap_exceeded : public std::runtime_error {
public:
    explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rtm
