#pragma once

#include <stdexcept>
#include <string>

namespace prepay {

// Bad user input: malformed files, violated preconditions, inconsistent config.
class InputError : public std::runtime_error {
   public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed (root not bracketed, optimizer did not
// converge, NaN in a simulated path, ...).
class NumericalError : public std::runtime_error {
   public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Throws InputError(msg) when cond is false.
void require(bool cond, const std::string& msg);

}  // namespace prepay
