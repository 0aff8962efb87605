#pragma once

#include <stdexcept>
#include <string>

namespace discrim {

// Error categories shared with the C API status codes (see include/discrim.h).
enum class ErrorCode : int {
    Domain = 1,      // argument outside an operation's domain
    Range = 2,       // (n, m) fails the scan-window inequalities
    NoCase = 3,      // modulus matches no construction case
    Exhausted = 4,   // search completed without finding a witness
    Budget = 5,      // work estimate exceeds the configured budget
    Io = 6,          // checkpoint or file problem
    BadArg = 7,      // malformed call (null pointer, bad enum)
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace discrim
