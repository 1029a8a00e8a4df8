#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace thief {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, vectors, configs).
struct ValidationError : Error {
    using Error::Error;
};

// Numerical failure: singular systems, non-positive-definite matrices.
struct NumericError : Error {
    using Error::Error;
};

// Concatenates the arguments through an ostringstream.
template <typename... Ts>
std::string cat(Ts&&... parts) {
    std::ostringstream oss;
    (oss << ... << parts);
    return oss.str();
}

}  // namespace thief
