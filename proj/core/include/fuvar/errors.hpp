#pragma once

#include <stdexcept>
#include <string>

namespace fuvar {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or size disagreement between inputs.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Invalid argument values (out-of-range parameters, violated invariants).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Divergence, singularity, or non-finite values produced during a solve.
class NumericalError : public Error {
public:
    using Error::Error;
};

// File and format problems, with a code distinguishing the failure mode.
class IoError : public Error {
public:
    enum class Code {
        open_failed,
        bad_header,
        size_mismatch,
        non_finite,
        bad_value,
    };

    IoError(Code code, const std::string& what) : Error(what), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

} // namespace fuvar
