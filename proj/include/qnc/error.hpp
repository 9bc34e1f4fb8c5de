#pragma once

#include <stdexcept>
#include <string>

namespace qnc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameters : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Raised when a value entering an edge quantizer leaves [-q_max, q_max].
class OverflowViolation : public Error {
public:
    using Error::Error;
};

/// Combinatorial enumeration would exceed its configured budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class HypothesisViolated : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

}  // namespace qnc
