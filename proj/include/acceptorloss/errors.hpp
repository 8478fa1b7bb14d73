// errors.hpp — exception taxonomy shared by the toolkit
//
// ValidationError: the inputs violate a documented precondition or schema.
// NumericalError:  the inputs were acceptable but the computation could not
//                  deliver a trustworthy result.
// The CLI maps these to exit codes 2 and 3 respectively.

#pragma once

#include <stdexcept>
#include <string>

namespace acceptorloss {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// -- validation -------------------------------------------------------------

class SchemaError : public ValidationError {
public:
    explicit SchemaError(const std::string& msg, long line = -1)
        : ValidationError(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class NonMonotonicFrequency : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NegativeWeight : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidStrainCell : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ZeroTemperatureSaturation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InsufficientSpan : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DegenerateFit : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// -- numerical --------------------------------------------------------------

class DegenerateSteadyState : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FitDiverged : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace acceptorloss
