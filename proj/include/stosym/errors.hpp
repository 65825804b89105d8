#pragma once

#include <stdexcept>
#include <string>

namespace stosym {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The result of an operation falls outside the closed expression class.
class NotRepresentable : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

/// Numeric evaluation outside the real domain (negative base, fractional power).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A symbol is used that the model does not declare, or is declared twice.
class DeclarationError : public Error {
public:
    using Error::Error;
};

class MissingInverse : public Error {
public:
    using Error::Error;
};

class NonExplosiveRequired : public Error {
public:
    using Error::Error;
};

class DoobResidualNonzero : public Error {
public:
    using Error::Error;
};

class PdeResidualNonzero : public Error {
public:
    using Error::Error;
};

class SingularSigma : public Error {
public:
    using Error::Error;
};

class UnknownModel : public Error {
public:
    using Error::Error;
};

class PotentialMissing : public Error {
public:
    using Error::Error;
};

/// No point satisfying the declared domain bounds could be sampled.
class NoValidPoint : public Error {
public:
    using Error::Error;
};

/// A simulated path left the declared open domain.
class DomainExit : public Error {
public:
    DomainExit(const std::string& what, std::size_t path)
        : Error(what), path_index(path) {}
    std::size_t path_index;
};

/// A requested evaluation time exceeds the accumulated transformed clock.
class ClockTooShort : public Error {
public:
    using Error::Error;
};

/// Parse failure with a 0-based character offset into the input.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t pos)
        : Error(what + " at offset " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

}  // namespace stosym
