#pragma once

#include <stdexcept>
#include <string>

namespace pdm {

/// Base class of every error raised by the kernel.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

class UnknownSymbol : public Error {
public:
    using Error::Error;
};

/// Parse failure; `position` is a 0-based byte offset into the input.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t position)
        : Error(msg + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class InconsistentPoint : public Error {
public:
    using Error::Error;
};

class OrderLimit : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class InvalidVariant : public Error {
public:
    using Error::Error;
};

class NotDilatationInvariant : public Error {
public:
    using Error::Error;
};

class DegenerateFamily : public Error {
public:
    using Error::Error;
};

class UnsupportedExpression : public Error {
public:
    using Error::Error;
};

/// Raised by the jet oracle when a sample point hits a pole.
class PoleAtPoint : public Error {
public:
    using Error::Error;
};

class SamplingExhausted : public Error {
public:
    using Error::Error;
};

class NeedMorePoints : public Error {
public:
    using Error::Error;
};

/// The two independent verification paths disagreed; always a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace pdm
