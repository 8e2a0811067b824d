#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace c2m {

// Base of every error thrown by the library. category() is a short stable
// token the CLI prints in its error prefix.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* category() const noexcept { return "runtime"; }
};

// Operand shapes or dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "shape"; }
};

// A precondition on argument values was violated.
class ValidationError : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "validation"; }
};

// A NaN or infinity would have entered model state.
class NonFiniteError : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "non-finite"; }
};

// Malformed text input. line() is 1-based; 0 when no line applies.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    const char* category() const noexcept override { return "parse"; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
    const char* category() const noexcept override { return "io"; }
};

class CheckpointError : public Error {
public:
    enum class Kind { Version, Shape, Corrupt };

    CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }
    const char* category() const noexcept override {
        switch (kind_) {
        case Kind::Version: return "checkpoint-version";
        case Kind::Shape: return "checkpoint-shape";
        case Kind::Corrupt: break;
        }
        return "checkpoint-corrupt";
    }

private:
    Kind kind_;
};

}  // namespace c2m
