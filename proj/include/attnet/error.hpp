#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attnet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class InvalidBcd : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class EncodeError : public Error {
public:
    using Error::Error;
};

class TopologyError : public Error {
public:
    using Error::Error;
};

class AlreadyEnrolled : public Error {
public:
    using Error::Error;
};

class NotEnrolled : public Error {
public:
    using Error::Error;
};

class InvalidField : public Error {
public:
    using Error::Error;
};

class JournalWriteError : public Error {
public:
    using Error::Error;
};

/// Error tied to a 1-based line of a text file (journal, store, scenario).
class LineError : public Error {
public:
    LineError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ReplayError : public LineError {
public:
    using LineError::LineError;
};

class LoadError : public LineError {
public:
    using LineError::LineError;
};

class ScenarioError : public LineError {
public:
    using LineError::LineError;
};

} // namespace attnet
