#pragma once

#include <stdexcept>
#include <string>

namespace urbanpulse {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad coordinate, empty set, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// A configuration or data file could not be read or is malformed as a whole.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : Error(what) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

// Something that cannot happen for valid inputs did happen.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace urbanpulse
