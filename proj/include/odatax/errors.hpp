#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace odatax {

// Base class for every error the library reports. `code` is a stable,
// machine-readable identifier that the gateway maps into HTTP error bodies.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// Syntax or resolution failure while parsing a query string. `position` is a
// zero-based character offset into `input` pointing inside the offending token.
class ParseError : public Error {
public:
    ParseError(std::string input, std::size_t position, std::string expected,
               const std::string& message)
        : Error("InvalidQuery", message),
          input_(std::move(input)),
          position_(position),
          expected_(std::move(expected)) {}

    const std::string& input() const { return input_; }
    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

    // Renders the input with a caret under the error position, for CLI output.
    std::string caret_diagnostic() const {
        std::string out = input_ + "\n";
        out.append(position_, ' ');
        out += "^";
        return out;
    }

private:
    std::string input_;
    std::size_t position_;
    std::string expected_;
};

inline Error duplicate_option(const std::string& name) {
    return Error("DuplicateOption", "query option '" + name + "' given more than once");
}

inline Error range_error(const std::string& name, const std::string& value) {
    return Error("RangeError", "'" + name + "' must be a non-negative integer, got '" + value + "'");
}

inline Error duplicate_field(const std::string& name) {
    return Error("DuplicateField", "field '" + name + "' listed more than once");
}

inline Error unsupported_construct(const std::string& what) {
    return Error("UnsupportedConstruct", what);
}

inline Error type_mismatch(const std::string& what) {
    return Error("TypeMismatch", what);
}

} // namespace odatax
