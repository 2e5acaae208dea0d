#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bn2o {

/// Malformed network or case text. Carries a 1-based line and column when
/// the problem can be pinned to a token (0 otherwise).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0);

    const std::string& message() const noexcept { return message_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// A structurally invalid object built in memory (generator parameters,
/// hand-assembled networks, bad orderings).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The observed evidence has probability zero under the model.
class ZeroEvidence : public std::runtime_error {
public:
    ZeroEvidence() : std::runtime_error("evidence has probability zero") {}
};

/// An engine refused an input that exceeds its configured size cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TooManyPositiveFindings : public CapExceeded {
public:
    TooManyPositiveFindings(std::size_t count, std::size_t cap);
};

class TooManyDiseases : public CapExceeded {
public:
    TooManyDiseases(std::size_t count, std::size_t cap);
};

}  // namespace bn2o
