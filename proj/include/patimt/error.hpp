#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace patimt {

/// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SpaceMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Interchange-file schema violation. `record()` is the 0-based record index.
class ParseError : public Error {
public:
    ParseError(std::size_t record, std::string field, const std::string& what)
        : Error("record " + std::to_string(record) + ": field '" + field + "': " + what),
          record_(record), field_(std::move(field)) {}

    std::size_t record() const noexcept { return record_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t record_;
    std::string field_;
};

/// Non-fatal messages collected while processing (unknown kinds, skipped
/// records, untranslated blocks, ...).
struct Diagnostics {
    std::vector<std::string> messages;

    void warn(std::string msg) { messages.push_back(std::move(msg)); }
    bool empty() const noexcept { return messages.empty(); }
};

} // namespace patimt
