#pragma once

#include <stdexcept>
#include <string>

namespace segrad {

enum class ErrorKind {
    Config,        // invalid tunable or argument value
    InvalidInput,  // malformed in-memory input
    EmptyRoi,      // mask has no voxels where one is required
    Geometry,      // grid mismatch or unsupported orientation
    Domain,        // argument outside a function's domain
    Format,        // unsupported or unknown file format feature
    Corruption,    // truncated or inconsistent payload
    Io,            // file system failure
    Validation,    // schema or consistency check on user documents
    Incomplete,    // missing table cells or bands
    Undefined,     // quantity undefined for the given input (e.g. DSC of two empty masks)
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace segrad
