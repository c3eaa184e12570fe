#pragma once

#include <stdexcept>
#include <string>

namespace paidexperts {

/// A precondition on a user-supplied parameter does not hold.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An exhaustive search or frontier would exceed its configured size cap.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A routine was called outside the domain its caller is supposed to guarantee.
class GuardViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// File could not be read, written or parsed.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace paidexperts
