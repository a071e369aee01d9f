#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace germ_radius {

/// Broad classification used by the CLI to pick an exit code.
enum class ErrorKind {
    kDomain, // singular Jacobian, insufficient truncation, non-composite input, ...
    kInput,  // malformed job files, expressions, literals
};

/// Every error raised by the library carries the module that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error("[" + module + "] " + message),
          kind_(kind),
          module_(std::move(module)) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

class DomainError : public Error {
public:
    DomainError(std::string module, const std::string& message)
        : Error(ErrorKind::kDomain, std::move(module), message) {}
};

class InputError : public Error {
public:
    InputError(std::string module, const std::string& message)
        : Error(ErrorKind::kInput, std::move(module), message) {}
};

/// Raised when an operation needs more Taylor coefficients than its inputs carry.
class InsufficientTruncation : public DomainError {
public:
    InsufficientTruncation(std::string module, unsigned needed, unsigned available,
                           const std::string& what)
        : DomainError(std::move(module), "insufficient truncation for " + what + ": need degree " +
                                             std::to_string(needed) + ", have " +
                                             std::to_string(available)),
          needed_(needed),
          available_(available) {}

    [[nodiscard]] unsigned needed() const noexcept { return needed_; }
    [[nodiscard]] unsigned available() const noexcept { return available_; }

private:
    unsigned needed_;
    unsigned available_;
};

/// Δ has no nonzero coefficient up to the truncation degree.
class SingularJacobian : public DomainError {
public:
    explicit SingularJacobian(unsigned degree)
        : DomainError("jacobian", "Jacobian identically singular to degree " + std::to_string(degree)),
          degree_(degree) {}

    [[nodiscard]] unsigned degree() const noexcept { return degree_; }

private:
    unsigned degree_;
};

} // namespace germ_radius
