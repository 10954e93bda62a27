#pragma once

#include <stdexcept>
#include <string>

namespace shapegen {

/// Raised when an input violates a domain rule (non-positive parameter,
/// degenerate contour, out-of-range value under strict validation, ...).
/// `field` names the offending quantity when there is one.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what, std::string field = {})
        : std::runtime_error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised for malformed files or JSON documents.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what, std::string field = {})
        : std::runtime_error(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace shapegen
