#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace web4 {

enum class ErrorKind {
    division_by_degenerate_jet,
    domain_error,
    unsupported_on_exact_backend,
    order_exhausted,
    order_mismatch,
    degenerate_web_point,
    inadmissible_invariant,
    consistency_failure,
    empty_admissible_set,
    invalid_spec,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the invariant pipeline. The kind lets callers map
/// failures onto exit codes or skip counts without string matching.
class WebError : public std::runtime_error {
public:
    WebError(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, std::string expected, std::string found);

    std::size_t offset() const noexcept { return offset_; }
    const std::string& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }

private:
    std::size_t offset_;
    std::string expected_;
    std::string found_;
};

}  // namespace web4
