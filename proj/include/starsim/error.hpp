#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace starsim {

/// Domain error carrying a stable machine-readable code next to the message.
/// Codes are short kebab-case labels ("parse", "schema", "reference",
/// "illegal-transition", ...) so callers can branch without string-matching
/// the human text.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace starsim
