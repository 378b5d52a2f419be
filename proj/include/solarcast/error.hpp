#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace solarcast {

/// Library-wide exception. `code()` is a short snake_case tag that the CLI
/// prints verbatim so failures stay machine-parseable.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    [[nodiscard]] const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace solarcast
