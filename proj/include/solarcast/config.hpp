#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace solarcast {

/// `key = value` lines; `#` starts a comment. Relative paths resolve against
/// the directory of the file they were read from.
class KeyValues {
public:
    static KeyValues parse(std::istream& in, std::filesystem::path base_dir = {});
    static KeyValues load(const std::filesystem::path& path);

    [[nodiscard]] bool has(std::string_view key) const;
    [[nodiscard]] std::optional<std::string> get(std::string_view key) const;
    [[nodiscard]] std::string text(std::string_view key, std::string_view fallback) const;
    [[nodiscard]] double number(std::string_view key, double fallback) const;
    [[nodiscard]] long integer(std::string_view key, long fallback) const;
    [[nodiscard]] std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback) const;
    [[nodiscard]] bool flag(std::string_view key, bool fallback) const;
    /// Comma-separated values; empty when the key is absent.
    [[nodiscard]] std::vector<std::string> list(std::string_view key) const;
    [[nodiscard]] std::filesystem::path path(std::string_view key) const;

    void set(std::string key, std::string value);
    /// Throws Error("bad_config") naming the first key not in `allowed`.
    void require_known(std::initializer_list<std::string_view> allowed) const;

    [[nodiscard]] const std::filesystem::path& base_dir() const noexcept { return base_; }
    [[nodiscard]] const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return values_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
    std::filesystem::path base_;
};

/// Splits on commas and trims blanks; empty items are dropped.
std::vector<std::string> split_list(std::string_view text);
double parse_number(std::string_view text, std::string_view what);
std::uint64_t parse_unsigned(std::string_view text, std::string_view what);

}  // namespace solarcast
