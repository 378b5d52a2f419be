#include "solarcast/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

#include "solarcast/error.hpp"

namespace solarcast {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

double parse_number(std::string_view text, std::string_view what) {
    const std::string s(trim(text));
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error("bad_config", std::string(what) + ": not a number '" + s + "'");
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
    const auto s = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error("bad_config", std::string(what) + ": not a non-negative integer '" + std::string(s) + "'");
    return v;
}

KeyValues KeyValues::parse(std::istream& in, std::filesystem::path base_dir) {
    KeyValues kv;
    kv.base_ = std::move(base_dir);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v = line;
        if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        v = trim(v);
        if (v.empty()) continue;
        const auto eq = v.find('=');
        if (eq == std::string_view::npos)
            throw Error("bad_config", "line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(v.substr(0, eq));
        if (key.empty()) throw Error("bad_config", "line " + std::to_string(lineno) + ": empty key");
        kv.values_[std::string(key)] = std::string(trim(v.substr(eq + 1)));
    }
    return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing_file", "cannot open " + path.string());
    return parse(in, path.parent_path());
}

bool KeyValues::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> KeyValues::get(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValues::text(std::string_view key, std::string_view fallback) const {
    const auto v = get(key);
    return v ? *v : std::string(fallback);
}

double KeyValues::number(std::string_view key, double fallback) const {
    const auto v = get(key);
    return v ? parse_number(*v, key) : fallback;
}

long KeyValues::integer(std::string_view key, long fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size() || v->empty())
        throw Error("bad_config", std::string(key) + ": not an integer '" + *v + "'");
    return out;
}

std::uint64_t KeyValues::unsigned_integer(std::string_view key, std::uint64_t fallback) const {
    const auto v = get(key);
    return v ? parse_unsigned(*v, key) : fallback;
}

bool KeyValues::flag(std::string_view key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw Error("bad_config", std::string(key) + ": not a boolean '" + *v + "'");
}

std::vector<std::string> KeyValues::list(std::string_view key) const {
    const auto v = get(key);
    return v ? split_list(*v) : std::vector<std::string>{};
}

std::filesystem::path KeyValues::path(std::string_view key) const {
    const auto v = get(key);
    if (!v || v->empty()) throw Error("bad_config", "missing path '" + std::string(key) + "'");
    std::filesystem::path p(*v);
    return p.is_absolute() || base_.empty() ? p : base_ / p;
}

void KeyValues::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

void KeyValues::require_known(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, value] : values_)
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw Error("bad_config", "unknown key '" + key + "'");
}

}  // namespace solarcast
