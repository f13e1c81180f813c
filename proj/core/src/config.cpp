#include "mmsync/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "mmsync/errors.hpp"

namespace mmsync {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> items;
    while (true) {
        const auto comma = s.find(',');
        items.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return items;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    if constexpr (std::is_floating_point_v<T>) {
        // strtod accepts forms such as "1e-3" and "+2" that from_chars rejects.
        std::string buffer(s);
        char* end = nullptr;
        out = std::strtod(buffer.c_str(), &end);
        return end == buffer.c_str() + buffer.size();
    } else {
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    }
}

}  // namespace

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.string());
}

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string source) {
    KeyValueConfig cfg;
    cfg.source_ = std::move(source);
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": empty key");
        if (cfg.entries_.count(key) != 0)
            throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        cfg.entries_[key] = {std::string(trim(line.substr(eq + 1))), line_no};
    }
    return cfg;
}

const KeyValueConfig::Entry* KeyValueConfig::find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void KeyValueConfig::fail(const std::string& key, const Entry& e, const std::string& what) const {
    std::string where = source_;
    if (e.line != 0) where += ":" + std::to_string(e.line);
    throw ConfigError(where + ": key '" + key + "': " + what + " (got '" + e.value + "')");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    double v = 0.0;
    if (!parse_number(e->value, v)) fail(key, *e, "expected a number");
    return v;
}

std::size_t KeyValueConfig::get_size(const std::string& key, std::size_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::size_t v = 0;
    if (!parse_number(e->value, v)) fail(key, *e, "expected a non-negative integer");
    return v;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::uint64_t v = 0;
    if (!parse_number(e->value, v)) fail(key, *e, "expected a non-negative integer");
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(key, *e, "expected true or false");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key,
                                                const std::vector<double>& fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::vector<double> out;
    for (std::string_view item : split_list(e->value)) {
        double v = 0.0;
        if (!parse_number(item, v)) fail(key, *e, "expected a comma-separated list of numbers");
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> KeyValueConfig::get_sizes(const std::string& key,
                                                   const std::vector<std::size_t>& fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::vector<std::size_t> out;
    for (std::string_view item : split_list(e->value)) {
        std::size_t v = 0;
        if (!parse_number(item, v)) fail(key, *e, "expected a comma-separated list of integers");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> KeyValueConfig::unknown_keys(const std::vector<std::string_view>& known) const {
    std::vector<std::string> unknown;
    for (const auto& [key, entry] : entries_)
        if (std::find(known.begin(), known.end(), key) == known.end()) unknown.push_back(key);
    return unknown;
}

}  // namespace mmsync
