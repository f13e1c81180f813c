#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mmsync {

/// Flat `key = value` configuration text. `#` starts a comment; list values
/// are comma separated. Every lookup failure throws ConfigError naming the
/// key and the line it came from.
class KeyValueConfig {
public:
    static KeyValueConfig load(const std::filesystem::path& path);
    static KeyValueConfig parse(std::string_view text, std::string source = "<string>");

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::string& source() const noexcept { return source_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& fallback) const;

    /// Keys present in the file but not in `known`.
    std::vector<std::string> unknown_keys(const std::vector<std::string_view>& known) const;

    void set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };

    const Entry* find(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const Entry& e, const std::string& what) const;

    std::string source_;
    std::map<std::string, Entry> entries_;
};

}  // namespace mmsync
