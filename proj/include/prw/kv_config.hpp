#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prw {

// Raised for malformed configuration; carries the offending key path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key_path, const std::string& what)
        : std::runtime_error(key_path.empty() ? what : key_path + ": " + what), key_path_(key_path)
    {
    }
    const std::string& key_path() const { return key_path_; }

private:
    std::string key_path_;
};

// Flat `dotted.key = value` file with `#` comments.
class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& in, const std::string& source = "<input>");
    static KeyValueFile load(const std::string& path);

    bool has(const std::string& key) const;
    const std::string& raw(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;

    // Keys beginning with `prefix`, in file order.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
    const std::vector<std::string>& keys() const { return order_; }

    // Throws for any key never read through the accessors above.
    void reject_unused() const;

    void set(const std::string& key, const std::string& value);

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
    mutable std::set<std::string> used_;
};

double parse_double(const std::string& text, const std::string& key_path);
std::uint64_t parse_uint(const std::string& text, const std::string& key_path);

// Real formatted with 17 significant digits.
std::string format_real(double x);

// Ordered key-value report with the same grammar as KeyValueFile.
class Report {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, const char* value) { add(key, std::string(value)); }
    void add(const std::string& key, double value);
    void add(const std::string& key, std::uint64_t value);
    void add(const std::string& key, std::int64_t value);
    void add(const std::string& key, int value) { add(key, static_cast<std::int64_t>(value)); }
    void add(const std::string& key, unsigned value) { add(key, static_cast<std::uint64_t>(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

} // namespace prw
