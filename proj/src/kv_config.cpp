#include "prw/kv_config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace prw {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key)
{
    if (key.empty())
        return false;
    for (char c : key) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.'
               || c == '_' || c == '-';
        if (!ok)
            return false;
    }
    return true;
}

} // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source)
{
    KeyValueFile kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw ConfigError("", where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError(key, where + ": invalid key");
        if (kv.values_.count(key))
            throw ConfigError(key, where + ": duplicate key");
        kv.set(key, value);
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("", "cannot open '" + path + "'");
    return parse(in, path);
}

void KeyValueFile::set(const std::string& key, const std::string& value)
{
    if (!values_.count(key))
        order_.push_back(key);
    values_[key] = value;
}

bool KeyValueFile::has(const std::string& key) const
{
    return values_.count(key) != 0;
}

const std::string& KeyValueFile::raw(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError(key, "missing required key");
    used_.insert(key);
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key) const
{
    return raw(key);
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const
{
    return has(key) ? raw(key) : fallback;
}

double KeyValueFile::get_double(const std::string& key) const
{
    return parse_double(raw(key), key);
}

double KeyValueFile::get_double(const std::string& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t KeyValueFile::get_uint(const std::string& key) const
{
    return parse_uint(raw(key), key);
}

std::uint64_t KeyValueFile::get_uint(const std::string& key, std::uint64_t fallback) const
{
    return has(key) ? get_uint(key) : fallback;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const
{
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(trim(item), key));
    if (out.empty())
        throw ConfigError(key, "empty list");
    return out;
}

std::vector<std::string> KeyValueFile::keys_with_prefix(const std::string& prefix) const
{
    std::vector<std::string> out;
    for (const auto& k : order_)
        if (k.compare(0, prefix.size(), prefix) == 0)
            out.push_back(k);
    return out;
}

void KeyValueFile::reject_unused() const
{
    for (const auto& k : order_)
        if (!used_.count(k))
            throw ConfigError(k, "unknown key");
}

double parse_double(const std::string& text, const std::string& key_path)
{
    const std::string t = trim(text);
    if (t.empty())
        throw ConfigError(key_path, "expected a real number, got an empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(key_path, "expected a finite real number, got '" + t + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& text, const std::string& key_path)
{
    const std::string t = trim(text);
    if (t.empty() || t[0] == '-')
        throw ConfigError(key_path, "expected a non-negative integer, got '" + t + "'");
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end == t.c_str() + t.size() && errno != ERANGE)
        return v;
    // accept integral reals such as 1e5
    const double d = parse_double(t, key_path);
    if (d < 0 || d != std::floor(d) || d > 1.8e19)
        throw ConfigError(key_path, "expected a non-negative integer, got '" + t + "'");
    return static_cast<std::uint64_t>(d);
}

std::string format_real(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void Report::add(const std::string& key, const std::string& value)
{
    entries_.emplace_back(key, value);
}

void Report::add(const std::string& key, double value)
{
    entries_.emplace_back(key, format_real(value));
}

void Report::add(const std::string& key, std::uint64_t value)
{
    entries_.emplace_back(key, std::to_string(value));
}

void Report::add(const std::string& key, std::int64_t value)
{
    entries_.emplace_back(key, std::to_string(value));
}

std::string Report::str() const
{
    std::string out;
    for (const auto& [k, v] : entries_)
        out += k + " = " + v + "\n";
    return out;
}

} // namespace prw
