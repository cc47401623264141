#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ltcm/errors.hpp"
#include "ltcm/rational.hpp"

namespace ltcm {

// Flat key-value experiment config. Accepts `key = value` lines, blank
// lines, # comments, and [section] headers that prefix the keys that
// follow with "section.". Values may be bare tokens, quoted strings, or
// bracketed lists; numbers may be quoted, so exact integers and rationals
// survive any downstream tooling untouched.
class Config {
  public:
    Config() = default;

    static Config parse_string(const std::string& text, const std::string& origin) {
        Config c;
        c.origin_ = origin;
        std::istringstream in(text);
        std::string line;
        std::string section;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            s = trim(s);
            if (s.empty())
                continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    c.fail(lineno, "unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    c.fail(lineno, "empty section name");
                continue;
            }
            size_t eq = s.find('=');
            if (eq == std::string::npos)
                c.fail(lineno, "expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty())
                c.fail(lineno, "empty key");
            for (char ch : key)
                if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '.' &&
                    ch != '-')
                    c.fail(lineno, "invalid character in key '" + key + "'");
            if (!section.empty())
                key = section + "." + key;
            if (c.kv_.count(key))
                c.fail(lineno, "duplicate key '" + key + "'");
            if (val.empty())
                c.fail(lineno, "missing value for '" + key + "'");
            c.kv_[key] = val;
            c.line_[key] = lineno;
        }
        return c;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str(), path);
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_str(const std::string& key) const { return unquote(raw(key)); }

    std::string get_str(const std::string& key, const std::string& def) const {
        return has(key) ? get_str(key) : def;
    }

    long get_int(const std::string& key) const {
        return parse_long(unquote(raw(key)), key);
    }

    long get_int(const std::string& key, long def) const {
        return has(key) ? get_int(key) : def;
    }

    unsigned long long get_u64(const std::string& key, unsigned long long def) const {
        if (!has(key))
            return def;
        std::string v = unquote(raw(key));
        try {
            size_t pos = 0;
            unsigned long long r = std::stoull(v, &pos);
            if (pos != v.size())
                throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            fail_key(key, "expected unsigned integer, got '" + v + "'");
        }
    }

    bool get_bool(const std::string& key, bool def) const {
        if (!has(key))
            return def;
        std::string v = unquote(raw(key));
        if (v == "true" || v == "1" || v == "yes")
            return true;
        if (v == "false" || v == "0" || v == "no")
            return false;
        fail_key(key, "expected boolean, got '" + v + "'");
    }

    Rat get_rat(const std::string& key) const { return parse_rat(unquote(raw(key)), key); }

    std::vector<long> get_ints(const std::string& key) const {
        std::vector<long> out;
        for (const std::string& item : items(key))
            out.push_back(parse_long(item, key));
        return out;
    }

    std::vector<Rat> get_rats(const std::string& key) const {
        std::vector<Rat> out;
        for (const std::string& item : items(key))
            out.push_back(parse_rat(item, key));
        return out;
    }

    // sorted key order; the canonical serialization hashed into fingerprints
    std::string canonical() const {
        std::string s;
        for (const auto& [k, v] : kv_) {
            s += k;
            s += '=';
            s += unquote(v);
            s += '\n';
        }
        return s;
    }

  private:
    [[noreturn]] void fail(long lineno, const std::string& msg) const {
        throw ConfigError(origin_ + ":" + std::to_string(lineno) + ": " + msg);
    }

    [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
        auto it = line_.find(key);
        long ln = it == line_.end() ? 0 : it->second;
        throw ConfigError(origin_ + ":" + std::to_string(ln) + ": field '" + key + "': " + msg);
    }

    const std::string& raw(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            throw ConfigError(origin_ + ": missing required field '" + key + "'");
        return it->second;
    }

    std::vector<std::string> items(const std::string& key) const {
        std::string v = raw(key);
        if (!v.empty() && v.front() == '[') {
            if (v.back() != ']')
                fail_key(key, "unterminated list");
            v = v.substr(1, v.size() - 2);
        }
        std::vector<std::string> out;
        std::string cur;
        for (char ch : v) {
            if (ch == ',') {
                out.push_back(unquote(trim(cur)));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        cur = trim(cur);
        if (!cur.empty())
            out.push_back(unquote(cur));
        if (out.empty())
            fail_key(key, "empty list");
        return out;
    }

    long parse_long(const std::string& v, const std::string& key) const {
        try {
            size_t pos = 0;
            long r = std::stol(v, &pos);
            if (pos != v.size())
                throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            fail_key(key, "expected integer, got '" + v + "'");
        }
    }

    Rat parse_rat(const std::string& v, const std::string& key) const {
        size_t slash = v.find('/');
        try {
            if (slash == std::string::npos) {
                Int n(v);
                return Rat(n);
            }
            Int n(v.substr(0, slash));
            Int d(v.substr(slash + 1));
            if (d == 0)
                throw std::invalid_argument(v);
            Rat r(n, d);
            r.canonicalize();
            return r;
        } catch (const std::exception&) {
            fail_key(key, "expected rational, got '" + v + "'");
        }
    }

    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos)
            return "";
        size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    // a # starts a comment unless inside double quotes
    static std::string strip_comment(const std::string& s) {
        bool quoted = false;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"')
                quoted = !quoted;
            else if (s[i] == '#' && !quoted)
                return s.substr(0, i);
        }
        return s;
    }

    static std::string unquote(const std::string& s) {
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
            return s.substr(1, s.size() - 2);
        return s;
    }

    std::map<std::string, std::string> kv_;
    std::map<std::string, long> line_;
    std::string origin_ = "<config>";
};

} // namespace ltcm
