#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ltcm/errors.hpp"
#include "ltcm/rational.hpp"

namespace ltcm {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a_hex(std::string_view s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

// value == q^e for some integer e, with e reported
inline bool as_q_power(const Rat& v, long q, long& e) {
    if (v <= 0)
        return false;
    Int num = v.get_num();
    Int den = v.get_den();
    if (den == 1) {
        e = 0;
        while (num % q == 0) {
            num /= q;
            ++e;
        }
        return num == 1;
    }
    if (num == 1) {
        e = 0;
        while (den % q == 0) {
            den /= q;
            --e;
        }
        return den == 1;
    }
    return false;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

// One output row. Inputs are pre-rendered JSON tokens (numbers bare,
// strings quoted) so both sinks can share them.
struct Record {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;
    Rat value;
    long q = 0; // when nonzero, probe value for the q-power form
    long cells_used = 0;
    long wall_ms = 0;
    std::string status;
    std::string fingerprint;
};

inline std::string input_num(long v) { return std::to_string(v); }
inline std::string input_str(const std::string& s) { return "\"" + json_escape(s) + "\""; }
inline std::string input_rat(const Rat& v) {
    return input_str(v.get_num().get_str() + "/" + v.get_den().get_str());
}

// Streams records into <command>.jsonl and an aligned <command>.csv under
// one directory. Rows are buffered so the CSV columns can be padded to a
// common width; nothing time- or host-dependent is written, which keeps
// reruns byte-identical.
class ReportWriter {
  public:
    ReportWriter(std::string dir, std::string command)
        : dir_(std::move(dir)), command_(std::move(command)) {}

    void add(const Record& r) {
        std::string j = "{\"command\":\"" + json_escape(r.command) + "\",\"inputs\":{";
        for (size_t i = 0; i < r.inputs.size(); ++i) {
            if (i)
                j += ",";
            j += "\"" + json_escape(r.inputs[i].first) + "\":" + r.inputs[i].second;
        }
        j += "},\"value\":{\"num\":\"" + r.value.get_num().get_str() + "\",\"den\":\"" +
             r.value.get_den().get_str() + "\"}";
        long e = 0;
        bool qp = r.q != 0 && as_q_power(r.value, r.q, e);
        if (qp)
            j += ",\"q_power_form\":{\"q\":" + std::to_string(r.q) +
                 ",\"exp\":" + std::to_string(e) + "}";
        else
            j += ",\"q_power_form\":null";
        j += ",\"cells_used\":" + std::to_string(r.cells_used);
        j += ",\"wall_ms\":" + std::to_string(r.wall_ms);
        if (!r.status.empty())
            j += ",\"status\":\"" + json_escape(r.status) + "\"";
        j += ",\"fingerprint\":\"" + json_escape(r.fingerprint) + "\"}";
        jsonl_.push_back(j);

        std::string in;
        for (size_t i = 0; i < r.inputs.size(); ++i) {
            if (i)
                in += " ";
            in += r.inputs[i].first + "=" + csv_token(r.inputs[i].second);
        }
        csv_.push_back(std::array<std::string, kCols>{
            r.command, in, r.value.get_num().get_str() + "/" + r.value.get_den().get_str(),
            rat_decimal(r.value), qp ? std::to_string(r.q) : "-",
            qp ? std::to_string(e) : "-", std::to_string(r.cells_used),
            std::to_string(r.wall_ms), r.status.empty() ? "-" : r.status, r.fingerprint});
    }

    void close() {
        std::string base = dir_.empty() ? command_ : dir_ + "/" + command_;
        std::ofstream jf(base + ".jsonl", std::ios::binary);
        if (!jf)
            throw LtcmError("cannot write " + base + ".jsonl");
        for (const std::string& line : jsonl_)
            jf << line << "\n";
        jf.close();

        static const char* kHeader[kCols] = {"command", "inputs",   "value",   "decimal",
                                             "q",       "exp",      "cells",   "wall_ms",
                                             "status",  "fingerprint"};
        size_t w[kCols];
        for (size_t c = 0; c < kCols; ++c)
            w[c] = std::string(kHeader[c]).size();
        for (const auto& row : csv_)
            for (size_t c = 0; c < kCols; ++c)
                w[c] = std::max(w[c], row[c].size());
        std::ofstream cf(base + ".csv", std::ios::binary);
        if (!cf)
            throw LtcmError("cannot write " + base + ".csv");
        write_row(cf, kHeader, w);
        for (const auto& row : csv_) {
            const char* f[kCols];
            for (size_t c = 0; c < kCols; ++c)
                f[c] = row[c].c_str();
            write_row(cf, f, w);
        }
    }

  private:
    static constexpr size_t kCols = 10;

    static std::string csv_token(const std::string& json_value) {
        std::string v = json_value;
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            v = v.substr(1, v.size() - 2);
        std::string out;
        for (char c : v)
            out += (c == ',' ? ';' : c);
        return out;
    }

    static void write_row(std::ofstream& f, const char* const* fields, const size_t* w) {
        for (size_t c = 0; c < kCols; ++c) {
            std::string cell = fields[c];
            cell.resize(w[c], ' ');
            f << cell;
            f << (c + 1 == kCols ? "\n" : ", ");
        }
    }

    std::string dir_;
    std::string command_;
    std::vector<std::string> jsonl_;
    std::vector<std::array<std::string, kCols>> csv_;
};

} // namespace ltcm
