#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <system_error>

#include "rnss/errors.hpp"

namespace rnss {

/// Shortest decimal representation that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_double(std::int64_t) = delete;

/// Write the whole file in one shot; nothing lands on disk until the content
/// is complete, so aborted runs leave no partial CSV behind.
inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << content;
    if (!out.flush()) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace rnss
