#pragma once

#include <charconv>
#include <string>

namespace uwsynth::detail {

// Shortest round-trip decimal form; stable across platforms, parses back to
// the identical double.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

} // namespace uwsynth::detail
