#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vascnet {

inline constexpr std::string_view kToolName = "vascnet";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kReportVersion = 1;

inline std::string tool_id() {
    return std::string(kToolName) + " " + std::string(kToolVersion);
}

/// FNV-1a 64-bit hash, used to stamp output files with the configuration they
/// were produced from.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::string_view text) {
    static constexpr char digits[] = "0123456789abcdef";
    std::uint64_t h = fnv1a64(text);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace vascnet
