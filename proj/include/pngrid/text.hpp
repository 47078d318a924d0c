#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pngrid {

// All floats in artifact files go through one formatter: the shortest
// decimal that parses back to the same double, so identical runs produce
// identical bytes and a dump->parse round trip is lossless.
inline std::string format_num(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return {buf, p};
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline double parse_double(std::string_view tok, const std::string& where) {
    try {
        return std::stod(std::string(tok));
    } catch (const std::exception&) {
        throw ParseError(where + ": bad number '" + std::string(tok) + "'");
    }
}

inline std::int64_t parse_int(std::string_view tok, const std::string& where) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(where + ": bad integer '" + std::string(tok) + "'");
    return v;
}

inline std::uint64_t parse_u64(std::string_view tok, const std::string& where) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(where + ": bad unsigned '" + std::string(tok) + "'");
    return v;
}

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xCBF29CE484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace pngrid
