#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "rnss/errors.hpp"

namespace rnss {

// Frame layout, fixed for interoperability:
//   magic "RNSS" (4) | version 0x01 (1) | tag (1) | round (4, BE) |
//   sender (2, BE) | payload count (4, BE) | count * 8-byte IEEE-754 LE
inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::uint8_t kMagic[4] = {0x52, 0x4E, 0x53, 0x53};
inline constexpr std::size_t kHeaderSize = 16;

inline constexpr std::uint8_t kTagHello = 0x01;
inline constexpr std::uint8_t kTagOpen = 0x02;
inline constexpr std::uint8_t kTagScatter = 0x03;

struct Frame {
    std::uint8_t tag = 0;
    std::uint32_t round = 0;
    std::uint16_t sender = 0;
    std::vector<double> payload;
};

namespace detail {

inline void put_be32(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v >> 24);
    out[1] = static_cast<std::uint8_t>(v >> 16);
    out[2] = static_cast<std::uint8_t>(v >> 8);
    out[3] = static_cast<std::uint8_t>(v);
}

inline std::uint32_t get_be32(const std::uint8_t* in) {
    return (std::uint32_t(in[0]) << 24) | (std::uint32_t(in[1]) << 16) |
           (std::uint32_t(in[2]) << 8) | std::uint32_t(in[3]);
}

inline void put_le_double(std::uint8_t* out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

inline double get_le_double(const std::uint8_t* in) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(in[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_frame(const Frame& f) {
    std::vector<std::uint8_t> out(kHeaderSize + 8 * f.payload.size());
    std::memcpy(out.data(), kMagic, 4);
    out[4] = kWireVersion;
    out[5] = f.tag;
    detail::put_be32(out.data() + 6, f.round);
    out[10] = static_cast<std::uint8_t>(f.sender >> 8);
    out[11] = static_cast<std::uint8_t>(f.sender);
    detail::put_be32(out.data() + 12, static_cast<std::uint32_t>(f.payload.size()));
    for (std::size_t i = 0; i < f.payload.size(); ++i)
        detail::put_le_double(out.data() + kHeaderSize + 8 * i, f.payload[i]);
    return out;
}

/// Payload element count declared by an already-validated header.
inline std::uint32_t header_payload_count(const std::uint8_t* header) {
    return detail::get_be32(header + 12);
}

inline Frame decode_header(const std::uint8_t* header) {
    if (std::memcmp(header, kMagic, 4) != 0) throw Error("bad frame magic");
    if (header[4] != kWireVersion) throw Error("unsupported wire version");
    Frame f;
    f.tag = header[5];
    f.round = detail::get_be32(header + 6);
    f.sender = static_cast<std::uint16_t>((std::uint16_t(header[10]) << 8) | header[11]);
    return f;
}

inline Frame decode_frame(const std::uint8_t* data, std::size_t size) {
    if (size < kHeaderSize) throw Error("truncated frame");
    Frame f = decode_header(data);
    const std::uint32_t count = header_payload_count(data);
    if (size != kHeaderSize + 8ull * count) throw Error("frame size mismatch");
    f.payload.resize(count);
    for (std::uint32_t i = 0; i < count; ++i)
        f.payload[i] = detail::get_le_double(data + kHeaderSize + 8 * i);
    return f;
}

}  // namespace rnss
