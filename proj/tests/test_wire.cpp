#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rnss/rng.hpp"
#include "rnss/wire.hpp"

using namespace rnss;

TEST_CASE("frame encoding matches the fixed layout") {
    Frame f{kTagOpen, 7, 3, {1.0}};
    const auto bytes = encode_frame(f);
    const std::vector<std::uint8_t> expected{
        0x52, 0x4E, 0x53, 0x53,  // magic "RNSS"
        0x01,                    // version
        0x02,                    // tag
        0x00, 0x00, 0x00, 0x07,  // round, big-endian
        0x00, 0x03,              // sender, big-endian
        0x00, 0x00, 0x00, 0x01,  // payload count, big-endian
        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xF0, 0x3F,  // 1.0, little-endian
    };
    CHECK(bytes == expected);
}

TEST_CASE("frame round trip preserves payload bits") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        Frame f;
        f.tag = static_cast<std::uint8_t>(1 + rng.below(3));
        f.round = static_cast<std::uint32_t>(rng.below(1u << 30));
        f.sender = static_cast<std::uint16_t>(rng.below(64));
        const int len = static_cast<int>(rng.below(9));
        for (int i = 0; i < len; ++i) f.payload.push_back(rng.gaussian(0.0, 1e6));
        const auto bytes = encode_frame(f);
        const Frame back = decode_frame(bytes.data(), bytes.size());
        CHECK(back.tag == f.tag);
        CHECK(back.round == f.round);
        CHECK(back.sender == f.sender);
        REQUIRE(back.payload.size() == f.payload.size());
        for (std::size_t i = 0; i < f.payload.size(); ++i)
            CHECK(back.payload[i] == f.payload[i]);
    }
}

TEST_CASE("malformed frames are rejected") {
    Frame f{kTagOpen, 1, 0, {2.5}};
    auto bytes = encode_frame(f);
    auto bad_magic = bytes;
    bad_magic[0] = 0x00;
    CHECK_THROWS_AS(decode_frame(bad_magic.data(), bad_magic.size()), Error);
    auto bad_version = bytes;
    bad_version[4] = 0x02;
    CHECK_THROWS_AS(decode_frame(bad_version.data(), bad_version.size()), Error);
    CHECK_THROWS_AS(decode_frame(bytes.data(), bytes.size() - 1), Error);
}
