#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "rnss/wire.hpp"

namespace rnss {

/// Count of interactive operations: each recon-style opening of a (possibly
/// matrix-valued) masked quantity is one. add contributes 0, mult 2, inv 3.
struct IoCounter {
    std::uint64_t opens = 0;
};

inline constexpr std::uint16_t kBroadcast = 0xFFFF;

struct TranscriptEntry {
    std::uint8_t tag = 0;
    std::uint32_t round = 0;
    std::uint16_t sender = 0;
    std::uint16_t recipient = kBroadcast;
    std::vector<double> payload;

    bool operator==(const TranscriptEntry&) const = default;
};

/// Ordered record of every protocol message a context saw (sent or received).
class Transcript {
public:
    void record(const Frame& f, std::uint16_t recipient = kBroadcast) {
        entries_.push_back({f.tag, f.round, f.sender, recipient, f.payload});
    }

    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Order-sensitive content hash; equal transcripts hash equal.
    std::uint64_t digest() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto feed = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xFF;
                h *= 0x100000001b3ull;
            }
        };
        for (const auto& e : entries_) {
            feed(e.tag);
            feed(e.round);
            feed((std::uint64_t(e.sender) << 16) | e.recipient);
            feed(e.payload.size());
            for (double d : e.payload) {
                std::uint64_t bits;
                std::memcpy(&bits, &d, 8);
                feed(bits);
            }
        }
        return h;
    }

private:
    std::vector<TranscriptEntry> entries_;
};

}  // namespace rnss
