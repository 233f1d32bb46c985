#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "rnss/errors.hpp"
#include "rnss/wire.hpp"

namespace rnss {

/// Point-to-point message channel between one party and its n-1 peers.
/// Implementations must be safe for concurrent use by distinct parties.
class Transport {
public:
    virtual ~Transport() = default;

    virtual int self() const = 0;
    virtual int party_count() const = 0;

    virtual void send(int to, const Frame& frame) = 0;
    /// Blocking receive of the frame (from, round, tag). Throws ProtocolAbort
    /// if the peer is gone or the wait times out.
    virtual Frame receive(int from, std::uint32_t round, std::uint8_t tag) = 0;
    /// Announce departure so blocked peers abort instead of hanging.
    virtual void leave() = 0;

    void broadcast(const Frame& frame) {
        for (int j = 0; j < party_count(); ++j)
            if (j != self()) send(j, frame);
    }
};

/// In-process mailbox shared by all simulated parties. Senders post into
/// keyed slots; receivers block on the slot until it fills or the sender
/// deregisters, which converts missing messages into ProtocolAbort.
class SimBus {
public:
    explicit SimBus(int n, int timeout_ms = 120000)
        : timeout_ms_(timeout_ms), alive_(static_cast<std::size_t>(n), true) {}

    void post(int from, int to, const Frame& frame) {
        std::lock_guard lock(mutex_);
        slots_[key(frame.round, frame.tag, from, to)] = frame;
        cv_.notify_all();
    }

    Frame fetch(int from, int to, std::uint32_t round, std::uint8_t tag) {
        std::unique_lock lock(mutex_);
        const auto k = key(round, tag, from, to);
        const bool arrived =
            cv_.wait_for(lock, std::chrono::milliseconds(timeout_ms_), [&] {
                return slots_.count(k) != 0 || !alive_[static_cast<std::size_t>(from)];
            });
        if (!arrived) throw ProtocolAbort("timeout waiting for party", round, {from});
        auto it = slots_.find(k);
        if (it == slots_.end())
            throw ProtocolAbort("party left before contributing", round, {from});
        return it->second;
    }

    void leave(int who) {
        std::lock_guard lock(mutex_);
        alive_[static_cast<std::size_t>(who)] = false;
        cv_.notify_all();
    }

    int party_count() const { return static_cast<int>(alive_.size()); }

private:
    using Key = std::tuple<std::uint32_t, std::uint8_t, int, int>;
    static Key key(std::uint32_t round, std::uint8_t tag, int from, int to) {
        return {round, tag, from, to};
    }

    int timeout_ms_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::map<Key, Frame> slots_;
    std::vector<bool> alive_;
};

class SimTransport final : public Transport {
public:
    SimTransport(std::shared_ptr<SimBus> bus, int self) : bus_(std::move(bus)), self_(self) {}

    int self() const override { return self_; }
    int party_count() const override { return bus_->party_count(); }

    void send(int to, const Frame& frame) override { bus_->post(self_, to, frame); }

    Frame receive(int from, std::uint32_t round, std::uint8_t tag) override {
        return bus_->fetch(from, self_, round, tag);
    }

    void leave() override { bus_->leave(self_); }

private:
    std::shared_ptr<SimBus> bus_;
    int self_;
};

}  // namespace rnss
