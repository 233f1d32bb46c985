#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "rnss/errors.hpp"
#include "rnss/transport.hpp"
#include "rnss/wire.hpp"

namespace rnss {

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

inline Endpoint parse_endpoint(const std::string& spec) {
    const auto colon = spec.rfind(':');
    if (colon == std::string::npos || colon + 1 == spec.size())
        throw ConfigError("endpoint must be host:port, got '" + spec + "'");
    Endpoint ep;
    ep.host = spec.substr(0, colon);
    const long port = std::strtol(spec.c_str() + colon + 1, nullptr, 10);
    if (port <= 0 || port > 65535) throw ConfigError("bad port in endpoint '" + spec + "'");
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

namespace detail {

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket() { reset(); }
    Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    Socket& operator=(Socket&& other) noexcept {
        if (this != &other) {
            reset();
            fd_ = other.fd_;
            other.fd_ = -1;
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

inline sockaddr_in make_addr(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1)
        throw ConfigError("cannot parse address '" + ep.host + "'");
    return addr;
}

inline void set_common_options(int fd, int timeout_ms) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    timeval tv{};
    tv.tv_sec = timeout_ms / 1000;
    tv.tv_usec = (timeout_ms % 1000) * 1000;
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

inline void send_all(int fd, const std::uint8_t* data, std::size_t size) {
    std::size_t sent = 0;
    while (sent < size) {
        const ssize_t k = ::send(fd, data + sent, size - sent, MSG_NOSIGNAL);
        if (k <= 0) throw ProtocolAbort("tcp send failed");
        sent += static_cast<std::size_t>(k);
    }
}

inline void recv_all(int fd, std::uint8_t* data, std::size_t size, std::uint32_t round,
                     int from) {
    std::size_t got = 0;
    while (got < size) {
        const ssize_t k = ::recv(fd, data + got, size - got, 0);
        if (k == 0) throw ProtocolAbort("peer closed connection", round, {from});
        if (k < 0) {
            if (errno == EINTR) continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                throw ProtocolAbort("timeout waiting for peer", round, {from});
            throw ProtocolAbort("tcp receive failed", round, {from});
        }
        got += static_cast<std::size_t>(k);
    }
}

inline Frame read_frame(int fd, std::uint32_t round, int from) {
    std::uint8_t header[kHeaderSize];
    recv_all(fd, header, kHeaderSize, round, from);
    Frame f = decode_header(header);
    const std::uint32_t count = header_payload_count(header);
    std::vector<std::uint8_t> body(8ull * count);
    recv_all(fd, body.data(), body.size(), round, from);
    f.payload.resize(count);
    for (std::uint32_t i = 0; i < count; ++i)
        f.payload[i] = detail::get_le_double(body.data() + 8ull * i);
    return f;
}

inline void write_frame(int fd, const Frame& f) {
    const auto bytes = encode_frame(f);
    send_all(fd, bytes.data(), bytes.size());
}

}  // namespace detail

/// Full-mesh TCP transport. Party i listens on endpoints[i], dials every
/// lower-indexed peer and accepts from every higher-indexed one. Connections
/// open with a hello frame carrying the configuration hash; a mismatch is
/// fatal. Channels are assumed private (no encryption), per the deployment
/// model.
class TcpTransport final : public Transport {
public:
    TcpTransport(const std::vector<Endpoint>& endpoints, int self, std::uint64_t config_hash,
                 int timeout_ms = 15000)
        : self_(self), n_(static_cast<int>(endpoints.size())), timeout_ms_(timeout_ms),
          peers_(endpoints.size()) {
        if (self_ < 0 || self_ >= n_) throw ConfigError("party index out of range");

        detail::Socket listener(::socket(AF_INET, SOCK_STREAM, 0));
        if (!listener.valid()) throw ProtocolAbort("cannot create listen socket");
        int one = 1;
        ::setsockopt(listener.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr = detail::make_addr(endpoints[static_cast<std::size_t>(self_)]);
        if (::bind(listener.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
            throw ProtocolAbort("cannot bind listen socket");
        if (::listen(listener.fd(), n_) != 0) throw ProtocolAbort("cannot listen");

        for (int j = 0; j < self_; ++j) dial(endpoints, j, config_hash);
        for (int j = self_ + 1; j < n_; ++j) accept_one(listener.fd(), config_hash);
        for (int j = 0; j < n_; ++j)
            if (j != self_ && !peers_[static_cast<std::size_t>(j)].valid())
                throw ProtocolAbort("peer never connected", 0, {j});
    }

    int self() const override { return self_; }
    int party_count() const override { return n_; }

    void send(int to, const Frame& frame) override {
        detail::write_frame(peers_[static_cast<std::size_t>(to)].fd(), frame);
    }

    Frame receive(int from, std::uint32_t round, std::uint8_t tag) override {
        Frame f = detail::read_frame(peers_[static_cast<std::size_t>(from)].fd(), round, from);
        if (f.sender != from || f.round != round || f.tag != tag)
            throw ProtocolAbort("out-of-step frame from peer", round, {from});
        return f;
    }

    void leave() override {
        for (auto& p : peers_) p.reset();
    }

private:
    void dial(const std::vector<Endpoint>& endpoints, int j, std::uint64_t config_hash) {
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
        sockaddr_in addr = detail::make_addr(endpoints[static_cast<std::size_t>(j)]);
        for (;;) {
            detail::Socket s(::socket(AF_INET, SOCK_STREAM, 0));
            if (s.valid() &&
                ::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0) {
                detail::set_common_options(s.fd(), timeout_ms_);
                detail::write_frame(s.fd(), hello(config_hash));
                const Frame back = detail::read_frame(s.fd(), 0, j);
                check_hello(back, config_hash, j);
                peers_[static_cast<std::size_t>(j)] = std::move(s);
                return;
            }
            if (std::chrono::steady_clock::now() >= deadline)
                throw ProtocolAbort("cannot reach peer", 0, {j});
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
    }

    void accept_one(int listener_fd, std::uint64_t config_hash) {
        sockaddr_in addr{};
        socklen_t len = sizeof(addr);
        const int fd = ::accept(listener_fd, reinterpret_cast<sockaddr*>(&addr), &len);
        if (fd < 0) throw ProtocolAbort("accept failed while assembling the mesh");
        detail::Socket s(fd);
        detail::set_common_options(s.fd(), timeout_ms_);
        const Frame got = detail::read_frame(s.fd(), 0, -1);
        if (got.sender <= self_ || got.sender >= n_)
            throw ProtocolAbort("hello from unexpected party index");
        check_hello(got, config_hash, got.sender);
        detail::write_frame(s.fd(), hello(config_hash));
        peers_[got.sender] = std::move(s);
    }

    Frame hello(std::uint64_t config_hash) const {
        double bits;
        std::memcpy(&bits, &config_hash, 8);
        return Frame{kTagHello, 0, static_cast<std::uint16_t>(self_), {bits}};
    }

    static void check_hello(const Frame& f, std::uint64_t config_hash, int from) {
        if (f.tag != kTagHello || f.payload.size() != 1)
            throw ProtocolAbort("malformed hello frame", 0, {from});
        std::uint64_t got;
        std::memcpy(&got, &f.payload[0], 8);
        if (got != config_hash)
            throw ConfigMismatch("peer " + std::to_string(from) +
                                 " runs a different configuration");
    }

    int self_;
    int n_;
    int timeout_ms_;
    std::vector<detail::Socket> peers_;
};

}  // namespace rnss
