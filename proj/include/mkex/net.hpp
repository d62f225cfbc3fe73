#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mkex/wire.hpp"

namespace mkex {

// Plain TCP transport. No TLS, no identity authentication; the only
// integrity mechanism is the handshake's own key confirmation.
class TcpTransport final : public Transport {
public:
    explicit TcpTransport(int fd) : fd_(fd) {}
    ~TcpTransport() override;

    TcpTransport(TcpTransport&& other) noexcept;
    TcpTransport& operator=(TcpTransport&&) = delete;
    TcpTransport(const TcpTransport&) = delete;

    void write_all(std::span<const std::uint8_t> data) override; // "io"
    std::size_t read_some(std::span<std::uint8_t> out) override; // "io"

private:
    int fd_ = -1;
};

class TcpListener {
public:
    // port 0 binds an ephemeral port; read it back with port().
    static TcpListener bind_to(const std::string& host, std::uint16_t port); // "io"
    ~TcpListener();

    TcpListener(TcpListener&& other) noexcept;
    TcpListener& operator=(TcpListener&&) = delete;
    TcpListener(const TcpListener&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    TcpTransport accept_one(); // "io"
    void close();

private:
    TcpListener(int fd, std::uint16_t port) : fd_(fd), port_(port) {}
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

TcpTransport tcp_connect(const std::string& host, std::uint16_t port); // "io"

struct SessionOutcome {
    std::size_t index = 0;
    std::optional<HandshakeResult> result; // set on success
    std::string error_code;                // set on failure
    std::string error_message;
};

// Accepts sessions and runs the responder side of the handshake, one session
// per connection. Key material for session i comes from the base stream's
// "session-<i>" child, so concurrent sessions never share draws.
class Server {
public:
    Server(const std::string& host, std::uint16_t port, HandshakeOptions options,
           SeededStream base_stream);
    ~Server();

    std::uint16_t port() const noexcept { return listener_.port(); }

    // Accept + handshake for one session.
    SessionOutcome serve_one();

    // Runs `count` sessions; with concurrent=true each accepted connection is
    // handled on its own thread. Outcomes come back ordered by session index.
    std::vector<SessionOutcome> serve_many(std::size_t count, bool concurrent);

    void stop(); // unblocks accept with "io"

private:
    TcpListener listener_;
    HandshakeOptions options_;
    SeededStream base_stream_;
    std::size_t next_index_ = 0;
};

// Client side: connect and run the initiator role.
HandshakeResult connect_and_handshake(const std::string& host, std::uint16_t port,
                                      SeededStream& stream, const HandshakeOptions& options);

} // namespace mkex
