#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mkex/protocol.hpp"
#include "mkex/randgen.hpp"

namespace mkex {

// Framed wire protocol. Every message is:
//
//   offset  size  field
//   0       4     magic "MKEX" = 4d 4b 45 58
//   4       1     version     = 01
//   5       1     msg_type
//   6       4     payload_len, u32 LE, <= 2^20
//   10      len   payload
//
// Message payloads:
//   HELLO     (01)  n as u16 LE || initiator matrix key U (n^2*16 bytes)
//   HELLO_ACK (02)  responder matrix key V (n^2*16 bytes)
//   PUB_A     (03)  initiator public key A (n^2*16 bytes)
//   PUB_B     (04)  responder public key B (n^2*16 bytes)
//   CONFIRM   (05)  32-byte key-confirmation digest
//   ABORT     (06)  1 reason byte (01 key-mismatch, 02 negotiation)
//
// The confirmation digest is SHA-256("mkex-v1-confirm" || sender role byte ||
// SHA-256(transcript) || secret bytes), where the transcript is every payload
// of the current attempt in send/receive order. Binding the transcript in
// means any in-session tampering surfaces as a confirmation mismatch, never
// as silently different secrets.

enum class MsgType : std::uint8_t {
    hello = 0x01,
    hello_ack = 0x02,
    pub_a = 0x03,
    pub_b = 0x04,
    confirm = 0x05,
    abort_session = 0x06,
};

inline constexpr std::array<std::uint8_t, 4> frame_magic{0x4d, 0x4b, 0x45, 0x58};
inline constexpr std::uint8_t wire_version = 0x01;
inline constexpr std::size_t max_payload = std::size_t{1} << 20;
inline constexpr std::size_t frame_header_size = 10;

inline constexpr std::uint8_t abort_key_mismatch = 0x01;
inline constexpr std::uint8_t abort_negotiation = 0x02;

struct Frame {
    MsgType type{};
    std::vector<std::uint8_t> payload;

    friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& f);     // "protocol" if oversized
Frame decode_frame(std::span<const std::uint8_t> bytes);    // "protocol"

// Blocking byte-stream transport. write_all either writes everything or
// throws "io"; read_some returns 0 only at end of stream.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void write_all(std::span<const std::uint8_t> data) = 0;
    virtual std::size_t read_some(std::span<std::uint8_t> out) = 0;
};

void send_frame(Transport& t, const Frame& f);
Frame recv_frame(Transport& t); // "protocol" on bad header, "io" on EOF

// Connected pair of in-memory transports; each end sees bytes written by the
// other. Destroying or closing one end gives the peer EOF. Thread-safe.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback();

enum class Role : std::uint8_t { initiator = 0x01, responder = 0x02 };

enum class SessionState : std::uint8_t {
    start,
    sent_hello,
    exchanged_matrices,
    exchanged_pubs,
    confirmed,
    failed,
};

struct HandshakeOptions {
    std::size_t n = 4;
    int retries = 3; // additional attempts after the first
};

struct HandshakeResult {
    SharedSecret secret;
    CMatrix secret_matrix; // diagnostic: the matrix the secret came from
    int attempts = 1;      // attempts consumed including the successful one
};

// Runs the full exchange over the transport. Each attempt draws fresh keys
// from the stream; confirmation mismatches burn one retry and restart.
// Errors: "protocol" (bad frames), "negotiation" (n disagrees),
// "agreement-failure" (retries exhausted, or the peer walked away after a
// mismatch), "io" (transport failure).
HandshakeResult handshake(Transport& t, Role role, SeededStream& stream,
                          const HandshakeOptions& options);

} // namespace mkex
