#include "mkex/wire.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>

#include "mkex/bytes.hpp"
#include "mkex/error.hpp"
#include "mkex/hash.hpp"
#include "mkex/keycodec.hpp"

namespace mkex {

std::vector<std::uint8_t> encode_frame(const Frame& f) {
    if (f.payload.size() > max_payload) throw Error("protocol", "payload exceeds 1 MiB cap");
    std::vector<std::uint8_t> out(frame_header_size + f.payload.size());
    std::copy(frame_magic.begin(), frame_magic.end(), out.begin());
    out[4] = wire_version;
    out[5] = static_cast<std::uint8_t>(f.type);
    store_u32_le(static_cast<std::uint32_t>(f.payload.size()),
                 std::span<std::uint8_t>(out).subspan(6, 4));
    std::copy(f.payload.begin(), f.payload.end(), out.begin() + frame_header_size);
    return out;
}

namespace {

MsgType parse_msg_type(std::uint8_t raw) {
    if (raw < 0x01 || raw > 0x06) throw Error("protocol", "unknown message type");
    return static_cast<MsgType>(raw);
}

void check_header(std::span<const std::uint8_t> header, std::size_t& payload_len) {
    if (!std::equal(frame_magic.begin(), frame_magic.end(), header.begin()))
        throw Error("protocol", "bad frame magic");
    if (header[4] != wire_version) throw Error("protocol", "unsupported wire version");
    payload_len = load_u32_le(header.subspan(6, 4));
    if (payload_len > max_payload) throw Error("protocol", "payload exceeds 1 MiB cap");
}

} // namespace

Frame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < frame_header_size) throw Error("protocol", "frame shorter than header");
    std::size_t payload_len = 0;
    check_header(bytes.first(frame_header_size), payload_len);
    if (bytes.size() != frame_header_size + payload_len)
        throw Error("protocol", "frame length disagrees with header");
    Frame f;
    f.type = parse_msg_type(bytes[5]);
    f.payload.assign(bytes.begin() + frame_header_size, bytes.end());
    return f;
}

void send_frame(Transport& t, const Frame& f) { t.write_all(encode_frame(f)); }

namespace {

void read_exact(Transport& t, std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        const std::size_t got = t.read_some(out.subspan(done));
        if (got == 0) throw Error("io", "connection closed mid-message");
        done += got;
    }
}

} // namespace

Frame recv_frame(Transport& t) {
    std::array<std::uint8_t, frame_header_size> header{};
    read_exact(t, header);
    std::size_t payload_len = 0;
    check_header(header, payload_len);
    Frame f;
    f.type = parse_msg_type(header[5]);
    f.payload.resize(payload_len);
    read_exact(t, f.payload);
    return f;
}

// ---------------------------------------------------------------------------
// In-memory loopback transport
// ---------------------------------------------------------------------------

namespace {

struct PipeBuffer {
    std::mutex mutex;
    std::condition_variable nonempty;
    std::deque<std::uint8_t> bytes;
    bool closed = false;

    void write(std::span<const std::uint8_t> data) {
        {
            std::lock_guard lock(mutex);
            if (closed) throw Error("io", "loopback peer closed");
            bytes.insert(bytes.end(), data.begin(), data.end());
        }
        nonempty.notify_all();
    }

    std::size_t read(std::span<std::uint8_t> out) {
        std::unique_lock lock(mutex);
        nonempty.wait(lock, [&] { return !bytes.empty() || closed; });
        if (bytes.empty()) return 0; // closed and drained
        const std::size_t take = std::min(out.size(), bytes.size());
        for (std::size_t i = 0; i < take; ++i) {
            out[i] = bytes.front();
            bytes.pop_front();
        }
        return take;
    }

    void close() {
        {
            std::lock_guard lock(mutex);
            closed = true;
        }
        nonempty.notify_all();
    }
};

class LoopbackEnd final : public Transport {
public:
    LoopbackEnd(std::shared_ptr<PipeBuffer> in, std::shared_ptr<PipeBuffer> out)
        : in_(std::move(in)), out_(std::move(out)) {}

    ~LoopbackEnd() override {
        // EOF for the peer in both directions
        in_->close();
        out_->close();
    }

    void write_all(std::span<const std::uint8_t> data) override { out_->write(data); }

    std::size_t read_some(std::span<std::uint8_t> out) override { return in_->read(out); }

private:
    std::shared_ptr<PipeBuffer> in_;
    std::shared_ptr<PipeBuffer> out_;
};

} // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback() {
    auto a_to_b = std::make_shared<PipeBuffer>();
    auto b_to_a = std::make_shared<PipeBuffer>();
    return {std::make_unique<LoopbackEnd>(b_to_a, a_to_b),
            std::make_unique<LoopbackEnd>(a_to_b, b_to_a)};
}

// ---------------------------------------------------------------------------
// Handshake
// ---------------------------------------------------------------------------

namespace {

// Per-attempt session record. State may only move forward along the listed
// order; the transcript is append-only.
struct Session {
    Role role;
    std::size_t n;
    SessionState state = SessionState::start;
    std::vector<std::uint8_t> transcript;

    void advance_to(SessionState next) {
        if (next != SessionState::failed &&
            static_cast<std::uint8_t>(next) <= static_cast<std::uint8_t>(state))
            throw Error("protocol", "session state went backwards");
        state = next;
    }

    void log_payload(std::span<const std::uint8_t> payload) {
        transcript.insert(transcript.end(), payload.begin(), payload.end());
    }
};

Digest confirm_digest(Role sender, std::span<const std::uint8_t> transcript,
                      const SharedSecret& secret) {
    const Digest transcript_hash = sha256(transcript);
    const std::uint8_t role_byte = static_cast<std::uint8_t>(sender);
    return sha256_parts({as_bytes("mkex-v1-confirm"),
                         std::span<const std::uint8_t>(&role_byte, 1),
                         transcript_hash,
                         secret.bytes});
}

CMatrix decode_matrix_payload(std::size_t n, std::span<const std::uint8_t> payload) {
    if (payload.size() != n * n * 16) throw Error("protocol", "payload length mismatch");
    return decode_matrix(n, payload);
}

// One protocol attempt. Returns the agreed secret, or nullopt when the
// attempt ended in a detected mismatch and should be retried.
// `mismatch_seen` is set before any abort is sent so the caller can classify
// later transport failures.
std::optional<HandshakeResult> run_attempt(Transport& t, Role role, SeededStream& stream,
                                           const HandshakeOptions& options, bool allow_stale_abort,
                                           bool& mismatch_seen) {
    Session session{role, options.n};
    int stale_budget = allow_stale_abort ? 1 : 0;
    bool retry_wanted = false;

    auto send_msg = [&](MsgType type, std::vector<std::uint8_t> payload, bool log = true) {
        if (log) session.log_payload(payload);
        send_frame(t, Frame{type, std::move(payload)});
    };

    auto send_abort = [&](std::uint8_t reason) {
        session.advance_to(SessionState::failed);
        if (reason == abort_key_mismatch) mismatch_seen = true;
        send_frame(t, Frame{MsgType::abort_session, {reason}});
    };

    // Receives the expected message; skips at most one stale abort left over
    // from the previous attempt; nullopt when the peer aborted this attempt.
    auto recv_expected = [&](MsgType expected) -> std::optional<Frame> {
        for (;;) {
            Frame f = recv_frame(t);
            if (f.type == MsgType::abort_session) {
                const std::uint8_t reason = f.payload.empty() ? 0 : f.payload[0];
                if (reason == abort_negotiation)
                    throw Error("negotiation", "peer aborted: parameter mismatch");
                if (stale_budget > 0) {
                    --stale_budget;
                    continue;
                }
                mismatch_seen = true;
                return std::nullopt;
            }
            if (f.type != expected) throw Error("protocol", "unexpected message type");
            session.log_payload(f.payload);
            return f;
        }
    };

    try {
        const KeyPair mine = generate_keys(stream, options.n);
        const std::size_t n = options.n;
        std::optional<CMatrix> u, v, secret_matrix;

        if (role == Role::initiator) {
            std::vector<std::uint8_t> hello(2);
            store_u16_le(static_cast<std::uint16_t>(n), hello);
            const auto u_bytes = encode_matrix(mine.matrix_key);
            hello.insert(hello.end(), u_bytes.begin(), u_bytes.end());
            send_msg(MsgType::hello, std::move(hello));
            session.advance_to(SessionState::sent_hello);

            auto ack = recv_expected(MsgType::hello_ack);
            if (!ack) return std::nullopt;
            u = mine.matrix_key;
            v = decode_matrix_payload(n, ack->payload);
            session.advance_to(SessionState::exchanged_matrices);

            send_msg(MsgType::pub_a, encode_matrix(compute_public_key(mine.priv, *u, *v)));
            auto pub_b = recv_expected(MsgType::pub_b);
            if (!pub_b) return std::nullopt;
            const CMatrix peer_pub = decode_matrix_payload(n, pub_b->payload);
            session.advance_to(SessionState::exchanged_pubs);

            secret_matrix = compute_secret_matrix(mine.priv, *u, *v, peer_pub);
        } else {
            auto hello = recv_expected(MsgType::hello);
            if (!hello) return std::nullopt;
            if (hello->payload.size() < 2) throw Error("protocol", "hello payload too short");
            const std::size_t peer_n = load_u16_le(std::span(hello->payload).first(2));
            if (peer_n != n) {
                send_abort(abort_negotiation);
                throw Error("negotiation", "peer requested different matrix size");
            }
            u = decode_matrix_payload(n, std::span(hello->payload).subspan(2));
            v = mine.matrix_key;
            session.advance_to(SessionState::sent_hello);

            send_msg(MsgType::hello_ack, encode_matrix(mine.matrix_key));
            session.advance_to(SessionState::exchanged_matrices);

            auto pub_a = recv_expected(MsgType::pub_a);
            if (!pub_a) return std::nullopt;
            const CMatrix peer_pub = decode_matrix_payload(n, pub_a->payload);
            send_msg(MsgType::pub_b, encode_matrix(compute_public_key(mine.priv, *u, *v)));
            session.advance_to(SessionState::exchanged_pubs);

            secret_matrix = compute_secret_matrix(mine.priv, *u, *v, peer_pub);
        }

        HandshakeResult result{extract_secret(*secret_matrix), std::move(*secret_matrix), 1};

        const Role peer_role =
            (role == Role::initiator) ? Role::responder : Role::initiator;
        const Digest mine_digest = confirm_digest(role, session.transcript, result.secret);
        const Digest expected_peer = confirm_digest(peer_role, session.transcript, result.secret);

        send_msg(MsgType::confirm,
                 std::vector<std::uint8_t>(mine_digest.begin(), mine_digest.end()),
                 /*log=*/false);
        auto peer_confirm = recv_expected(MsgType::confirm);
        if (!peer_confirm) return std::nullopt;
        if (!std::equal(expected_peer.begin(), expected_peer.end(), peer_confirm->payload.begin(),
                        peer_confirm->payload.end())) {
            send_abort(abort_key_mismatch);
            return std::nullopt;
        }
        session.advance_to(SessionState::confirmed);
        return result;
    } catch (const Error& e) {
        // Corrupted-but-well-framed content surfaces as decode or arithmetic
        // failures; abort the attempt and let the retry logic decide.
        if (e.code() == "nonfinite" || e.code() == "shape" || e.code() == "degenerate" ||
            e.code() == "degenerate-keys" || e.code() == "overflow") {
            retry_wanted = true;
            try {
                send_abort(abort_key_mismatch);
            } catch (const Error&) {
                // peer already gone; the retry loop classifies what follows
            }
        }
        if (!retry_wanted) throw;
    }
    return std::nullopt;
}

} // namespace

HandshakeResult handshake(Transport& t, Role role, SeededStream& stream,
                          const HandshakeOptions& options) {
    if (options.n < 2 || options.n > 64) throw Error("negotiation", "n must be in [2, 64]");
    if (options.retries < 0) throw Error("negotiation", "retries must be >= 0");

    bool mismatch_seen = false;
    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        try {
            auto result = run_attempt(t, role, stream, options, attempt > 0, mismatch_seen);
            if (result) {
                result->attempts = attempt + 1;
                return std::move(*result);
            }
        } catch (const Error& e) {
            // After a mismatch the peer may legitimately be gone (it either
            // succeeded one-sidedly or exhausted its retries); report that as
            // a failed agreement rather than a transport fault.
            if (e.code() == "io" && mismatch_seen)
                throw Error("agreement-failure", "peer unavailable after confirmation mismatch");
            throw;
        }
    }
    throw Error("agreement-failure", "key confirmation failed on all attempts");
}

} // namespace mkex
