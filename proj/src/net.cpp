#include "mkex/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "mkex/error.hpp"

namespace mkex {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw Error("io", what + ": " + std::strerror(errno));
}

struct AddrInfoHolder {
    addrinfo* list = nullptr;
    ~AddrInfoHolder() {
        if (list) freeaddrinfo(list);
    }
};

AddrInfoHolder resolve(const std::string& host, std::uint16_t port, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    AddrInfoHolder holder;
    const std::string service = std::to_string(port);
    const int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints,
                               &holder.list);
    if (rc != 0) throw Error("io", "cannot resolve '" + host + "': " + gai_strerror(rc));
    return holder;
}

} // namespace

TcpTransport::~TcpTransport() {
    if (fd_ >= 0) ::close(fd_);
}

TcpTransport::TcpTransport(TcpTransport&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

void TcpTransport::write_all(std::span<const std::uint8_t> data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t sent =
            ::send(fd_, data.data() + done, data.size() - done, MSG_NOSIGNAL);
        if (sent < 0) {
            if (errno == EINTR) continue;
            throw_errno("send failed");
        }
        done += static_cast<std::size_t>(sent);
    }
}

std::size_t TcpTransport::read_some(std::span<std::uint8_t> out) {
    for (;;) {
        const ssize_t got = ::recv(fd_, out.data(), out.size(), 0);
        if (got < 0) {
            if (errno == EINTR) continue;
            throw_errno("recv failed");
        }
        return static_cast<std::size_t>(got);
    }
}

TcpListener TcpListener::bind_to(const std::string& host, std::uint16_t port) {
    AddrInfoHolder addr = resolve(host, port, /*passive=*/true);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket failed");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, addr.list->ai_addr, addr.list->ai_addrlen) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("bind failed");
    }
    if (::listen(fd, 16) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("listen failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("getsockname failed");
    }
    return TcpListener(fd, ntohs(bound.sin_port));
}

TcpListener::~TcpListener() { close(); }

TcpListener::TcpListener(TcpListener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
    other.fd_ = -1;
}

TcpTransport TcpListener::accept_one() {
    if (fd_ < 0) throw Error("io", "listener is closed");
    for (;;) {
        const int client = ::accept(fd_, nullptr, nullptr);
        if (client < 0) {
            if (errno == EINTR) continue;
            throw_errno("accept failed");
        }
        return TcpTransport(client);
    }
}

void TcpListener::close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

TcpTransport tcp_connect(const std::string& host, std::uint16_t port) {
    AddrInfoHolder addr = resolve(host, port, /*passive=*/false);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket failed");
    if (::connect(fd, addr.list->ai_addr, addr.list->ai_addrlen) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("connect to " + host + ":" + std::to_string(port) + " failed");
    }
    return TcpTransport(fd);
}

Server::Server(const std::string& host, std::uint16_t port, HandshakeOptions options,
               SeededStream base_stream)
    : listener_(TcpListener::bind_to(host, port)),
      options_(options),
      base_stream_(std::move(base_stream)) {}

Server::~Server() = default;

SessionOutcome Server::serve_one() {
    const std::size_t index = next_index_++;
    SessionOutcome outcome;
    outcome.index = index;
    try {
        TcpTransport conn = listener_.accept_one();
        SeededStream session_stream = base_stream_.derive("session-" + std::to_string(index));
        outcome.result = handshake(conn, Role::responder, session_stream, options_);
    } catch (const Error& e) {
        outcome.error_code = e.code();
        outcome.error_message = e.what();
    }
    return outcome;
}

std::vector<SessionOutcome> Server::serve_many(std::size_t count, bool concurrent) {
    std::vector<SessionOutcome> outcomes(count);
    if (!concurrent) {
        for (std::size_t i = 0; i < count; ++i) outcomes[i] = serve_one();
        return outcomes;
    }
    std::vector<std::thread> workers;
    workers.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t index = next_index_++;
        SessionOutcome* slot = &outcomes[i];
        slot->index = index;
        try {
            auto conn = std::make_shared<TcpTransport>(listener_.accept_one());
            workers.emplace_back([this, conn, index, slot] {
                try {
                    SeededStream session_stream =
                        base_stream_.derive("session-" + std::to_string(index));
                    slot->result = handshake(*conn, Role::responder, session_stream, options_);
                } catch (const Error& e) {
                    slot->error_code = e.code();
                    slot->error_message = e.what();
                }
            });
        } catch (const Error& e) {
            slot->error_code = e.code();
            slot->error_message = e.what();
        }
    }
    for (auto& w : workers) w.join();
    return outcomes;
}

void Server::stop() { listener_.close(); }

HandshakeResult connect_and_handshake(const std::string& host, std::uint16_t port,
                                      SeededStream& stream, const HandshakeOptions& options) {
    TcpTransport conn = tcp_connect(host, port);
    return handshake(conn, Role::initiator, stream, options);
}

} // namespace mkex
