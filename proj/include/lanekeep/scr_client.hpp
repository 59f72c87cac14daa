#pragma once

// Blocking datagram client for an SCR race server. The session is strictly
// alternating: one actuator datagram is sent per sensor datagram received.

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <utility>
#include <cstring>
#include <functional>
#include <optional>
#include <string>

#include "lanekeep/errors.hpp"
#include "lanekeep/scr_protocol.hpp"

namespace lanekeep::scr {

// Owning UDP socket, connected to a single peer.
class UdpSocket {
 public:
  UdpSocket() = default;
  UdpSocket(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
      throw ConnectionError("cannot resolve " + host + ": " + ::gai_strerror(rc), 0);
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd_ < 0) {
      ::freeaddrinfo(res);
      throw ConnectionError(std::string("socket: ") + std::strerror(errno), 0);
    }
    const int rc = ::connect(fd_, res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc != 0) {
      ::close(fd_);
      fd_ = -1;
      throw ConnectionError(std::string("connect: ") + std::strerror(errno), 0);
    }
  }
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  UdpSocket(UdpSocket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  UdpSocket& operator=(UdpSocket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~UdpSocket() { reset(); }

  // Errors such as ICMP port-unreachable are swallowed; the following
  // receive reports them as a missed reply.
  void send(std::string_view bytes) {
    (void)::send(fd_, bytes.data(), bytes.size(), 0);
  }

  // nullopt on timeout or refused delivery.
  std::optional<std::string> receive(int timeout_ms) {
    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, timeout_ms);
    if (ready <= 0) return std::nullopt;
    char buf[4096];
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n < 0) {
      // A refused datagram surfaces here; let the caller's timeout budget
      // treat it like a lost reply after waiting out the interval.
      if (errno == ECONNREFUSED) ::poll(nullptr, 0, timeout_ms);
      return std::nullopt;
    }
    return std::string(buf, static_cast<std::size_t>(n));
  }

 private:
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  int fd_ = -1;
};

struct ClientOptions {
  std::string host = "localhost";
  int port = 3001;
  int timeout_ms = 1000;
  int max_retries = 5;
  std::string client_id = "SCR";
  std::array<double, kRangefinderCount> rangefinder_angles = default_rangefinder_angles();
  Literals literals;
};

struct Driver {
  std::function<ActuatorFrame(const SensorFrame&)> drive;
  std::function<void()> on_restart;
  std::function<void()> on_shutdown;
};

enum class SessionEnd { shutdown, timeout };

struct SessionSummary {
  std::size_t steps = 0;
  std::size_t restarts = 0;
  std::size_t timeouts = 0;
  std::size_t parse_errors = 0;
  std::size_t handshake_attempts = 0;
  SessionEnd ended_by = SessionEnd::shutdown;
};

namespace detail {
inline void handshake(UdpSocket& sock, const ClientOptions& opt, SessionSummary& summary) {
  const std::string init = format_identification(opt.client_id, opt.rangefinder_angles);
  for (int attempt = 1; attempt <= opt.max_retries; ++attempt) {
    ++summary.handshake_attempts;
    sock.send(init);
    auto reply = sock.receive(opt.timeout_ms);
    if (reply && trim_datagram(*reply) == opt.literals.identified) return;
  }
  throw ConnectionError("no identification reply from " + opt.host + ":" + std::to_string(opt.port) +
                            " after " + std::to_string(opt.max_retries) + " attempts",
                        opt.max_retries);
}
}  // namespace detail

inline SessionSummary run_client(const ClientOptions& opt, const Driver& driver) {
  if (!driver.drive) throw std::invalid_argument("driver callback is required");
  UdpSocket sock(opt.host, opt.port);
  SessionSummary summary;
  detail::handshake(sock, opt, summary);
  int consecutive_timeouts = 0;
  for (;;) {
    auto msg = sock.receive(opt.timeout_ms);
    if (!msg) {
      ++summary.timeouts;
      if (++consecutive_timeouts >= opt.max_retries) {
        summary.ended_by = SessionEnd::timeout;
        return summary;
      }
      continue;
    }
    consecutive_timeouts = 0;
    const std::string_view text = trim_datagram(*msg);
    if (text == opt.literals.shutdown) {
      if (driver.on_shutdown) driver.on_shutdown();
      summary.ended_by = SessionEnd::shutdown;
      return summary;
    }
    if (text == opt.literals.restart) {
      ++summary.restarts;
      if (driver.on_restart) driver.on_restart();
      detail::handshake(sock, opt, summary);
      continue;
    }
    if (text == opt.literals.identified) continue;
    SensorFrame frame;
    try {
      frame = parse_sensors(text);
    } catch (const ParseError&) {
      ++summary.parse_errors;
      continue;
    }
    sock.send(format_actuators(driver.drive(frame)));
    ++summary.steps;
  }
}

}  // namespace lanekeep::scr
