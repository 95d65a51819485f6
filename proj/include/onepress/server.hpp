#pragma once

// TCP transport for GatewaySession: one thread and one session per
// connection, newline-framed messages in both directions. POSIX only.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "onepress/gateway.hpp"

namespace onepress {

class GatewayServer {
 public:
  /// Binds and listens immediately; port 0 picks a free port (see port()).
  GatewayServer(std::shared_ptr<const GatewayFixtures> fixtures, const std::string& host, std::uint16_t port)
      : fixtures_(std::move(fixtures)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      ::close(listen_fd_);
      throw std::runtime_error("invalid IPv4 address '" + host + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
      const std::string why = std::strerror(errno);
      ::close(listen_fd_);
      throw std::runtime_error("bind/listen on " + host + ":" + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }

  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  ~GatewayServer() {
    stop();
    std::vector<std::thread> workers;
    {
      std::lock_guard lock(mu_);
      workers.swap(workers_);
    }
    for (auto& w : workers) w.join();
    ::close(listen_fd_);
  }

  std::uint16_t port() const { return port_; }

  /// Accepts connections until stop() is called.
  void serve() {
    while (!stopping_) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (stopping_) break;
        if (errno == EINTR || errno == ECONNABORTED) continue;
        break;
      }
      std::lock_guard lock(mu_);
      if (stopping_) {
        ::close(fd);
        break;
      }
      clients_.push_back(fd);
      workers_.emplace_back([this, fd] { run_session(fd); });
    }
  }

  /// Unblocks serve() and all open connections.
  void stop() {
    if (stopping_.exchange(true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    std::lock_guard lock(mu_);
    for (int fd : clients_) ::shutdown(fd, SHUT_RDWR);
  }

 private:
  static bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const auto n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  void run_session(int fd) {
    GatewaySession session(fixtures_);
    std::string buffer;
    char chunk[4096];
    bool open = true;
    while (open) {
      const auto n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (auto nl = buffer.find('\n', start); nl != std::string::npos; nl = buffer.find('\n', start)) {
        std::string_view line(buffer.data() + start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        start = nl + 1;
        if (line.empty()) continue;
        std::string reply;
        for (const auto& out : session.handle_line(line)) reply += out + '\n';
        if (!reply.empty() && !send_all(fd, reply)) {
          open = false;
          break;
        }
      }
      buffer.erase(0, start);
    }
    std::lock_guard lock(mu_);
    std::erase(clients_, fd);
    ::close(fd);
  }

  std::shared_ptr<const GatewayFixtures> fixtures_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::vector<int> clients_;
  std::vector<std::thread> workers_;
};

}  // namespace onepress
