#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "navg/envservice.hpp"

namespace navg {

/// Serves sessions over two transports: newline-delimited JSON on a TCP port
/// and one JSON text frame per message on a websocket port. Each connection is
/// its own Session. Port 0 picks a free port.
class Server {
 public:
  Server(std::shared_ptr<const ServiceConfig> config, std::string address, std::uint16_t tcp_port,
         std::uint16_t ws_port);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds both ports and starts accepting. Throws std::runtime_error when a port is unavailable.
  void start();
  /// Closes listeners and open connections, flushes recordings and joins all threads.
  void stop();

  std::uint16_t tcp_port() const;
  std::uint16_t ws_port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Fresh session id: random hex plus a process-wide counter.
std::string new_session_id();

}  // namespace navg
