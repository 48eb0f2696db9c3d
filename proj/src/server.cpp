#include "navg/server.hpp"

#include <atomic>
#include <cstdio>
#include <list>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace navg {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxLine = 1 << 20;

}  // namespace

std::string new_session_id() {
  static std::atomic<unsigned> counter{0};
  static const std::uint32_t salt = std::random_device{}();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08x-%04x", salt, counter.fetch_add(1) + 1);
  return buf;
}

struct Server::Impl {
  std::shared_ptr<const ServiceConfig> config;
  std::string address;
  std::uint16_t tcp_requested;
  std::uint16_t ws_requested;
  asio::io_context io;
  tcp::acceptor tcp_acceptor{io};
  tcp::acceptor ws_acceptor{io};
  std::thread io_thread;
  bool running = false;
  std::uint16_t tcp_bound = 0;
  std::uint16_t ws_bound = 0;

  std::mutex mutex;
  std::list<std::shared_ptr<tcp::socket>> sockets;
  std::list<std::thread> workers;

  void open(tcp::acceptor& acceptor, std::uint16_t port) {
    boost::system::error_code ec;
    const auto ip = asio::ip::make_address(address, ec);
    if (ec) throw std::runtime_error("invalid bind address '" + address + "'");
    const tcp::endpoint ep(ip, port);
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(tcp::acceptor::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + ec.message());
  }

  void accept(tcp::acceptor& acceptor, bool ws) {
    acceptor.async_accept([this, &acceptor, ws](boost::system::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      auto shared = std::make_shared<tcp::socket>(std::move(socket));
      {
        std::lock_guard lock(mutex);
        sockets.push_back(shared);
        workers.emplace_back([this, shared, ws] {
          try {
            if (ws) {
              serve_ws(shared);
            } else {
              serve_tcp(shared);
            }
          } catch (const std::exception&) {
            // peer went away; the session destructor flushes any recording
          }
          forget(shared);
        });
      }
      accept(acceptor, ws);
    });
  }

  void forget(const std::shared_ptr<tcp::socket>& socket) {
    std::lock_guard lock(mutex);
    sockets.remove(socket);
  }

  void serve_tcp(const std::shared_ptr<tcp::socket>& socket) {
    Session session(config, new_session_id());
    asio::streambuf buffer(kMaxLine);
    for (;;) {
      boost::system::error_code ec;
      const std::size_t n = asio::read_until(*socket, buffer, '\n', ec);
      if (ec) break;
      std::string line(asio::buffers_begin(buffer.data()), asio::buffers_begin(buffer.data()) + n - 1);
      buffer.consume(n);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const std::string reply = session.handle_line(line) + "\n";
      asio::write(*socket, asio::buffer(reply), ec);
      if (ec) break;
    }
  }

  void serve_ws(const std::shared_ptr<tcp::socket>& socket) {
    websocket::stream<tcp::socket&> stream(*socket);
    stream.read_message_max(kMaxLine);
    stream.accept();
    stream.text(true);
    Session session(config, new_session_id());
    for (;;) {
      beast::flat_buffer buffer;
      boost::system::error_code ec;
      stream.read(buffer, ec);
      if (ec) break;
      const std::string reply = session.handle_line(beast::buffers_to_string(buffer.data()));
      stream.write(asio::buffer(reply), ec);
      if (ec) break;
    }
  }
};

Server::Server(std::shared_ptr<const ServiceConfig> config, std::string address, std::uint16_t tcp_port,
               std::uint16_t ws_port)
    : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->address = std::move(address);
  impl_->tcp_requested = tcp_port;
  impl_->ws_requested = ws_port;
}

Server::~Server() { stop(); }

void Server::start() {
  if (impl_->running) return;
  impl_->open(impl_->tcp_acceptor, impl_->tcp_requested);
  try {
    impl_->open(impl_->ws_acceptor, impl_->ws_requested);
  } catch (...) {
    impl_->tcp_acceptor.close();
    throw;
  }
  impl_->tcp_bound = impl_->tcp_acceptor.local_endpoint().port();
  impl_->ws_bound = impl_->ws_acceptor.local_endpoint().port();
  impl_->accept(impl_->tcp_acceptor, false);
  impl_->accept(impl_->ws_acceptor, true);
  impl_->running = true;
  impl_->io_thread = std::thread([this] { impl_->io.run(); });
}

void Server::stop() {
  if (!impl_->running) return;
  impl_->running = false;
  asio::post(impl_->io, [this] {
    boost::system::error_code ec;
    impl_->tcp_acceptor.close(ec);
    impl_->ws_acceptor.close(ec);
  });
  impl_->io_thread.join();
  std::list<std::thread> workers;
  {
    std::lock_guard lock(impl_->mutex);
    for (auto& s : impl_->sockets) {
      boost::system::error_code ec;
      s->shutdown(tcp::socket::shutdown_both, ec);
    }
    workers.swap(impl_->workers);
  }
  for (auto& w : workers) w.join();
}

std::uint16_t Server::tcp_port() const { return impl_->tcp_bound; }
std::uint16_t Server::ws_port() const { return impl_->ws_bound; }

}  // namespace navg
