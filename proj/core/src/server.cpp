#include "surfsketch/server.hpp"

#include "surfsketch/error.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include <atomic>
#include <list>
#include <mutex>
#include <thread>

namespace surfsketch {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct Server::Impl {
  ProtocolHandler* handler;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::atomic<bool> stopping{false};

  struct Connection {
    tcp::socket socket;
    std::thread thread;
    std::atomic<bool> done{false};
    explicit Connection(tcp::socket s) : socket(std::move(s)) {}
  };
  std::mutex mutex;
  std::list<Connection> connections;

  void accept_next();
  void serve(Connection& conn);
  void reap();
};

namespace {

template <class Body>
void add_cors(http::response<Body>& res) {
  res.set(http::field::access_control_allow_origin, "*");
  res.set(http::field::access_control_allow_methods, "GET, POST, DELETE, OPTIONS");
  res.set(http::field::access_control_allow_headers, "Content-Type");
}

void stream_loop(ProtocolHandler& handler, websocket::stream<tcp::socket&>& ws,
                 const std::string& session_id) {
  beast::flat_buffer buffer;
  while (true) {
    buffer.clear();
    beast::error_code ec;
    ws.read(buffer, ec);
    if (ec) return;
    const std::string in = beast::buffers_to_string(buffer.data());
    const std::string out = handler.handle_stream_message(session_id, in);
    ws.text(true);
    ws.write(asio::buffer(out), ec);
    if (ec) return;
  }
}

}  // namespace

void Server::Impl::serve(Connection& conn) {
  beast::error_code ec;
  beast::flat_buffer buffer;
  while (!stopping) {
    http::request<http::string_body> req;
    http::read(conn.socket, buffer, req, ec);
    if (ec) break;

    if (websocket::is_upgrade(req)) {
      const auto session_id = ProtocolHandler::stream_session(std::string(req.target()));
      if (!session_id) {
        http::response<http::string_body> res{http::status::not_found, req.version()};
        res.set(http::field::content_type, "application/json");
        res.body() = R"({"type":"error","error":"not_found","message":"not a stream endpoint"})";
        res.prepare_payload();
        http::write(conn.socket, res, ec);
        break;
      }
      websocket::stream<tcp::socket&> ws(conn.socket);
      ws.accept(req, ec);
      if (ec) break;
      stream_loop(*handler, ws, *session_id);
      break;
    }

    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(req.keep_alive());
    if (req.method() == http::verb::options) {
      res.result(http::status::no_content);
    } else {
      const HttpResponse out =
          handler->handle_http(std::string(req.method_string()), std::string(req.target()), req.body());
      res.result(static_cast<http::status>(out.status));
      res.set(http::field::content_type, out.content_type);
      res.body() = out.body;
    }
    add_cors(res);
    res.prepare_payload();
    http::write(conn.socket, res, ec);
    if (ec || !res.keep_alive()) break;
  }
  conn.socket.shutdown(tcp::socket::shutdown_both, ec);
  conn.done = true;
}

void Server::Impl::reap() {
  std::lock_guard lock(mutex);
  for (auto it = connections.begin(); it != connections.end();) {
    if (it->done) {
      it->thread.join();
      it = connections.erase(it);
    } else {
      ++it;
    }
  }
}

void Server::Impl::accept_next() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec || stopping) return;
    reap();
    {
      std::lock_guard lock(mutex);
      Connection& conn = connections.emplace_back(std::move(socket));
      conn.thread = std::thread([this, &conn] { serve(conn); });
    }
    accept_next();
  });
}

Server::Server(ProtocolHandler& handler, const std::string& address, unsigned short port)
    : impl_(std::make_unique<Impl>()) {
  impl_->handler = &handler;
  beast::error_code ec;
  const auto addr = asio::ip::make_address(address, ec);
  if (ec) fail(ErrorCode::kArgument, "invalid listen address '" + address + "'");
  const tcp::endpoint endpoint(addr, port);
  impl_->acceptor.open(endpoint.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(endpoint, ec);
  if (!ec) impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    fail(ErrorCode::kIo, "cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
  }
}

Server::~Server() {
  stop();
  std::lock_guard lock(impl_->mutex);
  for (auto& c : impl_->connections) {
    if (c.thread.joinable()) c.thread.join();
  }
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept_next();
  impl_->ioc.run();
}

void Server::stop() {
  if (impl_->stopping.exchange(true)) return;
  asio::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
  });
  impl_->ioc.stop();
  std::lock_guard lock(impl_->mutex);
  for (auto& c : impl_->connections) {
    beast::error_code ec;
    if (!c.done) c.socket.shutdown(tcp::socket::shutdown_both, ec);
  }
}

}  // namespace surfsketch
