/*
 * Copyright 2026 The shared_control Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "shared_control/teleop_server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <csignal>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>

namespace shared_control {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

constexpr auto kSimPeriod = std::chrono::microseconds(1'000'000 / kTeleopSimHz);
constexpr int kTicksPerFrame = kTeleopSimHz / kTeleopFrameHz;

constexpr const char* kPlaceholderPage =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>shared_control</title>"
    "</head><body><p>No UI bundle is installed. Start the server with "
    "<code>--static DIR</code> or connect a client to <code>/teleop</code>.</p>"
    "</body></html>\n";

std::string content_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, const TeleopCatalog& catalog)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), session_(catalog) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->queue_control(self->session_.world_message().dump());
      self->read();
      self->next_expiry_ = std::chrono::steady_clock::now() + kSimPeriod;
      self->schedule();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      if (auto reply = self->session_.handle_message(text)) {
        self->queue_control(reply->dump());
      }
      self->read();
    });
  }

  void schedule() {
    timer_.expires_at(next_expiry_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      self->tick();
    });
  }

  void tick() {
    session_.step();
    if (++sim_ticks_ % kTicksPerFrame == 0) {
      pending_frame_ = session_.next_frame().dump();
      flush();
    }
    next_expiry_ += kSimPeriod;
    const auto now = std::chrono::steady_clock::now();
    // Missed ticks are dropped rather than replayed in a burst.
    if (now > next_expiry_ + kSimPeriod) next_expiry_ = now + kSimPeriod;
    schedule();
  }

  void queue_control(std::string message) {
    control_.push_back(std::move(message));
    flush();
  }

  void flush() {
    if (writing_ || closed_) return;
    if (!control_.empty()) {
      out_ = std::move(control_.front());
      control_.pop_front();
    } else if (pending_frame_) {
      out_ = std::move(*pending_frame_);
      pending_frame_.reset();
    } else {
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(out_), [self = shared_from_this()](beast::error_code ec,
                                                                    std::size_t) {
      self->writing_ = false;
      if (ec) {
        self->close();
        return;
      }
      self->flush();
    });
  }

  void close() {
    closed_ = true;
    timer_.cancel();
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  TeleopSession session_;
  beast::flat_buffer buffer_;
  std::chrono::steady_clock::time_point next_expiry_;
  std::int64_t sim_ticks_ = 0;
  std::deque<std::string> control_;
  std::optional<std::string> pending_frame_;
  std::string out_;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, const ServeOptions& options)
      : stream_(std::move(socket)), options_(options) {}

  void start() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->handle();
                     });
  }

  void handle() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/teleop") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), options_.catalog)
            ->start(std::move(req_));
        return;
      }
      respond(http::status::not_found, "text/plain", "websocket endpoint is /teleop\n");
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      respond(http::status::method_not_allowed, "text/plain", "GET only\n");
      return;
    }
    std::string target(req_.target());
    target = target.substr(0, target.find('?'));
    if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
      respond(http::status::bad_request, "text/plain", "bad path\n");
      return;
    }
    if (target.back() == '/') target += "index.html";
    if (!options_.static_dir.empty()) {
      const std::filesystem::path file = options_.static_dir / target.substr(1);
      std::ifstream f(file, std::ios::binary);
      if (f && std::filesystem::is_regular_file(file)) {
        std::ostringstream body;
        body << f.rdbuf();
        respond(http::status::ok, content_type(file), body.str());
        return;
      }
    }
    if (target == "/index.html") {
      respond(http::status::ok, "text/html", kPlaceholderPage);
      return;
    }
    respond(http::status::not_found, "text/plain", "not found\n");
  }

  void respond(http::status status, const std::string& type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::content_type, type);
    res->set(http::field::cache_control, "no-cache");
    res->keep_alive(req_.keep_alive());
    if (req_.method() == http::verb::head) {
      res->content_length(body.size());
    } else {
      res->body() = std::move(body);
      res->prepare_payload();
    }
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (res->need_eof()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->read();
                      });
  }

  beast::tcp_stream stream_;
  const ServeOptions& options_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct TeleopServer::Impl {
  explicit Impl(ServeOptions opts)
      : options(std::move(opts)), acceptor(io) {
    // Fail early on a bad catalog rather than on the first connection.
    TeleopSession probe(options.catalog);
    const tcp::endpoint endpoint(asio::ip::make_address(options.address), options.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen(asio::socket_base::max_listen_connections);
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), options)->start();
      accept();
    });
  }

  ServeOptions options;
  asio::io_context io;
  tcp::acceptor acceptor;
};

TeleopServer::TeleopServer(ServeOptions options)
    : impl_(std::make_unique<Impl>(std::move(options))) {}

TeleopServer::~TeleopServer() = default;

unsigned short TeleopServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void TeleopServer::run() {
  impl_->accept();
  std::optional<asio::signal_set> signals;
  if (impl_->options.handle_signals) {
    signals.emplace(impl_->io, SIGINT, SIGTERM);
    signals->async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  impl_->io.run();
}

void TeleopServer::stop() {
  asio::post(impl_->io, [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
    impl_->io.stop();
  });
}

}  // namespace shared_control
