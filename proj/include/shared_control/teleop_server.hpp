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

// HTTP + websocket front end for TeleopSession. GET /teleop with an upgrade
// opens a session (one per connection); other GET requests are served from
// the static directory. Everything runs on one io_context thread: each
// session has a 40 Hz simulation timer, a latest-wins input slot and a
// latest-wins outgoing frame slot (world and error messages are queued).

#ifndef SHARED_CONTROL_TELEOP_SERVER_HPP_
#define SHARED_CONTROL_TELEOP_SERVER_HPP_

#include <filesystem>
#include <memory>
#include <string>

#include "shared_control/teleop.hpp"

namespace shared_control {

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  std::filesystem::path static_dir;
  TeleopCatalog catalog;
  // Stop cleanly on SIGINT / SIGTERM.
  bool handle_signals = false;
};

class TeleopServer {
 public:
  // Binds immediately; throws std::system_error when the port is taken.
  explicit TeleopServer(ServeOptions options);
  ~TeleopServer();

  unsigned short port() const;

  // Blocks until stop() is called.
  void run();
  // Safe to call from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace shared_control

#endif  // SHARED_CONTROL_TELEOP_SERVER_HPP_
