#pragma once

#include "surfsketch/protocol.hpp"

#include <memory>
#include <string>

namespace surfsketch {

// HTTP + WebSocket front end over a ProtocolHandler. One thread per
// connection. The listening socket is bound in the constructor, so port 0
// picks a free port and a busy port fails immediately with kIo.
class Server {
 public:
  Server(ProtocolHandler& handler, const std::string& address, unsigned short port);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  // Serves until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace surfsketch
