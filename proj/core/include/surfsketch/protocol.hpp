#pragma once

#include "surfsketch/error.hpp"
#include "surfsketch/service.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace surfsketch {

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Transport-independent request handling; see docs/protocol.md for the
// message shapes. Every failure becomes an `error` message, never an
// exception.
class ProtocolHandler {
 public:
  explicit ProtocolHandler(Service& service) : service_(&service) {}

  Service& service() { return *service_; }

  HttpResponse handle_http(std::string_view method, std::string_view target, std::string_view body);

  // Session id when `target` is a stream endpoint (/sessions/{id}/stream).
  static std::optional<std::string> stream_session(std::string_view target);

  // One client text frame in, one server text frame out.
  std::string handle_stream_message(const std::string& session_id, std::string_view message);

 private:
  Service* service_;
};

// HTTP status used for an error code.
int http_status(ErrorCode code);

}  // namespace surfsketch
