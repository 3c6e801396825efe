#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>

#include "detail/json_io.hpp"

namespace motionrig::detail {

/// POSTs JSON documents to one endpoint ("http://host[:port][/path]").
/// At most `max_in_flight` requests are outstanding per client.
class HttpJsonClient {
 public:
  explicit HttpJsonClient(std::string endpoint, int max_in_flight = 4,
                          std::chrono::seconds timeout = std::chrono::seconds(120));

  /// Throws Error(ServiceUnreachable) on transport failure and
  /// Error(ContractViolation) on a non-2xx status.
  std::string post(const std::string& body);
  Json post_json(const Json& body);

  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string endpoint_;
  std::string origin_;
  std::string path_;
  std::chrono::seconds timeout_;
  int max_in_flight_;
  int in_flight_ = 0;
  std::mutex mutex_;
  std::condition_variable cv_;
};

}  // namespace motionrig::detail
