#include "motionrig/services.hpp"

#include <cstdlib>

#include <httplib.h>

#include "detail/http.hpp"
#include "motionrig/errors.hpp"

namespace motionrig {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

ServiceEndpoints ServiceEndpoints::from_environment() {
  return {env_or_empty("ADAPTER_ENDPOINT"),   env_or_empty("LLM_ENDPOINT"),
          env_or_empty("DESCRIBER_ENDPOINT"), env_or_empty("EMBEDDER_ENDPOINT"),
          env_or_empty("GENERATOR_ENDPOINT"), env_or_empty("POSE_EXTRACTOR_ENDPOINT")};
}

namespace detail {

HttpJsonClient::HttpJsonClient(std::string endpoint, int max_in_flight, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout), max_in_flight_(max_in_flight < 1 ? 1 : max_in_flight) {
  constexpr std::string_view scheme = "http://";
  if (endpoint_.rfind(scheme, 0) != 0)
    throw Error(Errc::InvalidArgument, "endpoint '" + endpoint_ + "' must start with http://");
  const auto slash = endpoint_.find('/', scheme.size());
  origin_ = endpoint_.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : endpoint_.substr(slash);
  if (origin_.size() == scheme.size()) throw Error(Errc::InvalidArgument, "endpoint '" + endpoint_ + "' has no host");
}

std::string HttpJsonClient::post(const std::string& body) {
  {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
  }
  struct Release {
    HttpJsonClient* self;
    ~Release() {
      {
        std::lock_guard lock(self->mutex_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};

  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  auto res = client.Post(path_, body, "application/json");
  if (!res)
    throw Error(Errc::ServiceUnreachable,
                "POST " + endpoint_ + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw Error(Errc::ContractViolation, "POST " + endpoint_ + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

Json HttpJsonClient::post_json(const Json& body) {
  return parse_json(post(body.dump()), "response from " + endpoint_);
}

}  // namespace detail
}  // namespace motionrig
