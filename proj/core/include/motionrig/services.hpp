#pragma once

/// \file services.hpp
/// \brief Locations of the external model services. Request and response
/// bodies are documented in docs/services.md.

#include <string>

namespace motionrig {

struct ServiceEndpoints {
  std::string adapter;         ///< ADAPTER_ENDPOINT
  std::string llm;             ///< LLM_ENDPOINT
  std::string describer;       ///< DESCRIBER_ENDPOINT
  std::string embedder;        ///< EMBEDDER_ENDPOINT
  std::string generator;       ///< GENERATOR_ENDPOINT
  std::string pose_extractor;  ///< POSE_EXTRACTOR_ENDPOINT

  static ServiceEndpoints from_environment();
};

/// Value of the environment variable, or empty.
std::string env_or_empty(const char* name);

}  // namespace motionrig
