#pragma once

#include <stdexcept>
#include <string>

namespace delib {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Backend transport failure that survived the configured retries.
struct TransportError : Error {
  using Error::Error;
};

// Scripted backend was asked for a reply it does not have.
struct ScriptExhausted : Error {
  using Error::Error;
};

// No parseable JSON object in an agent reply; carries the raw text so the
// transcript can keep it.
struct MalformedReply : Error {
  std::string raw;
  MalformedReply(const std::string& what, std::string raw_text)
      : Error(what), raw(std::move(raw_text)) {}
};

}  // namespace delib
