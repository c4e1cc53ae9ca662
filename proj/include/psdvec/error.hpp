#pragma once

#include <stdexcept>
#include <string>

namespace psdvec {

// Every failure surfaced to callers carries a short machine-readable class
// (printed by the CLI as `error[<class>]: <message>`).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

inline Error io_error(const std::string& msg) { return Error("io", msg); }
inline Error invalid_argument(const std::string& msg) { return Error("invalid-argument", msg); }
inline Error empty_corpus(const std::string& msg) { return Error("empty-corpus", msg); }
inline Error decode_error(const std::string& msg) { return Error("decode", msg); }
inline Error shape_error(const std::string& msg) { return Error("shape", msg); }
inline Error numeric_error(const std::string& msg) { return Error("numeric", msg); }
inline Error singular_error(const std::string& msg) { return Error("singular", msg); }
inline Error oov_error(const std::string& msg) { return Error("oov", msg); }
inline Error config_error(const std::string& msg) { return Error("config", msg); }

}  // namespace psdvec
