#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zircon {

enum class Errc {
  length_violation,
  decryption_failure,
  configuration,
  frame,
  authorization,
  sequencing,
  missing_record,
  one_retrieval_violation,
  attack_spec,
  validation,
  domain,
  io,
  parse,
};

std::string_view to_string(Errc code) noexcept;

/// The single exception type thrown by the library. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace zircon
