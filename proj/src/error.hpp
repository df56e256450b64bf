#pragma once

#include <stdexcept>
#include <string>

namespace semcut {

// Mirrors semcut_status in the public C header; values must stay in sync.
enum class ErrorCode {
  invalid_argument = 1,
  dimension = 2,
  non_finite = 3,
  io = 4,
  bad_magic = 5,
  bad_version = 6,
  truncated = 7,
  dimension_overflow = 8,
  format = 9,
  degenerate_partition = 10,
  isolated_node = 11,
  missing_attention = 12,
  empty_input = 13,
  too_large = 14,
  config = 15,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace semcut
