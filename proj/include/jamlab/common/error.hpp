#pragma once

#include <stdexcept>
#include <string>

namespace jamlab {

enum class ErrorKind {
  invalid_params,
  invalid_config,
  config_parse,
  io,
  shape_mismatch,
  no_graph,
  invalid_label,
  empty_batch,
  invalid_action,
  empty_matrix,
  invalid_window,
  invalid_tail,
  missing_split,
  missing_class,
  checkpoint_load,
  numeric,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Throws Error(kind, message) when cond is false.
inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) throw Error(kind, message);
}

}  // namespace jamlab
