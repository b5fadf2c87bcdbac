#ifndef BOTMATCH_ERROR_HPP
#define BOTMATCH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace botmatch {

enum class ErrorKind {
  io,
  format,
  dataset,
  config,
  mode,
  size,
  spectral,
  training,
  query,
  alignment,
  input,
  evaluation,
  construction,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io_error";
    case ErrorKind::format: return "format_error";
    case ErrorKind::dataset: return "dataset_error";
    case ErrorKind::config: return "config_error";
    case ErrorKind::mode: return "mode_error";
    case ErrorKind::size: return "size_error";
    case ErrorKind::spectral: return "spectral_error";
    case ErrorKind::training: return "training_error";
    case ErrorKind::query: return "query_error";
    case ErrorKind::alignment: return "alignment_error";
    case ErrorKind::input: return "input_error";
    case ErrorKind::evaluation: return "evaluation_error";
    case ErrorKind::construction: return "construction_error";
  }
  return "error";
}

/// Every failure raised by the library carries a kind so that the CLI can map
/// it to an exit code and the service to an HTTP status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace botmatch

#endif  // BOTMATCH_ERROR_HPP
