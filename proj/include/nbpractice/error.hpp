#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nbpractice {

enum class ErrorCode {
  malformed_json,
  unsupported_format,
  not_a_notebook,
  not_a_code_cell,
  index_out_of_range,
  unmapped_line,
  bridge_unavailable,
  bridge_parse,
  empty_input,
  out_of_range,
  config_mismatch,
  no_scores,
  no_inputs,
  config_error,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_json: return "MalformedJson";
    case ErrorCode::unsupported_format: return "UnsupportedFormat";
    case ErrorCode::not_a_notebook: return "NotANotebook";
    case ErrorCode::not_a_code_cell: return "NotACodeCell";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::unmapped_line: return "UnmappedLine";
    case ErrorCode::bridge_unavailable: return "BridgeUnavailable";
    case ErrorCode::bridge_parse: return "BridgeParse";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::config_mismatch: return "ConfigMismatch";
    case ErrorCode::no_scores: return "NoScores";
    case ErrorCode::no_inputs: return "NoInputs";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

// Every failure the library reports carries a code; file-level failures also
// carry the offending path so corpus runs can record them per notebook.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string path = {})
      : std::runtime_error(compose(code, message, path)),
        code_(code),
        detail_(std::move(message)),
        path_(std::move(path)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& path() const noexcept { return path_; }

 private:
  static std::string compose(ErrorCode code, const std::string& message,
                             const std::string& path) {
    std::string out(to_string(code));
    if (!path.empty()) out += " [" + path + "]";
    out += ": " + message;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  std::string path_;
};

}  // namespace nbpractice
