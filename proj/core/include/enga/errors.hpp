#pragma once

#include <stdexcept>
#include <string>

namespace enga {

// Invalid parameter or configuration value.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (bad CSV row, unknown domain,
// duplicate key). `line` is 1-based when the error is tied to a file row,
// 0 otherwise.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg, std::size_t line_no = 0)
      : std::runtime_error(msg), line(line_no) {}
  std::size_t line = 0;
};

// A noisy denominator failed its signal-to-noise gate; the metric is not
// reported. Carries the measured SNR so callers can log it.
struct GateError : std::runtime_error {
  GateError(const std::string& msg, double measured_snr)
      : std::runtime_error(msg), snr(measured_snr) {}
  double snr = 0.0;
};

}  // namespace enga
