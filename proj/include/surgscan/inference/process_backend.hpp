#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "surgscan/inference/backend.hpp"

namespace surgscan::inference {

/// Adapter for an external detector runtime.
///
/// Invocation is `<cmd> <image-path>`. The process prints one verdict per
/// line as `label<TAB>confidence`; empty output means no detections. A
/// nonzero exit, a timeout or an unparsable line is a BackendFailure. When
/// the input has no on-disk source the raster is written to a temporary PNG.
class ProcessBackend : public ClassifierBackend {
 public:
  /// `command` is split on whitespace into argv; no shell is involved.
  explicit ProcessBackend(std::string_view command,
                          std::chrono::milliseconds timeout = std::chrono::seconds(30),
                          bool concurrency_safe = true);

  std::vector<ClassifierVerdict> run(const InspectionInput& input) override;
  bool concurrency_safe() const override { return concurrency_safe_; }

  const std::vector<std::string>& argv() const noexcept { return argv_; }

 private:
  std::vector<std::string> argv_;
  std::chrono::milliseconds timeout_;
  bool concurrency_safe_;
};

/// Parses the `label<TAB>confidence` protocol. Throws BackendFailure.
std::vector<ClassifierVerdict> parse_verdict_lines(std::string_view output);

}  // namespace surgscan::inference
