#pragma once

#include <mutex>
#include <string>
#include <vector>

namespace bonefrag {

// Collects warnings raised while processing data (open meshes, corrupted
// columns, leakage-prone protocols). Thread-safe.
class Diagnostics {
 public:
  explicit Diagnostics(bool echo_to_stderr = false) : echo_(echo_to_stderr) {}

  void warn(std::string message);
  std::vector<std::string> messages() const;
  bool empty() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> messages_;
  bool echo_;
};

// Routes to `sink` when given, otherwise to stderr.
void emit_warning(Diagnostics* sink, std::string message);

}  // namespace bonefrag
