#include "bonefrag/diagnostics.hpp"

#include <iostream>

namespace bonefrag {

void Diagnostics::warn(std::string message) {
  std::lock_guard lock(mutex_);
  if (echo_) std::cerr << "warning: " << message << '\n';
  messages_.push_back(std::move(message));
}

std::vector<std::string> Diagnostics::messages() const {
  std::lock_guard lock(mutex_);
  return messages_;
}

bool Diagnostics::empty() const {
  std::lock_guard lock(mutex_);
  return messages_.empty();
}

void emit_warning(Diagnostics* sink, std::string message) {
  if (sink != nullptr) {
    sink->warn(std::move(message));
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace bonefrag
