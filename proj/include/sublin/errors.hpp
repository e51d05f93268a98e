#pragma once

#include <stdexcept>
#include <string>

namespace sublin {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an expectation integral fails to converge against one of the
// generators; carries the label of the offending generator.
class DivergentIntegral : public Error {
 public:
  DivergentIntegral(std::string generator, const std::string& what)
      : Error(what), generator_(std::move(generator)) {}
  const std::string& generator() const noexcept { return generator_; }

 private:
  std::string generator_;
};

}  // namespace sublin
