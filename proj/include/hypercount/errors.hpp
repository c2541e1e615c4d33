#pragma once

#include <stdexcept>
#include <string>

namespace hypercount {

// Bad arguments or infeasible parameters. The CLI maps this to exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A size or cost bound was exceeded. The CLI maps this to exit code 3.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter vector left the feasible region; `condition` is "C1".."C5".
class RegionError : public DomainError {
 public:
  RegionError(std::string condition, const std::string& what)
      : DomainError(condition + " violated: " + what), condition_(std::move(condition)) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

}  // namespace hypercount
