#pragma once

#include <stdexcept>
#include <string>

namespace mtw {

// Numerical failures carry a short tag so the CLI can report them as JSON.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)) {}
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

#define MTW_DECLARE_ERROR(Name)                                   \
  class Name : public NumericalError {                            \
   public:                                                        \
    explicit Name(const std::string& what) : NumericalError(#Name, what) {} \
  };

MTW_DECLARE_ERROR(QuadratureFailure)
MTW_DECLARE_ERROR(RamificationPoint)
MTW_DECLARE_ERROR(NoConvergence)
MTW_DECLARE_ERROR(WrongComponent)
MTW_DECLARE_ERROR(DegenerateNullspace)
MTW_DECLARE_ERROR(NotInFamily)
MTW_DECLARE_ERROR(DegenerateAnchor)
MTW_DECLARE_ERROR(DegeneratePoint)
MTW_DECLARE_ERROR(NoSolution)

#undef MTW_DECLARE_ERROR

// Invalid user input (bad configuration, malformed files).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mtw
