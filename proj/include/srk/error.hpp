#ifndef SRK_ERROR_HPP
#define SRK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace srk {

/// Base of every error raised by the library. `kind()` is a stable,
/// machine-readable tag (used verbatim in the CLI's error JSON).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SRK_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

SRK_DEFINE_ERROR(ShapeMismatch);
SRK_DEFINE_ERROR(InvalidPermutation);
SRK_DEFINE_ERROR(OddUniverse);
SRK_DEFINE_ERROR(CapExceeded);
SRK_DEFINE_ERROR(UnknownVariable);
SRK_DEFINE_ERROR(InvalidShape);
SRK_DEFINE_ERROR(InvalidTransposeSet);
SRK_DEFINE_ERROR(DegreeCapExceeded);
SRK_DEFINE_ERROR(UnknownRule);
SRK_DEFINE_ERROR(RegimeViolation);
SRK_DEFINE_ERROR(PreconditionViolation);
SRK_DEFINE_ERROR(NoFeasibleDepth);
SRK_DEFINE_ERROR(InsufficientRange);
SRK_DEFINE_ERROR(ParseError);

#undef SRK_DEFINE_ERROR

}  // namespace srk

#endif  // SRK_ERROR_HPP
