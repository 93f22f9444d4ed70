#ifndef LOCPRIV_ERROR_H_
#define LOCPRIV_ERROR_H_

#include <stdexcept>
#include <string>

namespace locpriv {

// Raised when an input violates a documented precondition or invariant.
// The CLI maps this to exit code 2; any other exception maps to 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace locpriv

#endif  // LOCPRIV_ERROR_H_
