#ifndef EBC_ALPHA_HPP
#define EBC_ALPHA_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace ebc {

// Stability / tail index of the Beta(2-a, a) coalescent.  Only the open
// interval (1,2) is meaningful here; the Kingman (a -> 2) and
// Bolthausen-Sznitman (a = 1) endpoints are out of scope.
class Alpha {
 public:
  explicit Alpha(double value) : value_(value) {
    if (!(value > 1.0) || !(value < 2.0) || !std::isfinite(value)) {
      throw std::domain_error("alpha must lie strictly between 1 and 2, got " +
                              std::to_string(value));
    }
  }

  double value() const { return value_; }

 private:
  double value_;
};

}  // namespace ebc

#endif  // EBC_ALPHA_HPP
