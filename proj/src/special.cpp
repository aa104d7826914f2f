#include "dosc/special.hpp"

#include <cmath>

#include "dosc/errors.hpp"

namespace dosc {

double gamma_function(double z) {
  if (!(z > 0.0)) throw Error(ErrorKind::DomainError, "gamma_function requires z > 0");
  return std::tgamma(z);
}

}  // namespace dosc
