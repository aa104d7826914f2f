#pragma once

namespace dosc {

/// Gamma function for z > 0 (std::tgamma). Throws DomainError for z <= 0.
double gamma_function(double z);

}  // namespace dosc
