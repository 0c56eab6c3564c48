#pragma once

namespace raradapt {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF). Throws std::domain_error outside (0, 1).
double normal_quantile(double q);

// Upper quantile z_alpha = Phi^{-1}(1 - alpha).
double upper_quantile(double alpha);

}  // namespace raradapt
