#pragma once

#include <functional>

#include "gje/types.hpp"

namespace gje {

/// Scalar function of a flattened variable vector.
using FlatFn = std::function<double(const Vec&)>;

/// Step for an order-k central difference on an axis of the given width:
/// h_k = eps^(1/(k+2)) * width.
double fd_step(int total_order, double width);

/// Nested second-order central differences; multi gives the per-axis
/// derivative orders, steps the per-axis step sizes.
double nested_central(const FlatFn& f, const Vec& v, const VecI& multi, const Vec& steps);

/// Central differences with one Richardson level (steps 2h and 4h).
/// Plain order-2 differences at the base step sit right at the
/// truncation/rounding crossover for 4th-order partials; the
/// extrapolation buys the margin the cross-checks against analytic
/// derivatives need.
double fd_partial_flat(const FlatFn& f, const Vec& v, const VecI& multi,
                       const Vec& base_steps);

}  // namespace gje
