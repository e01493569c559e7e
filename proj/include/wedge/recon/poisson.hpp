#pragma once

#include <Eigen/Core>

#include "wedge/core/raster.hpp"

namespace wedge::recon {

/// Integrates a gradient field with zero depth on the raster border.
///
/// The divergence uses the central-difference stencil of
/// depth_to_gradients (border gradients included), and the interior system
/// is diagonalised by a type-I sine transform whose eigenvalues are those of
/// that squared central-difference operator:
///   lambda(i, j) = -sin^2(pi i / (H-1)) - sin^2(pi j / (W-1)).
/// depth_to_gradients followed by poisson_solve is therefore the identity on
/// zero-border depth maps. Grid spacing is 1 px, so the result is in pixel
/// units. Requires at least 4x4.
DepthMap poisson_solve(const GradientField& grads);

/// Double-precision result (rows x cols), before rounding to float.
Eigen::MatrixXd poisson_solve_f64(const GradientField& grads);

/// Same, scaled to mm (pixel-unit result divided by ppmm).
DepthMap poisson_solve(const GradientField& grads, double ppmm);

}  // namespace wedge::recon
