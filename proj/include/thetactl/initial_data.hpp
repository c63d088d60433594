#pragma once

#include "thetactl/grid.hpp"
#include "thetactl/spectral.hpp"

namespace thetactl {

/// (2 + 3 cos 2theta - 2 sin 2theta) * eta. Signed; total mass 2 pi on [0, 1].
PhysicalField paper_cossin2_density(const GridSpec& grid);
/// max(0, paper_cossin2), a nonnegative variant that particles can sample.
PhysicalField paper_clipped_density(const GridSpec& grid);
/// Uniform probability density on S^1 x [eta_min, eta_max].
PhysicalField uniform_density(const GridSpec& grid);
/// von Mises(kappa, mu) in theta times uniform in eta; unit total mass.
PhysicalField von_mises_density(const GridSpec& grid, double kappa, double mean);

/// Most negative nodal value and where it sits; value >= 0 means none.
struct NegativeNode {
  double value = 0.0;
  int eta_index = 0;
  int theta_index = 0;
};
NegativeNode most_negative_node(const PhysicalField& density);

}  // namespace thetactl
