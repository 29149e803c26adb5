#pragma once

#include <vector>

namespace vgrid {

// Strictly decreasing noise levels sigma_T ... sigma_1, sigma_0 = 0.
// sigmas[0] is the starting (largest) level; the final entry is exactly 0.
struct NoiseSchedule {
  std::vector<double> sigmas;

  int steps() const { return static_cast<int>(sigmas.size()) - 1; }
  double max_sigma() const { return sigmas.front(); }
  void validate() const;
};

// Karras-style power interpolation between sigma_max and sigma_min over
// `steps` levels, with a final 0 appended.
NoiseSchedule make_schedule(int steps, double sigma_min, double sigma_max, double rho);

}  // namespace vgrid
