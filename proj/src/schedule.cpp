#include "vgrid/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace vgrid {

void NoiseSchedule::validate() const {
  if (sigmas.size() < 2) throw std::invalid_argument("schedule: need at least one step");
  if (sigmas.back() != 0.0) throw std::invalid_argument("schedule: final level must be 0");
  if (!(sigmas.front() > 0)) throw std::invalid_argument("schedule: starting level must be positive");
  for (size_t i = 0; i + 1 < sigmas.size(); ++i) {
    if (!std::isfinite(sigmas[i]) || !(sigmas[i] > sigmas[i + 1])) {
      throw std::invalid_argument("schedule: levels must be finite and strictly decreasing");
    }
  }
}

NoiseSchedule make_schedule(int steps, double sigma_min, double sigma_max, double rho) {
  if (steps < 1) throw std::invalid_argument("make_schedule: steps must be >= 1");
  if (!(sigma_min > 0) || !(sigma_max > sigma_min)) {
    throw std::invalid_argument("make_schedule: need 0 < sigma_min < sigma_max");
  }
  if (!(rho > 0) || !std::isfinite(rho)) throw std::invalid_argument("make_schedule: rho must be positive");

  NoiseSchedule schedule;
  if (steps == 1) {
    schedule.sigmas = {sigma_max, 0.0};
    return schedule;
  }
  double max_inv_rho = std::pow(sigma_max, 1.0 / rho);
  double min_inv_rho = std::pow(sigma_min, 1.0 / rho);
  schedule.sigmas.reserve(steps + 1);
  for (int k = 0; k < steps; ++k) {
    double u = static_cast<double>(k) / (steps - 1);
    schedule.sigmas.push_back(std::pow(max_inv_rho + u * (min_inv_rho - max_inv_rho), rho));
  }
  schedule.sigmas.push_back(0.0);
  schedule.validate();
  return schedule;
}

}  // namespace vgrid
