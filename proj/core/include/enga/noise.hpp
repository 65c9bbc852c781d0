#pragma once

#include <array>

#include "enga/model.hpp"

namespace enga {

// Parameters of the panel's privacy-release mechanism: zero-centered
// Gaussian noise on every released count (per-action standard deviation)
// and a Laplace-noised minimum-share threshold that controls when a URL
// enters the release.
//
// The same object drives both simulation (injecting the noise) and the
// uncertainty math (SNR, worst-case intervals) that accounts for it.
struct NoiseModel {
  std::array<double, kActionCount> sigma{10, 10, 10, 10, 10, 10, 10, 10, 10, 10};
  double laplace_scale_b = 5.0;
  double share_threshold = 100.0;

  double sigma_of(Action a) const { return sigma[static_cast<std::size_t>(a)]; }
  void set_sigma(Action a, double s) { sigma[static_cast<std::size_t>(a)] = s; }
  void set_all_sigma(double s) { sigma.fill(s); }

  static NoiseModel noiseless() {
    NoiseModel m;
    m.set_all_sigma(0.0);
    return m;
  }
};

// Throws ConfigError if any scale is negative or the threshold is not
// positive.
void validate(const NoiseModel& model);

}  // namespace enga
