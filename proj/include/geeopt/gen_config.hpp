#pragma once

#include <cstdint>
#include <string>

namespace geeopt {

// Receiver geometry: each user talks to its own uniformly placed receiver, or
// everyone shares one receiver at the square's center.
enum class Topology { paired, single_center };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& name);

// Everything the random generator needs to produce one Scenario. Powers are in
// dBW here and converted to watts on generation; noise is a spectral density in
// dBm/Hz integrated over the bandwidth.
struct GenConfig {
  int users = 12;
  int subcarriers = 4;
  double area_edge_m = 200.0;
  double bandwidth_hz = 10930.0;
  double noise_dbm_per_hz = -173.0;
  double static_power_dbw = -20.0;
  double pathloss_exponent = 4.0;
  double xi_ratio = 0.01;       // self-interference gain as a fraction of alpha
  double power_weight = 1.02;   // mu, applied to every user and subcarrier
  double pmax_dbw = -20.0;
  double rmin_bit_s_hz = 0.0;   // applied to every user; 0 disables QoS pressure
  Topology topology = Topology::paired;
  std::uint64_t seed = 1;

  bool operator==(const GenConfig&) const = default;
};

}  // namespace geeopt
