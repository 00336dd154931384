#pragma once

#include <vector>

namespace mcvd {

/// Physical environment of a free-diffusion channel.
struct DiffusionEnv {
  double diffusion_coefficient = 100.0;  // um^2/s
  int dimension = 3;                     // 1 or 3

  void validate() const;
};

enum class ReceptionMode { Absorbing, Passive };

/// Geometry of one transmitter->receiver link.
struct ChannelSpec {
  DiffusionEnv env;
  double distance = 6.0;         // um
  double receiver_radius = 4.0;  // um
  ReceptionMode reception_mode = ReceptionMode::Absorbing;

  void validate() const;
};

/// Complementary error function, deterministic to <= 1e-12 over |x| <= 6.
double erfc(double x);

/// Point-source concentration at radius r and time t, per emitted molecule.
double concentration(double r, double t, const DiffusionEnv& env);

/// First-hitting-time density for a 1-D absorbing receiver at spec.distance.
double pdf_hit_1d(double t, const ChannelSpec& spec);

/// Probability a molecule has hit the 1-D absorbing receiver by time t.
double cdf_hit_1d(double t, const ChannelSpec& spec);

/// Hitting rate onto an absorbing sphere of radius receiver_radius in 3-D.
double rate_hit_3d(double t, const ChannelSpec& spec);

/// Fraction of molecules absorbed by time t; asymptote r_r/(d + r_r) < 1.
double cdf_hit_3d(double t, const ChannelSpec& spec);

/// Hit CDF dispatched on spec.env.dimension.
double hit_cdf(double t, const ChannelSpec& spec);

/// Limit of hit_cdf as t -> infinity (1 in 1-D, r_r/(d+r_r) in 3-D).
double hit_cdf_asymptote(const ChannelSpec& spec);

/// Expected molecule count inside a passive spherical receiver at time t.
double passive_expected_count(double t, const ChannelSpec& spec, long emitted);

/// Per-slot arrival probabilities p_k = F(k t_s) - F((k-1) t_s), k = 1..isi_length.
std::vector<double> slot_hit_probabilities(const ChannelSpec& spec,
                                           double slot_duration, int isi_length);

/// Smallest L with p_{L+1} < tail_ratio * p_1, capped.
int default_isi_length(const ChannelSpec& spec, double slot_duration,
                       double tail_ratio = 1e-4, int cap = 20);

}  // namespace mcvd
