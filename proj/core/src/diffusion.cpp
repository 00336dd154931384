#include "mcvd/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace mcvd {

void DiffusionEnv::validate() const {
  if (!(diffusion_coefficient > 0.0))
    throw std::domain_error("diffusion_coefficient must be > 0");
  if (dimension != 1 && dimension != 3)
    throw std::domain_error("dimension must be 1 or 3");
}

void ChannelSpec::validate() const {
  env.validate();
  if (!(distance > 0.0)) throw std::domain_error("distance must be > 0");
  if (!(receiver_radius > 0.0))
    throw std::domain_error("receiver_radius must be > 0");
  if (reception_mode == ReceptionMode::Passive && env.dimension != 3)
    throw std::domain_error("passive reception requires a 3-D environment");
}

double erfc(double x) {
  // glibc's erfc is correctly rounded to ~1 ulp, well inside the 1e-12 budget.
  return std::erfc(x);
}

double concentration(double r, double t, const DiffusionEnv& env) {
  env.validate();
  if (!(t > 0.0)) throw std::domain_error("concentration requires t > 0");
  if (r < 0.0) throw std::domain_error("concentration requires r >= 0");
  const double four_dt = 4.0 * env.diffusion_coefficient * t;
  const double prefactor =
      std::pow(4.0 * M_PI * env.diffusion_coefficient * t, -0.5 * env.dimension);
  return prefactor * std::exp(-r * r / four_dt);
}

double pdf_hit_1d(double t, const ChannelSpec& spec) {
  spec.validate();
  if (spec.env.dimension != 1)
    throw std::domain_error("pdf_hit_1d requires dimension 1");
  if (!(t > 0.0)) throw std::domain_error("pdf_hit_1d requires t > 0");
  const double d = spec.distance;
  const double D = spec.env.diffusion_coefficient;
  return d / std::sqrt(4.0 * M_PI * D * t * t * t) * std::exp(-d * d / (4.0 * D * t));
}

double cdf_hit_1d(double t, const ChannelSpec& spec) {
  spec.validate();
  if (t < 0.0) throw std::domain_error("cdf_hit_1d requires t >= 0");
  if (t == 0.0) return 0.0;
  const double d = spec.distance;
  const double D = spec.env.diffusion_coefficient;
  return erfc(d / std::sqrt(4.0 * D * t));
}

double rate_hit_3d(double t, const ChannelSpec& spec) {
  spec.validate();
  if (spec.env.dimension != 3)
    throw std::domain_error("rate_hit_3d requires dimension 3");
  if (!(t > 0.0)) throw std::domain_error("rate_hit_3d requires t > 0");
  const double d = spec.distance;
  const double D = spec.env.diffusion_coefficient;
  const double frac = spec.receiver_radius / (d + spec.receiver_radius);
  return frac * d / std::sqrt(4.0 * M_PI * D * t * t * t) *
         std::exp(-d * d / (4.0 * D * t));
}

double cdf_hit_3d(double t, const ChannelSpec& spec) {
  spec.validate();
  if (t < 0.0) throw std::domain_error("cdf_hit_3d requires t >= 0");
  if (t == 0.0) return 0.0;
  const double d = spec.distance;
  const double D = spec.env.diffusion_coefficient;
  const double frac = spec.receiver_radius / (d + spec.receiver_radius);
  return frac * erfc(d / std::sqrt(4.0 * D * t));
}

double hit_cdf(double t, const ChannelSpec& spec) {
  return spec.env.dimension == 1 ? cdf_hit_1d(t, spec) : cdf_hit_3d(t, spec);
}

double hit_cdf_asymptote(const ChannelSpec& spec) {
  spec.validate();
  if (spec.env.dimension == 1) return 1.0;
  return spec.receiver_radius / (spec.distance + spec.receiver_radius);
}

double passive_expected_count(double t, const ChannelSpec& spec, long emitted) {
  spec.validate();
  if (spec.reception_mode != ReceptionMode::Passive)
    throw std::domain_error("passive_expected_count requires Passive mode");
  if (spec.env.dimension != 3)
    throw std::domain_error("passive_expected_count requires dimension 3");
  if (!(t > 0.0)) throw std::domain_error("passive_expected_count requires t > 0");
  if (emitted < 0) throw std::domain_error("emitted must be >= 0");
  const double r = spec.receiver_radius;
  const double volume = 4.0 / 3.0 * M_PI * r * r * r;
  return static_cast<double>(emitted) * volume *
         concentration(spec.distance, t, spec.env);
}

std::vector<double> slot_hit_probabilities(const ChannelSpec& spec,
                                           double slot_duration, int isi_length) {
  spec.validate();
  if (spec.reception_mode != ReceptionMode::Absorbing)
    throw std::domain_error("slot_hit_probabilities requires Absorbing mode");
  if (!(slot_duration > 0.0)) throw std::domain_error("slot_duration must be > 0");
  if (isi_length < 1) throw std::domain_error("isi_length must be >= 1");
  std::vector<double> probs(isi_length);
  double prev = 0.0;
  for (int k = 1; k <= isi_length; ++k) {
    const double cur = hit_cdf(k * slot_duration, spec);
    probs[k - 1] = cur - prev;
    prev = cur;
  }
  return probs;
}

int default_isi_length(const ChannelSpec& spec, double slot_duration,
                       double tail_ratio, int cap) {
  const double p1 = hit_cdf(slot_duration, spec);
  double prev = p1;
  for (int length = 1; length < cap; ++length) {
    const double next =
        hit_cdf((length + 1) * slot_duration, spec) - hit_cdf(length * slot_duration, spec);
    if (next < tail_ratio * p1) return length;
    prev = next;
  }
  (void)prev;
  return cap;
}

}  // namespace mcvd
