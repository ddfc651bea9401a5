#include "risvec/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risvec {

void FadingParams::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (alpha_kb < 2.0 || alpha_rb < 2.0 || alpha_kr < 2.0)
    throw std::invalid_argument("path-loss exponents must be >= 2");
  if (!(rician_r > 0.0)) throw std::invalid_argument("rician factor must be positive");
  if (!(wavelength > 0.0) || !(element_spacing > 0.0))
    throw std::invalid_argument("wavelength and element spacing must be positive");
  if (!(noise_power > 0.0) || !(bandwidth > 0.0))
    throw std::invalid_argument("noise power and bandwidth must be positive");
}

PhaseConfig PhaseConfig::uniform(int elements, int bits, int index) {
  PhaseConfig cfg;
  cfg.indices.assign(static_cast<std::size_t>(elements), index);
  cfg.bits = bits;
  cfg.beta.assign(static_cast<std::size_t>(elements), 1.0);
  cfg.validate();
  return cfg;
}

double PhaseConfig::phase(int n) const {
  return 2.0 * std::numbers::pi * indices[static_cast<std::size_t>(n)] / levels();
}

void PhaseConfig::validate() const {
  if (bits < 1 || bits > 16) throw std::invalid_argument("phase bits out of range");
  if (beta.size() != indices.size()) throw std::invalid_argument("beta/indices length mismatch");
  for (int idx : indices)
    if (idx < 0 || idx >= levels()) throw std::invalid_argument("phase index out of range");
  for (double b : beta)
    if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("beta must lie in [0,1]");
}

Eigen::VectorXcd los_steering(int elements, double spacing, double wavelength, double sin_theta) {
  if (elements < 1) throw std::invalid_argument("los_steering: need at least one element");
  if (!(wavelength > 0.0)) throw std::invalid_argument("los_steering: wavelength must be positive");
  Eigen::VectorXcd v(elements);
  const double step = 2.0 * std::numbers::pi / wavelength * spacing * sin_theta;
  for (int n = 0; n < elements; ++n) v[n] = std::polar(1.0, -step * n);
  return v;
}

Complex draw_small_scale(Rng& rng) {
  std::exponential_distribution<double> power(1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double p = power(rng);
  return std::polar(std::sqrt(p), angle(rng));
}

Complex direct_gain(double rho, double d, double alpha, Complex g) {
  if (!(d > 0.0)) throw std::invalid_argument("direct_gain: distance must be positive");
  return std::sqrt(rho * std::pow(d, -alpha)) * g;
}

Eigen::VectorXcd rician_los_gain(double rho, double d, double alpha, double rician_r,
                                 const Eigen::VectorXcd& steering) {
  if (!(d > 0.0)) throw std::invalid_argument("rician_los_gain: distance must be positive");
  if (rician_r < 0.0) throw std::invalid_argument("rician_los_gain: R must be non-negative");
  const double scale = std::sqrt(rho * std::pow(d, -alpha)) * std::sqrt(rician_r / (1.0 + rician_r));
  return steering * scale;
}

Complex phase_matrix_apply(const PhaseConfig& cfg, const Eigen::VectorXcd& h_rb,
                           const Eigen::VectorXcd& h_kr) {
  if (h_rb.size() != h_kr.size() || h_rb.size() != cfg.size())
    throw std::invalid_argument("phase_matrix_apply: length mismatch");
  Complex acc{0.0, 0.0};
  for (int n = 0; n < cfg.size(); ++n) {
    const Complex reflect = std::polar(cfg.beta[static_cast<std::size_t>(n)], cfg.phase(n));
    acc += std::conj(h_rb[n]) * reflect * h_kr[n];
  }
  return acc;
}

double snr(double p_offload, const ChannelSet& cs, const PhaseConfig& cfg, double noise_power) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("snr: noise power must be positive");
  if (p_offload < 0.0) throw std::invalid_argument("snr: negative power");
  const Complex composite = phase_matrix_apply(cfg, cs.h_rb, cs.h_kr) + cs.h_kb;
  return p_offload * std::norm(composite) / noise_power;
}

double snr_direct(double p_offload, Complex h_kb, double noise_power) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("snr: noise power must be positive");
  if (p_offload < 0.0) throw std::invalid_argument("snr: negative power");
  return p_offload * std::norm(h_kb) / noise_power;
}

double rate_bits(double gamma, double bandwidth, double dt) {
  if (gamma < 0.0) throw std::invalid_argument("rate_bits: negative SNR");
  return dt * bandwidth * std::log2(1.0 + gamma);
}

Eigen::VectorXcd ris_to_bs_channel(const FadingParams& fading, const ScenarioLayout& layout,
                                   int elements) {
  const double d = distance(layout.ris, layout.bs);
  const double s = sin_angle_to_ris(layout.bs, layout.ris);
  return rician_los_gain(fading.rho, d, fading.alpha_rb, fading.rician_r,
                         los_steering(elements, fading.element_spacing, fading.wavelength, s));
}

ChannelSet vehicle_channels(const FadingParams& fading, const ScenarioLayout& layout,
                            const Position3D& vehicle, const Eigen::VectorXcd& h_rb, Complex g) {
  ChannelSet cs;
  cs.h_kb = direct_gain(fading.rho, distance(vehicle, layout.bs), fading.alpha_kb, g);
  const double s = sin_angle_to_ris(vehicle, layout.ris);
  cs.h_kr = rician_los_gain(
      fading.rho, distance(vehicle, layout.ris), fading.alpha_kr, fading.rician_r,
      los_steering(static_cast<int>(h_rb.size()), fading.element_spacing, fading.wavelength, s));
  cs.h_rb = h_rb;
  return cs;
}

}  // namespace risvec
