#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "risvec/geometry.hpp"
#include "risvec/rng.hpp"

namespace risvec {

using Complex = std::complex<double>;

struct FadingParams {
  double rho = 1e-2;           // linear path gain at the 1 m reference
  double alpha_kb = 4.8;       // direct VU->BS link (obstructed)
  double alpha_rb = 2.5;
  double alpha_kr = 2.2;
  double rician_r = 10.0;
  double wavelength = 299792458.0 / 2e9;
  double element_spacing = 299792458.0 / 2e9 / 2.0;
  double noise_power = 1e-14;  // -110 dBm in W
  double bandwidth = 1e6;

  void validate() const;
};

// Quantized RIS configuration: theta_n = 2*pi*indices[n] / 2^bits.
struct PhaseConfig {
  std::vector<int> indices;
  int bits = 1;
  std::vector<double> beta;

  static PhaseConfig uniform(int elements, int bits, int index = 0);
  int size() const { return static_cast<int>(indices.size()); }
  int levels() const { return 1 << bits; }
  double phase(int n) const;
  void validate() const;
};

struct ChannelSet {
  Complex h_kb;          // direct VU->BS
  Eigen::VectorXcd h_kr; // VU->RIS
  Eigen::VectorXcd h_rb; // RIS->BS
};

// n-th entry exp(-j 2pi/lambda n dr sin_theta), n = 0..N-1.
Eigen::VectorXcd los_steering(int elements, double spacing, double wavelength, double sin_theta);

// Unit-mean exponential power with uniform phase, i.e. CN(0, 1).
Complex draw_small_scale(Rng& rng);

Complex direct_gain(double rho, double d, double alpha, Complex g);

Eigen::VectorXcd rician_los_gain(double rho, double d, double alpha, double rician_r,
                                 const Eigen::VectorXcd& steering);

// (h_rb)^H Theta h_kr
Complex phase_matrix_apply(const PhaseConfig& cfg, const Eigen::VectorXcd& h_rb,
                           const Eigen::VectorXcd& h_kr);

double snr(double p_offload, const ChannelSet& cs, const PhaseConfig& cfg, double noise_power);

// Direct path only; used when the RIS is switched off.
double snr_direct(double p_offload, Complex h_kb, double noise_power);

double rate_bits(double gamma, double bandwidth, double dt);

// Static RIS->BS vector for a layout.
Eigen::VectorXcd ris_to_bs_channel(const FadingParams& fading, const ScenarioLayout& layout,
                                   int elements);

// Slot channels for one vehicle; g is the direct-link small-scale draw.
ChannelSet vehicle_channels(const FadingParams& fading, const ScenarioLayout& layout,
                            const Position3D& vehicle, const Eigen::VectorXcd& h_rb, Complex g);

}  // namespace risvec
