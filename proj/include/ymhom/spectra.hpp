// spectra.hpp - opacity/cross-section models, emission sources, atmosphere table
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace ymhom {

using OpacityFn = std::function<double(double)>;

// Sorted (energy, value) samples with linear interpolation between nodes.
// No extrapolation: evaluating outside [energies.front(), energies.back()]
// throws.
class TabulatedCrossSection {
 public:
  TabulatedCrossSection(std::vector<double> energies, std::vector<double> values,
                        std::string label = {});

  double interpolate(double energy) const;
  double operator()(double energy) const { return interpolate(energy); }

  const std::vector<double>& energies() const { return energies_; }
  const std::vector<double>& values() const { return values_; }
  const std::string& label() const { return label_; }
  double min_energy() const { return energies_.front(); }
  double max_energy() const { return energies_.back(); }

 private:
  std::vector<double> energies_;
  std::vector<double> values_;
  std::string label_;
};

// Two-column whitespace-separated text, '#' comments, energies strictly
// ascending. Parse errors carry the 1-based line number.
TabulatedCrossSection load_cross_section(const std::filesystem::path& path);
void save_cross_section(const TabulatedCrossSection& table,
                        const std::filesystem::path& path);

// Periodic array of equal-strength Lorentz lines with spacing epsilon.
// sigma(E) = (cosh b + 1) / (cosh b - cos(2 pi E / eps)), range [1, c_beta].
struct ElsasserParams {
  double beta = 1.0;
  double epsilon = 1e-4;
};
double elsasser_opacity(double energy, const ElsasserParams& params);
// c_beta = (cosh b + 1)/(cosh b - 1), the maximum of the band model.
double elsasser_max_opacity(double beta);

// Fission source c * exp(-E/a) * sinh(sqrt(b E)), E in MeV.
// c is the closed-form normalization exp(-ab/4)/sqrt(pi a^3 b / 4).
struct WattParams {
  double a = 0.988;   // MeV
  double b = 2.2249;  // 1/MeV
  double c;           // 1/MeV
  WattParams(double a_in = 0.988, double b_in = 2.2249);
};
double watt_spectrum(double energy_mev, const WattParams& params);

// Planck spectral intensity per unit wavenumber: nu in 1/cm, T in K,
// result in W m^-2 sr^-1 (cm^-1)^-1. Constants folded into one prefactor.
inline constexpr double kPlanckC1 = 1.1910429723971884e-8;
inline constexpr double kPlanckC2 = 1.4387768775039337;  // cm K
double planck_function(double nu, double temperature);

// One homogeneous layer of the 1976 US standard atmosphere reduction used
// for the slab problem: heights in km, T in K, p in Pa, water volume
// fraction unitless. Air density from the ideal gas law (dry air).
struct AtmosphereLayer {
  double height_lo_km;
  double height_hi_km;
  double temperature_K;
  double pressure_Pa;
  double volume_fraction;

  double air_density_kg_m3() const;
  void validate() const;
};

// The fixed 12-layer table (0-15 km).
std::vector<AtmosphereLayer> standard_atmosphere();

// CSV override: header height_lo,height_hi,temperature,pressure,volume_fraction.
std::vector<AtmosphereLayer> load_atmosphere_csv(const std::filesystem::path& path);

inline constexpr double kDryAirGasConstant = 287.05;  // J/(kg K)

// Random Lorentzian line set standing in for a tabulated molecular
// cross-section when no data file is given. Line strengths carry a
// per-line Boltzmann-like temperature factor so opacities at different
// temperatures are correlated but not perfectly.
struct SyntheticLineSpectrum {
  std::vector<double> line_centers;     // 1/cm
  std::vector<double> line_strengths;   // m^2/kg per 1/cm, at reference T
  std::vector<double> lower_state_energies;  // 1/cm
  double nu_min = 0.0, nu_max = 0.0;    // declared range
  double reference_width = 0.1;         // 1/cm, HWHM at reference pressure
  double reference_pressure = 8.98746e4;   // Pa
  double reference_temperature = 288.15;   // K
  double pressure_broadening_exponent = 0.7;
  std::uint64_t seed = 0;

  // Cross-section in m^2/kg at (nu, T, p). nu outside the declared range throws.
  double opacity(double nu, double temperature, double pressure) const;

  // Evaluator with per-line factors for fixed (T, p) precomputed. The hot
  // loops (fine-grid tabulation, measure sampling) go through this.
  OpacityFn evaluator(double temperature, double pressure) const;
};

SyntheticLineSpectrum make_synthetic_spectrum(std::size_t n_lines, double nu_min,
                                              double nu_max, std::uint64_t seed);

}  // namespace ymhom
