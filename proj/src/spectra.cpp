#include "ymhom/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ymhom/util.hpp"

namespace ymhom {

TabulatedCrossSection::TabulatedCrossSection(std::vector<double> energies,
                                             std::vector<double> values,
                                             std::string label)
    : energies_(std::move(energies)), values_(std::move(values)), label_(std::move(label)) {
  if (energies_.size() != values_.size())
    throw std::invalid_argument("cross-section: energies/values length mismatch");
  if (energies_.size() < 2)
    throw std::invalid_argument("cross-section: need at least 2 samples");
  for (std::size_t i = 0; i < energies_.size(); ++i) {
    if (!std::isfinite(energies_[i]) || !std::isfinite(values_[i]))
      throw std::invalid_argument("cross-section: non-finite entry");
    if (values_[i] < 0.0)
      throw std::invalid_argument("cross-section: negative value at index " + std::to_string(i));
    if (i > 0 && energies_[i] <= energies_[i - 1])
      throw std::invalid_argument("cross-section: energies not strictly increasing at index " +
                                  std::to_string(i));
  }
}

double TabulatedCrossSection::interpolate(double energy) const {
  if (energy < energies_.front() || energy > energies_.back())
    throw std::out_of_range("cross-section: energy " + format_double(energy) +
                            " outside tabulated range [" + format_double(energies_.front()) +
                            ", " + format_double(energies_.back()) + "]");
  // upper_bound never returns begin() here because energy >= front.
  auto it = std::upper_bound(energies_.begin(), energies_.end(), energy);
  if (it == energies_.end()) return values_.back();
  const std::size_t hi = static_cast<std::size_t>(it - energies_.begin());
  const std::size_t lo = hi - 1;
  const double t = (energy - energies_[lo]) / (energies_[hi] - energies_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

TabulatedCrossSection load_cross_section(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open cross-section file: " + path.string());
  std::vector<double> energies, values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double e, v;
    if (!(ls >> e >> v))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected two numeric columns");
    std::string rest;
    if (ls >> rest && !rest.empty() && rest[0] != '#')
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": trailing garbage '" + rest + "'");
    if (!energies.empty() && e <= energies.back())
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": energies not strictly increasing");
    if (v < 0.0)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": negative cross-section value");
    energies.push_back(e);
    values.push_back(v);
  }
  return TabulatedCrossSection(std::move(energies), std::move(values), path.string());
}

void save_cross_section(const TabulatedCrossSection& table,
                        const std::filesystem::path& path) {
  std::ostringstream os;
  os << "# " << (table.label().empty() ? "cross-section" : table.label()) << "\n";
  os << "# energy value\n";
  for (std::size_t i = 0; i < table.energies().size(); ++i)
    os << format_double(table.energies()[i]) << " " << format_double(table.values()[i]) << "\n";
  write_text_file(path, os.str());
}

double elsasser_opacity(double energy, const ElsasserParams& params) {
  if (!(params.beta > 0.0) || !(params.epsilon > 0.0))
    throw std::invalid_argument("elsasser: beta and epsilon must be positive");
  const double ch = std::cosh(params.beta);
  return (ch + 1.0) / (ch - std::cos(2.0 * std::numbers::pi * energy / params.epsilon));
}

double elsasser_max_opacity(double beta) {
  const double ch = std::cosh(beta);
  return (ch + 1.0) / (ch - 1.0);
}

WattParams::WattParams(double a_in, double b_in) : a(a_in), b(b_in) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("watt: a and b must be positive");
  c = std::exp(-a * b / 4.0) / std::sqrt(std::numbers::pi * a * a * a * b / 4.0);
}

double watt_spectrum(double energy_mev, const WattParams& params) {
  if (energy_mev < 0.0) throw std::domain_error("watt: negative energy");
  return params.c * std::exp(-energy_mev / params.a) * std::sinh(std::sqrt(params.b * energy_mev));
}

double planck_function(double nu, double temperature) {
  if (!(nu > 0.0) || !(temperature > 0.0))
    throw std::domain_error("planck: nu and T must be positive");
  return kPlanckC1 * nu * nu * nu / std::expm1(kPlanckC2 * nu / temperature);
}

double AtmosphereLayer::air_density_kg_m3() const {
  return pressure_Pa / (kDryAirGasConstant * temperature_K);
}

void AtmosphereLayer::validate() const {
  if (!(height_lo_km < height_hi_km))
    throw std::invalid_argument("atmosphere layer: height_lo must be below height_hi");
  if (!(temperature_K > 0.0) || !(pressure_Pa > 0.0))
    throw std::invalid_argument("atmosphere layer: T and p must be positive");
  if (volume_fraction < 0.0 || volume_fraction > 1.0)
    throw std::invalid_argument("atmosphere layer: volume fraction outside [0,1]");
}

std::vector<AtmosphereLayer> standard_atmosphere() {
  return {
      {0.0, 1.0, 281.65, 8.98746e4, 0.0081},
      {1.0, 2.0, 275.15, 7.94952e4, 0.0077},
      {2.0, 3.0, 268.65, 7.01085e4, 0.0059},
      {3.0, 4.0, 262.15, 6.16402e4, 0.0028},
      {4.0, 5.0, 255.65, 5.40199e4, 0.0016},
      {5.0, 6.0, 249.15, 4.71810e4, 0.0008},
      {6.0, 7.0, 242.65, 4.10607e4, 0.0003},
      {7.0, 8.0, 236.15, 3.55998e4, 7.96e-5},
      {8.0, 9.0, 229.65, 3.07425e4, 3.21e-5},
      {9.0, 10.0, 223.15, 2.64363e4, 1.78e-5},
      {10.0, 12.0, 216.65, 1.93304e4, 6.94e-6},
      {12.0, 15.0, 216.65, 1.20446e4, 3.84e-6},
  };
}

std::vector<AtmosphereLayer> load_atmosphere_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open atmosphere file: " + path.string());
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error(path.string() + ": empty file");
  // tolerate \r\n
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  if (line != "height_lo,height_hi,temperature,pressure,volume_fraction")
    throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
  std::vector<AtmosphereLayer> layers;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    AtmosphereLayer l{};
    if (!(ls >> l.height_lo_km >> l.height_hi_km >> l.temperature_K >> l.pressure_Pa >>
          l.volume_fraction))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected 5 numeric columns");
    l.validate();
    if (!layers.empty() && l.height_lo_km != layers.back().height_hi_km)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": layers must be contiguous");
    layers.push_back(l);
  }
  if (layers.empty()) throw std::runtime_error(path.string() + ": no layers");
  return layers;
}

double SyntheticLineSpectrum::opacity(double nu, double temperature, double pressure) const {
  return evaluator(temperature, pressure)(nu);
}

OpacityFn SyntheticLineSpectrum::evaluator(double temperature, double pressure) const {
  if (!(temperature > 0.0) || !(pressure > 0.0))
    throw std::invalid_argument("synthetic spectrum: T and p must be positive");
  const double gamma =
      reference_width * std::pow(pressure / reference_pressure, pressure_broadening_exponent);
  const double g2 = gamma * gamma;
  // peak * pi * gamma = strength; fold the temperature factor in once.
  std::vector<double> amp(line_strengths.size());
  for (std::size_t l = 0; l < line_strengths.size(); ++l) {
    const double ft = std::exp(kPlanckC2 * lower_state_energies[l] *
                               (1.0 / reference_temperature - 1.0 / temperature));
    amp[l] = line_strengths[l] * ft * gamma / std::numbers::pi;
  }
  const double lo = nu_min, hi = nu_max;
  std::vector<double> centers = line_centers;
  return [amp = std::move(amp), centers = std::move(centers), g2, lo, hi](double nu) {
    if (nu < lo || nu > hi)
      throw std::out_of_range("synthetic spectrum: nu outside declared range");
    double acc = 0.0;
    for (std::size_t l = 0; l < centers.size(); ++l) {
      const double d = nu - centers[l];
      acc += amp[l] / (d * d + g2);
    }
    return acc;
  };
}

SyntheticLineSpectrum make_synthetic_spectrum(std::size_t n_lines, double nu_min,
                                              double nu_max, std::uint64_t seed) {
  if (!(nu_min < nu_max)) throw std::invalid_argument("synthetic spectrum: bad range");
  SyntheticLineSpectrum s;
  s.nu_min = nu_min;
  s.nu_max = nu_max;
  s.seed = seed;
  UniformSampler rng(seed);
  const double pad = 0.01 * (nu_max - nu_min);
  s.line_centers.resize(n_lines);
  s.line_strengths.resize(n_lines);
  s.lower_state_energies.resize(n_lines);
  for (std::size_t l = 0; l < n_lines; ++l) {
    s.line_centers[l] = rng.next_in(nu_min - pad, nu_max + pad);
    s.line_strengths[l] = std::pow(10.0, rng.next_in(-2.0, 1.0));
    s.lower_state_energies[l] = rng.next_in(0.0, 1500.0);
  }
  return s;
}

}  // namespace ymhom
