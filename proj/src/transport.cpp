#include "ymhom/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ymhom/util.hpp"

namespace ymhom {

AngularQuadrature gauss_legendre(std::size_t n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument(
        "gauss_legendre: n must be even and >= 2 (odd orders place a node at mu = 0)");
  AngularQuadrature q;
  q.mu.resize(n);
  q.weight.resize(n);
  const std::size_t m = n / 2;
  for (std::size_t i = 1; i <= m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) - 0.25) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = ((2.0 * dj - 1.0) * z * p2 - (dj - 1.0) * p3) / dj;
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    q.mu[i - 1] = -z;
    q.mu[n - i] = z;
    q.weight[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    q.weight[n - i] = q.weight[i - 1];
  }
  return q;
}

double slab_kernel(double sigma, double x, double mu, double length) {
  if (mu == 0.0) throw std::invalid_argument("slab_kernel: mu must be nonzero");
  const double path = mu > 0.0 ? x / mu : (x - length) / mu;
  if (sigma < 1e-12) {
    const double z = sigma * path;
    return path * (1.0 - 0.5 * z + z * z / 6.0);
  }
  return -std::expm1(-sigma * path) / sigma;
}

double exact_slab_intensity(const SlabProblem& problem, double x, double mu, double energy) {
  if (x < 0.0 || x > problem.length)
    throw std::invalid_argument("exact_slab_intensity: x outside slab");
  return problem.source(energy) * slab_kernel(problem.sigma(energy), x, mu, problem.length);
}

bool all_finite_nonnegative(const FluxProfile& profile) {
  for (double v : profile.values)
    if (!std::isfinite(v) || v < 0.0) return false;
  return true;
}

void write_flux_csv(const FluxProfile& profile, const std::filesystem::path& csv_path) {
  std::ostringstream os;
  os << "x,value\n";
  for (std::size_t i = 0; i < profile.positions.size(); ++i)
    os << format_double(profile.positions[i]) << "," << format_double(profile.values[i])
       << "\n";
  write_text_file(csv_path, os.str());
  nlohmann::json side{{"method", profile.method},
                      {"parameter_count", profile.parameter_count},
                      {"metadata", profile.metadata}};
  write_text_file(csv_path.string() + ".meta.json", side.dump(2) + "\n");
}

FluxProfile read_flux_csv(const std::filesystem::path& csv_path) {
  FluxProfile out;
  std::istringstream is(read_text_file(csv_path));
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,value", 0) != 0)
    throw std::runtime_error(csv_path.string() + ": expected 'x,value' header");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(csv_path.string() + ":" + std::to_string(lineno) +
                               ": expected 'x,value'");
    out.positions.push_back(std::stod(line.substr(0, comma)));
    out.values.push_back(std::stod(line.substr(comma + 1)));
  }
  const auto meta_path = csv_path.string() + ".meta.json";
  if (std::filesystem::exists(meta_path)) {
    const auto j = nlohmann::json::parse(read_text_file(meta_path));
    out.method = j.value("method", "");
    out.parameter_count = j.value("parameter_count", std::size_t{0});
    out.metadata = j.value("metadata", nlohmann::json::object());
  }
  return out;
}

namespace {

std::size_t grid_index_of(const std::vector<double>& grid, double value) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), value);
  const double tol = 1e-12 * (std::abs(value) + 1.0);
  if (it != grid.end() && std::abs(*it - value) <= tol)
    return static_cast<std::size_t>(it - grid.begin());
  if (it != grid.begin() && std::abs(*(it - 1) - value) <= tol)
    return static_cast<std::size_t>(it - grid.begin()) - 1;
  throw std::invalid_argument("fine grid must contain group boundary " + format_double(value));
}

}  // namespace

FineGridTabulation tabulate_slab(const SlabProblem& problem,
                                 const std::vector<double>& fine_grid) {
  if (fine_grid.size() < 2) throw std::invalid_argument("tabulate_slab: grid too small");
  FineGridTabulation tab;
  tab.grid = fine_grid;
  tab.sigma.resize(fine_grid.size());
  tab.source.resize(fine_grid.size());
  for (std::size_t i = 0; i < fine_grid.size(); ++i) {
    tab.sigma[i] = problem.sigma(fine_grid[i]);
    tab.source[i] = problem.source(fine_grid[i]);
  }
  for (std::size_t g = 0; g < problem.groups.group_count(); ++g) {
    tab.group_slices.emplace_back(grid_index_of(tab.grid, problem.groups.lower(g)),
                                  grid_index_of(tab.grid, problem.groups.upper(g)));
  }
  return tab;
}

std::vector<double> group_source_integrals(const FineGridTabulation& tab) {
  std::vector<double> out;
  out.reserve(tab.group_slices.size());
  for (const auto& [b, e] : tab.group_slices) {
    out.push_back(trapezoid(std::span(tab.grid).subspan(b, e - b + 1),
                            std::span(tab.source).subspan(b, e - b + 1)));
  }
  return out;
}

FluxProfile exact_group_scalar_flux(const SlabProblem& problem,
                                    const AngularQuadrature& quad,
                                    const std::vector<double>& fine_grid) {
  const FineGridTabulation tab = tabulate_slab(problem, fine_grid);
  FluxProfile out;
  out.positions = problem.sample_points;
  out.values.assign(out.positions.size(), 0.0);
  out.method = "line_by_line";
  out.parameter_count = fine_grid.size();
  std::vector<double> integrand(tab.grid.size());
  for (std::size_t k = 0; k < out.positions.size(); ++k) {
    const double x = out.positions[k];
    double flux = 0.0;
    for (std::size_t p = 0; p < quad.mu.size(); ++p) {
      const double mu = quad.mu[p];
      for (const auto& [b, e] : tab.group_slices) {
        for (std::size_t i = b; i <= e; ++i)
          integrand[i] = tab.source[i] * slab_kernel(tab.sigma[i], x, mu, problem.length);
        flux += quad.weight[p] * trapezoid(std::span(tab.grid).subspan(b, e - b + 1),
                                           std::span(integrand).subspan(b, e - b + 1));
      }
    }
    out.values[k] = flux;
  }
  return out;
}

double homogenized_group_intensity(const MeasureRow& row, double source_integral, double x,
                                   double mu, double length) {
  double acc = 0.0;
  for (std::size_t j = 0; j < row.probabilities.size(); ++j) {
    const double p = row.probabilities[j];
    if (p == 0.0) continue;
    acc += p * slab_kernel(row.representatives[j], x, mu, length);
  }
  return source_integral * acc;
}

FluxProfile homogenized_scalar_flux(const DiscreteYoungMeasure& measure,
                                    const std::vector<double>& source_integrals,
                                    const AngularQuadrature& quad,
                                    const std::vector<double>& sample_points, double length) {
  if (source_integrals.size() != measure.groups.group_count())
    throw std::invalid_argument("homogenized_scalar_flux: source integral count mismatch");
  FluxProfile out;
  out.positions = sample_points;
  out.values.assign(sample_points.size(), 0.0);
  out.method = "homogenized";
  out.parameter_count = measure.parameter_count();
  for (std::size_t k = 0; k < sample_points.size(); ++k) {
    double flux = 0.0;
    for (std::size_t p = 0; p < quad.mu.size(); ++p)
      for (std::size_t i = 0; i < measure.rows.size(); ++i)
        flux += quad.weight[p] * homogenized_group_intensity(measure.rows[i],
                                                             source_integrals[i],
                                                             sample_points[k], quad.mu[p],
                                                             length);
    out.values[k] = flux;
  }
  return out;
}

namespace {

PlanckWeightedGroup planck_from_points(std::span<const double> x, std::span<const double> s,
                                       std::span<const double> sig) {
  for (double v : sig)
    if (!(v > 0.0))
      throw std::runtime_error("planck_weighted_group: sigma must be positive on the group");
  std::vector<double> ratio(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) ratio[i] = s[i] / sig[i];
  PlanckWeightedGroup out;
  out.source_g = trapezoid(x, s);
  const double denom = trapezoid(x, ratio);
  if (denom <= 0.0) throw std::runtime_error("planck_weighted_group: degenerate closure");
  out.sigma_g = out.source_g / denom;
  return out;
}

}  // namespace

PlanckWeightedGroup planck_weighted_group(const OpacityFn& source, const OpacityFn& sigma,
                                          double e_lo, double e_hi,
                                          const std::vector<double>& fine_grid) {
  if (!(e_lo < e_hi)) throw std::invalid_argument("planck_weighted_group: empty group");
  std::vector<double> x;
  x.push_back(e_lo);
  for (double g : fine_grid)
    if (g > e_lo && g < e_hi) x.push_back(g);
  x.push_back(e_hi);
  std::vector<double> s(x.size()), sg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[i] = source(x[i]);
    sg[i] = sigma(x[i]);
  }
  return planck_from_points(x, s, sg);
}

PlanckWeightedGroup planck_weighted_group_arrays(std::span<const double> grid,
                                                 std::span<const double> source,
                                                 std::span<const double> sigma, double e_lo,
                                                 double e_hi) {
  if (!(e_lo < e_hi)) throw std::invalid_argument("planck_weighted_group: empty group");
  if (e_lo < grid.front() || e_hi > grid.back())
    throw std::invalid_argument("planck_weighted_group: group outside grid");
  const auto lerp_at = [&](double e, std::span<const double> y) {
    const auto it = std::upper_bound(grid.begin(), grid.end(), e);
    if (it == grid.begin()) return y.front();
    if (it == grid.end()) return y.back();
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    const double t = (e - grid[hi - 1]) / (grid[hi] - grid[hi - 1]);
    return y[hi - 1] + t * (y[hi] - y[hi - 1]);
  };
  std::vector<double> x, s, sg;
  x.push_back(e_lo);
  s.push_back(lerp_at(e_lo, source));
  sg.push_back(lerp_at(e_lo, sigma));
  const auto lo_it = std::upper_bound(grid.begin(), grid.end(), e_lo);
  for (auto it = lo_it; it != grid.end() && *it < e_hi; ++it) {
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    x.push_back(grid[i]);
    s.push_back(source[i]);
    sg.push_back(sigma[i]);
  }
  x.push_back(e_hi);
  s.push_back(lerp_at(e_hi, source));
  sg.push_back(lerp_at(e_hi, sigma));
  return planck_from_points(x, s, sg);
}

FluxProfile planck_weighted_scalar_flux(const std::vector<PlanckWeightedGroup>& groups,
                                        const AngularQuadrature& quad,
                                        const std::vector<double>& sample_points,
                                        double length) {
  FluxProfile out;
  out.positions = sample_points;
  out.values.assign(sample_points.size(), 0.0);
  out.method = "planck_weighted";
  out.parameter_count = groups.size();
  for (std::size_t k = 0; k < sample_points.size(); ++k) {
    double flux = 0.0;
    for (std::size_t p = 0; p < quad.mu.size(); ++p)
      for (const auto& g : groups)
        flux += quad.weight[p] * g.source_g *
                slab_kernel(g.sigma_g, sample_points[k], quad.mu[p], length);
    out.values[k] = flux;
  }
  return out;
}

std::vector<double> march_layered(std::span<const double> interfaces,
                                  std::span<const double> sigma_layers,
                                  std::span<const double> source_layers,
                                  double boundary_value, double mu,
                                  std::span<const double> heights) {
  if (mu == 0.0) throw std::invalid_argument("march_layered: mu must be nonzero");
  if (interfaces.size() < 2)
    throw std::invalid_argument("march_layered: need at least one layer");
  const std::size_t n_layers = interfaces.size() - 1;
  if (sigma_layers.size() != n_layers || source_layers.size() != n_layers)
    throw std::invalid_argument("march_layered: layer/table count mismatch");
  for (std::size_t k = 0; k + 1 < interfaces.size(); ++k)
    if (!(interfaces[k] < interfaces[k + 1]))
      throw std::invalid_argument("march_layered: interfaces must be increasing");

  // interface values carried by the sweep
  std::vector<double> at_iface(interfaces.size());
  if (mu > 0.0) {
    at_iface[0] = boundary_value;
    for (std::size_t k = 0; k < n_layers; ++k) {
      const double t = std::exp(-sigma_layers[k] * (interfaces[k + 1] - interfaces[k]) / mu);
      at_iface[k + 1] = t * at_iface[k] + (1.0 - t) * source_layers[k];
    }
  } else {
    at_iface[n_layers] = boundary_value;
    for (std::size_t k = n_layers; k-- > 0;) {
      const double t = std::exp(-sigma_layers[k] * (interfaces[k] - interfaces[k + 1]) / mu);
      at_iface[k] = t * at_iface[k + 1] + (1.0 - t) * source_layers[k];
    }
  }

  std::vector<double> out(heights.size());
  for (std::size_t h = 0; h < heights.size(); ++h) {
    const double x = heights[h];
    if (x < interfaces.front() || x > interfaces.back())
      throw std::invalid_argument("march_layered: height outside domain");
    auto it = std::upper_bound(interfaces.begin(), interfaces.end(), x);
    std::size_t k = it == interfaces.begin()
                        ? 0
                        : static_cast<std::size_t>(it - interfaces.begin()) - 1;
    if (k >= n_layers) k = n_layers - 1;
    if (mu > 0.0) {
      const double t = std::exp(-sigma_layers[k] * (x - interfaces[k]) / mu);
      out[h] = t * at_iface[k] + (1.0 - t) * source_layers[k];
    } else {
      const double t = std::exp(-sigma_layers[k] * (x - interfaces[k + 1]) / mu);
      out[h] = t * at_iface[k + 1] + (1.0 - t) * source_layers[k];
    }
  }
  return out;
}

std::vector<double> layer_sample_heights(std::span<const double> interfaces, std::size_t n_x) {
  if (n_x < 2) throw std::invalid_argument("layer_sample_heights: need n_x >= 2");
  std::vector<double> out;
  out.reserve((interfaces.size() - 1) * n_x);
  for (std::size_t k = 0; k + 1 < interfaces.size(); ++k) {
    const auto pts = linspace(interfaces[k], interfaces[k + 1], n_x);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

FluxProfile outgoing_flux(const std::vector<double>& heights, const AngularQuadrature& quad,
                          const std::vector<std::vector<std::vector<double>>>& psi_by_node,
                          const std::vector<double>& bin_widths, bool net) {
  if (psi_by_node.size() != quad.mu.size())
    throw std::invalid_argument("outgoing_flux: need one intensity block per node");
  FluxProfile out;
  out.positions = heights;
  out.values.assign(heights.size(), 0.0);
  out.method = net ? "net_flux" : "outgoing_flux";
  for (std::size_t p = 0; p < quad.mu.size(); ++p) {
    if (quad.mu[p] < 0.0 && !net) continue;
    const auto& bins = psi_by_node[p];
    if (bins.size() != bin_widths.size())
      throw std::invalid_argument("outgoing_flux: bin count mismatch");
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (bins[b].size() != heights.size())
        throw std::invalid_argument("outgoing_flux: height count mismatch");
      const double w = quad.weight[p] * quad.mu[p] * bin_widths[b];
      for (std::size_t h = 0; h < heights.size(); ++h) out.values[h] += w * bins[b][h];
    }
  }
  return out;
}

}  // namespace ymhom
