// transport.hpp - slab-geometry solvers: angular quadrature, closed-form
// line-by-line and homogenized solutions, Planck-weighted baseline,
// multi-layer marching, flux assembly
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ymhom/measure.hpp"
#include "ymhom/spectra.hpp"

namespace ymhom {

struct AngularQuadrature {
  std::vector<double> mu;      // ascending, symmetric about 0, no zero node
  std::vector<double> weight;  // positive, sums to 2
};

// Gauss-Legendre on [-1,1]. n must be even so no node sits at mu = 0.
AngularQuadrature gauss_legendre(std::size_t n);

// (1 - exp(-sigma * path)) / sigma with path = x/mu (mu > 0) or (x-L)/mu
// (mu < 0). Tiny sigma switches to the series path*(1 - z/2 + z^2/6).
double slab_kernel(double sigma, double x, double mu, double length);

struct SlabProblem {
  double length = 1.0;
  OpacityFn sigma;
  OpacityFn source;
  GroupGrid groups;
  std::vector<double> sample_points;
};

// psi(x, mu, E) = S(E) * slab_kernel(sigma(E), x, mu, L); vacuum inflow on
// both faces.
double exact_slab_intensity(const SlabProblem& problem, double x, double mu, double energy);

// Scalar flux or outgoing flux sampled on a spatial grid.
struct FluxProfile {
  std::vector<double> positions;
  std::vector<double> values;
  std::string method;
  std::size_t parameter_count = 0;
  nlohmann::json metadata;
};

bool all_finite_nonnegative(const FluxProfile& profile);

// CSV "x,value" plus a JSON sidecar <path>.meta.json with method, parameter
// count and metadata. Numbers are shortest round-trip decimals.
void write_flux_csv(const FluxProfile& profile, const std::filesystem::path& csv_path);
FluxProfile read_flux_csv(const std::filesystem::path& csv_path);

// sigma/source cached on a fine grid, with per-group index slices. The grid
// must contain every group boundary.
struct FineGridTabulation {
  std::vector<double> grid;
  std::vector<double> sigma;
  std::vector<double> source;
  std::vector<std::pair<std::size_t, std::size_t>> group_slices;  // [begin, end] inclusive
};

FineGridTabulation tabulate_slab(const SlabProblem& problem,
                                 const std::vector<double>& fine_grid);

// S_i = integral of the source over each group (composite trapezoid).
std::vector<double> group_source_integrals(const FineGridTabulation& tab);

// phi(x_k) = sum_p w_p sum_i int_group S(E) k(sigma(E), x_k, mu_p) dE.
FluxProfile exact_group_scalar_flux(const SlabProblem& problem,
                                    const AngularQuadrature& quad,
                                    const std::vector<double>& fine_grid);

// Group-integrated intensity from a discrete measure row:
// S_i * sum_j p_ij k(sigma_ij, x, mu). Bands with zero probability are
// skipped.
double homogenized_group_intensity(const MeasureRow& row, double source_integral, double x,
                                   double mu, double length);

FluxProfile homogenized_scalar_flux(const DiscreteYoungMeasure& measure,
                                    const std::vector<double>& source_integrals,
                                    const AngularQuadrature& quad,
                                    const std::vector<double>& sample_points, double length);

// Planck-weighted group closure sigma_g = int S / int (S/sigma), with the
// group equation solved against the total group source S_g = int S.
struct PlanckWeightedGroup {
  double sigma_g = 0.0;
  double source_g = 0.0;  // S_g
};

PlanckWeightedGroup planck_weighted_group(const OpacityFn& source, const OpacityFn& sigma,
                                          double e_lo, double e_hi,
                                          const std::vector<double>& fine_grid);

// Array form used by the drivers: integrate over the slice of a shared fine
// grid, interpolating values at group boundaries that fall between grid
// points.
PlanckWeightedGroup planck_weighted_group_arrays(std::span<const double> grid,
                                                 std::span<const double> source,
                                                 std::span<const double> sigma, double e_lo,
                                                 double e_hi);

FluxProfile planck_weighted_scalar_flux(const std::vector<PlanckWeightedGroup>& groups,
                                        const AngularQuadrature& quad,
                                        const std::vector<double>& sample_points,
                                        double length);

// Contiguous homogeneous layers with per-layer constant opacity and source.
// Upward sweep (mu > 0) starts from boundary_value at the bottom interface;
// downward sweep (mu < 0) from boundary_value at the top. Returns intensities
// at the requested heights.
std::vector<double> march_layered(std::span<const double> interfaces,
                                  std::span<const double> sigma_layers,
                                  std::span<const double> source_layers,
                                  double boundary_value, double mu,
                                  std::span<const double> heights);

// n_x equispaced points per layer including both endpoints.
std::vector<double> layer_sample_heights(std::span<const double> interfaces, std::size_t n_x);

// F+(x_h) = sum_{mu_p > 0} w_p mu_p sum_bins width_b psi[p][b][h].
// psi_by_node is indexed by quadrature node; entries for mu < 0 may be empty
// unless net=true, which sums both hemispheres with signed mu weights.
FluxProfile outgoing_flux(const std::vector<double>& heights, const AngularQuadrature& quad,
                          const std::vector<std::vector<std::vector<double>>>& psi_by_node,
                          const std::vector<double>& bin_widths, bool net = false);

}  // namespace ymhom
