// measure.hpp - opacity bands, discrete Young measures, joint measures,
// conditional-expectation opacity tables
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ymhom/spectra.hpp"

namespace ymhom {

enum class SpacingMode { linear, logarithmic };
enum class RepresentativeRule { left, midpoint, mean };

std::string to_string(SpacingMode m);
std::string to_string(RepresentativeRule r);
SpacingMode spacing_from_string(const std::string& s);
RepresentativeRule representative_from_string(const std::string& s);

// How energies are drawn when estimating band probabilities. The stratified
// grid (midpoints of n equal subintervals) is the default: deterministic, and
// exact for piecewise-constant opacities whose breakpoints align with strata.
struct SamplingPlan {
  enum class Kind { stratified, uniform_random };
  Kind kind = Kind::stratified;
  std::uint64_t seed = 0;
};

std::string to_string(SamplingPlan::Kind k);
SamplingPlan::Kind sampler_from_string(const std::string& s);

// Coarse energy groups [E_i, E_{i+1}].
class GroupGrid {
 public:
  explicit GroupGrid(std::vector<double> boundaries);
  static GroupGrid uniform(double lo, double hi, std::size_t n_groups);

  std::size_t group_count() const { return boundaries_.size() - 1; }
  double lower(std::size_t i) const { return boundaries_.at(i); }
  double upper(std::size_t i) const { return boundaries_.at(i + 1); }
  double width(std::size_t i) const { return upper(i) - lower(i); }
  const std::vector<double>& boundaries() const { return boundaries_; }

 private:
  std::vector<double> boundaries_;
};

// Band boundaries for one group: m+1 ascending values spanning the sampled
// opacity range, or a single zero-width band when the opacity is constant.
struct BandRow {
  std::vector<double> boundaries;
  SpacingMode mode = SpacingMode::linear;
  bool constant = false;

  std::size_t band_count() const { return constant ? 1 : boundaries.size() - 1; }
  double representative(std::size_t j, RepresentativeRule rule) const;
};

// m+1 boundaries spanning [min, max] of sigma sampled at n_scan stratified
// points over the group. Degenerate range yields the constant flag.
BandRow make_bands(const OpacityFn& sigma, double e_lo, double e_hi, std::size_t m,
                   SpacingMode mode, std::size_t n_scan);

// One group's discrete measure: band representatives and probabilities.
// Probabilities sum to exactly 1 (last entry closes the sum). Samples outside
// the band range are clamped into the extreme bands and counted.
struct MeasureRow {
  std::vector<double> representatives;
  std::vector<double> probabilities;
  std::size_t n_samples = 0;
  std::size_t clamped_below = 0;
  std::size_t clamped_above = 0;
};

MeasureRow estimate_measure(const OpacityFn& sigma, double e_lo, double e_hi,
                            const BandRow& bands, std::size_t n_samples,
                            const SamplingPlan& plan, RepresentativeRule rule);

// Analytic band-model measure density on (1, c_beta), normalized to unit
// mass. Outside the open support returns 0; at the endpoints the density is
// singular and +infinity is returned.
double elsasser_measure_density(double xi, double beta);

// Joint counts between a reference-temperature and a target-temperature
// opacity over shared energy samples. p is row-major [ref][target] and sums
// to exactly 1.
struct JointRow {
  std::vector<double> ref_representatives;
  std::vector<double> target_representatives;
  std::vector<double> p;  // ref_count x target_count
  std::size_t ref_count = 0;
  std::size_t target_count = 0;
  std::size_t n_samples = 0;
  std::size_t clamped = 0;

  double at(std::size_t j, std::size_t jp) const { return p[j * target_count + jp]; }
  std::vector<double> ref_marginal() const;
};

JointRow estimate_joint_measure(const OpacityFn& sigma_ref, const OpacityFn& sigma_target,
                                double e_lo, double e_hi, const BandRow& bands_ref,
                                const BandRow& bands_target, std::size_t n_samples,
                                const SamplingPlan& plan, RepresentativeRule rule);

// kappa_j = E[target representative | reference band j]. Bands with zero
// marginal get NaN and are skipped downstream together with their zero
// probability. normalize=false reproduces the plain sum without dividing by
// the marginal.
std::vector<double> conditional_kappa(const JointRow& joint, bool normalize = true);

// Provenance recorded with every estimated measure.
struct MeasureProvenance {
  SamplingPlan sampler;
  std::size_t n_samples = 0;
  SpacingMode spacing = SpacingMode::linear;
  RepresentativeRule representative = RepresentativeRule::midpoint;
};

// Per-group discrete measure with its band grid.
struct DiscreteYoungMeasure {
  GroupGrid groups;
  std::vector<BandRow> bands;   // one per group
  std::vector<MeasureRow> rows; // one per group
  MeasureProvenance provenance;

  std::size_t parameter_count() const;  // sum of band counts
  void validate() const;

  std::string to_json_string() const;
  static DiscreteYoungMeasure from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static DiscreteYoungMeasure load(const std::filesystem::path& path);
};

// Convenience: bands plus measure rows for every group of a grid.
DiscreteYoungMeasure build_measure(const OpacityFn& sigma, GroupGrid groups, std::size_t m,
                                   SpacingMode mode, std::size_t n_samples,
                                   const SamplingPlan& plan, RepresentativeRule rule);

// Per-group joint measures against a fixed reference evaluator.
struct JointBandMeasure {
  GroupGrid groups;
  std::vector<JointRow> rows;
  MeasureProvenance provenance;

  void validate() const;
  std::string to_json_string() const;
  static JointBandMeasure from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static JointBandMeasure load(const std::filesystem::path& path);
};

// Effective opacities kappa[group][band][layer] tied to reference-band
// probabilities p[group][band]. NaN marks bands with zero marginal.
struct KappaTable {
  GroupGrid groups;
  std::size_t band_count = 0;
  std::vector<double> layer_temperatures;
  std::vector<std::vector<double>> probabilities;        // [group][band]
  std::vector<std::vector<std::vector<double>>> kappa;    // [group][band][layer]

  void validate() const;
  std::string to_json_string() const;
  static KappaTable from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static KappaTable load(const std::filesystem::path& path);
};

}  // namespace ymhom
