#include "ymhom/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "ymhom/util.hpp"

namespace ymhom {

using nlohmann::json;

std::string to_string(SpacingMode m) {
  return m == SpacingMode::linear ? "linear" : "logarithmic";
}

std::string to_string(RepresentativeRule r) {
  switch (r) {
    case RepresentativeRule::left: return "left";
    case RepresentativeRule::midpoint: return "midpoint";
    case RepresentativeRule::mean: return "mean";
  }
  return "midpoint";
}

std::string to_string(SamplingPlan::Kind k) {
  return k == SamplingPlan::Kind::stratified ? "stratified" : "uniform_random";
}

SpacingMode spacing_from_string(const std::string& s) {
  if (s == "linear") return SpacingMode::linear;
  if (s == "logarithmic" || s == "log") return SpacingMode::logarithmic;
  throw std::invalid_argument("unknown spacing mode: " + s);
}

RepresentativeRule representative_from_string(const std::string& s) {
  if (s == "left") return RepresentativeRule::left;
  if (s == "midpoint") return RepresentativeRule::midpoint;
  if (s == "mean") return RepresentativeRule::mean;
  throw std::invalid_argument("unknown representative rule: " + s);
}

SamplingPlan::Kind sampler_from_string(const std::string& s) {
  if (s == "stratified") return SamplingPlan::Kind::stratified;
  if (s == "uniform_random" || s == "uniform") return SamplingPlan::Kind::uniform_random;
  throw std::invalid_argument("unknown sampler: " + s);
}

GroupGrid::GroupGrid(std::vector<double> boundaries) : boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 2) throw std::invalid_argument("group grid: need >= 2 boundaries");
  for (std::size_t i = 1; i < boundaries_.size(); ++i)
    if (!(boundaries_[i] > boundaries_[i - 1]))
      throw std::invalid_argument("group grid: boundaries must be strictly increasing");
}

GroupGrid GroupGrid::uniform(double lo, double hi, std::size_t n_groups) {
  if (n_groups == 0) throw std::invalid_argument("group grid: need >= 1 group");
  return GroupGrid(linspace(lo, hi, n_groups + 1));
}

double BandRow::representative(std::size_t j, RepresentativeRule rule) const {
  if (constant) return boundaries.front();
  if (j + 1 >= boundaries.size()) throw std::out_of_range("band index");
  switch (rule) {
    case RepresentativeRule::left:
      return boundaries[j];
    case RepresentativeRule::mean:  // static fallback; sample means are filled
    case RepresentativeRule::midpoint:  // in during estimation
      if (mode == SpacingMode::logarithmic)
        return std::sqrt(boundaries[j] * boundaries[j + 1]);
      return 0.5 * (boundaries[j] + boundaries[j + 1]);
  }
  return 0.5 * (boundaries[j] + boundaries[j + 1]);
}

namespace {

// Shared energy-sample generator: index l of n under the given plan.
class EnergySampler {
 public:
  EnergySampler(double lo, double hi, std::size_t n, const SamplingPlan& plan)
      : lo_(lo), hi_(hi), n_(n), plan_(plan), rng_(plan.seed) {}

  double sample(std::size_t l) {
    if (plan_.kind == SamplingPlan::Kind::stratified)
      return lo_ + (static_cast<double>(l) + 0.5) * (hi_ - lo_) / static_cast<double>(n_);
    return rng_.next_in(lo_, hi_);
  }

 private:
  double lo_, hi_;
  std::size_t n_;
  SamplingPlan plan_;
  UniformSampler rng_;
};

// Half-open bands [b_j, b_{j+1}), last band closed on the right. Out-of-range
// values are clamped into the extreme bands and counted.
std::size_t band_index(const BandRow& bands, double v, std::size_t& below, std::size_t& above) {
  if (bands.constant) return 0;
  const auto& b = bands.boundaries;
  const std::size_t m = b.size() - 1;
  if (v < b.front()) {
    ++below;
    return 0;
  }
  if (v >= b.back()) {
    if (v > b.back()) ++above;
    return m - 1;
  }
  const auto it = std::upper_bound(b.begin(), b.end(), v);
  return static_cast<std::size_t>(it - b.begin()) - 1;
}

std::vector<double> finalize_probabilities(const std::vector<std::size_t>& counts,
                                           std::size_t n) {
  std::vector<double> p(counts.size());
  double partial = 0.0;
  for (std::size_t j = 0; j + 1 < counts.size(); ++j) {
    p[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
    partial += p[j];
  }
  // close the sum exactly
  p.back() = 1.0 - partial;
  if (p.back() < 0.0) p.back() = 0.0;
  return p;
}

std::vector<double> finalize_representatives(const BandRow& bands, RepresentativeRule rule,
                                             const std::vector<std::size_t>& counts,
                                             const std::vector<double>& value_sums) {
  const std::size_t m = bands.band_count();
  std::vector<double> reps(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (rule == RepresentativeRule::mean && counts[j] > 0)
      reps[j] = value_sums[j] / static_cast<double>(counts[j]);
    else
      reps[j] = bands.representative(j, rule);
  }
  return reps;
}

}  // namespace

BandRow make_bands(const OpacityFn& sigma, double e_lo, double e_hi, std::size_t m,
                   SpacingMode mode, std::size_t n_scan) {
  if (!(e_lo < e_hi)) throw std::invalid_argument("make_bands: empty group");
  if (m < 1) throw std::invalid_argument("make_bands: need m >= 1");
  if (n_scan < 2) throw std::invalid_argument("make_bands: need n_scan >= 2");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < n_scan; ++l) {
    const double e = e_lo + (static_cast<double>(l) + 0.5) * (e_hi - e_lo) /
                                static_cast<double>(n_scan);
    const double v = sigma(e);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw std::runtime_error("make_bands: non-finite opacity sample");
  BandRow row;
  row.mode = mode;
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
    row.constant = true;
    row.boundaries = {lo, lo};
    return row;
  }
  if (mode == SpacingMode::logarithmic) {
    if (!(lo > 0.0))
      throw std::invalid_argument("make_bands: logarithmic spacing needs positive opacity");
    const double llo = std::log(lo), lhi = std::log(hi);
    row.boundaries = linspace(llo, lhi, m + 1);
    for (double& b : row.boundaries) b = std::exp(b);
  } else {
    row.boundaries = linspace(lo, hi, m + 1);
  }
  // guard against exp/log round-off at the ends
  row.boundaries.front() = lo;
  row.boundaries.back() = hi;
  return row;
}

MeasureRow estimate_measure(const OpacityFn& sigma, double e_lo, double e_hi,
                            const BandRow& bands, std::size_t n_samples,
                            const SamplingPlan& plan, RepresentativeRule rule) {
  if (n_samples == 0) throw std::invalid_argument("estimate_measure: need samples");
  const std::size_t m = bands.band_count();
  std::vector<std::size_t> counts(m, 0);
  std::vector<double> sums(m, 0.0);
  MeasureRow row;
  EnergySampler sampler(e_lo, e_hi, n_samples, plan);
  for (std::size_t l = 0; l < n_samples; ++l) {
    const double v = sigma(sampler.sample(l));
    const std::size_t j = band_index(bands, v, row.clamped_below, row.clamped_above);
    ++counts[j];
    sums[j] += v;
  }
  row.n_samples = n_samples;
  row.probabilities = finalize_probabilities(counts, n_samples);
  row.representatives = finalize_representatives(bands, rule, counts, sums);
  return row;
}

double elsasser_measure_density(double xi, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("elsasser density: beta must be positive");
  const double ch = std::cosh(beta);
  const double cb = (ch + 1.0) / (ch - 1.0);
  if (xi < 1.0 || xi > cb) return 0.0;
  const double u = (xi * ch - ch - 1.0) / xi;
  const double arg = 1.0 - u * u;
  if (arg <= 0.0) return std::numeric_limits<double>::infinity();
  // prefactor (cosh b + 1)/pi normalizes the density to unit mass
  return (ch + 1.0) / std::numbers::pi / (xi * xi * std::sqrt(arg));
}

std::vector<double> JointRow::ref_marginal() const {
  std::vector<double> marg(ref_count, 0.0);
  for (std::size_t j = 0; j < ref_count; ++j)
    for (std::size_t jp = 0; jp < target_count; ++jp) marg[j] += at(j, jp);
  return marg;
}

JointRow estimate_joint_measure(const OpacityFn& sigma_ref, const OpacityFn& sigma_target,
                                double e_lo, double e_hi, const BandRow& bands_ref,
                                const BandRow& bands_target, std::size_t n_samples,
                                const SamplingPlan& plan, RepresentativeRule rule) {
  if (n_samples == 0) throw std::invalid_argument("estimate_joint_measure: need samples");
  JointRow row;
  row.ref_count = bands_ref.band_count();
  row.target_count = bands_target.band_count();
  std::vector<std::size_t> counts(row.ref_count * row.target_count, 0);
  std::vector<std::size_t> ref_counts(row.ref_count, 0), tgt_counts(row.target_count, 0);
  std::vector<double> ref_sums(row.ref_count, 0.0), tgt_sums(row.target_count, 0.0);
  EnergySampler sampler(e_lo, e_hi, n_samples, plan);
  std::size_t below = 0, above = 0;
  for (std::size_t l = 0; l < n_samples; ++l) {
    const double e = sampler.sample(l);
    const double vr = sigma_ref(e);
    const double vt = sigma_target(e);
    const std::size_t j = band_index(bands_ref, vr, below, above);
    const std::size_t jp = band_index(bands_target, vt, below, above);
    ++counts[j * row.target_count + jp];
    ++ref_counts[j];
    ++tgt_counts[jp];
    ref_sums[j] += vr;
    tgt_sums[jp] += vt;
  }
  row.clamped = below + above;
  row.n_samples = n_samples;
  row.p = finalize_probabilities(counts, n_samples);
  row.ref_representatives = finalize_representatives(bands_ref, rule, ref_counts, ref_sums);
  row.target_representatives =
      finalize_representatives(bands_target, rule, tgt_counts, tgt_sums);
  return row;
}

std::vector<double> conditional_kappa(const JointRow& joint, bool normalize) {
  std::vector<double> kappa(joint.ref_count);
  const auto marginal = joint.ref_marginal();
  for (std::size_t j = 0; j < joint.ref_count; ++j) {
    double acc = 0.0;
    for (std::size_t jp = 0; jp < joint.target_count; ++jp)
      acc += joint.at(j, jp) * joint.target_representatives[jp];
    if (normalize) {
      kappa[j] = marginal[j] > 0.0 ? acc / marginal[j]
                                   : std::numeric_limits<double>::quiet_NaN();
    } else {
      kappa[j] = acc;
    }
  }
  return kappa;
}

std::size_t DiscreteYoungMeasure::parameter_count() const {
  std::size_t n = 0;
  for (const auto& b : bands) n += b.band_count();
  return n;
}

void DiscreteYoungMeasure::validate() const {
  if (bands.size() != groups.group_count() || rows.size() != groups.group_count())
    throw std::runtime_error("measure: group/band/row count mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto& band = bands[i];
    if (row.probabilities.size() != band.band_count() ||
        row.representatives.size() != band.band_count())
      throw std::runtime_error("measure: row size mismatch in group " + std::to_string(i));
    double sum = 0.0;
    for (double p : row.probabilities) {
      if (p < 0.0) throw std::runtime_error("measure: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::runtime_error("measure: probabilities sum to " + format_double(sum) +
                               " in group " + std::to_string(i));
    for (std::size_t j = 0; j < row.representatives.size(); ++j) {
      if (row.probabilities[j] == 0.0) continue;
      if (row.representatives[j] < band.boundaries.front() ||
          row.representatives[j] > band.boundaries.back())
        throw std::runtime_error("measure: representative outside band range");
    }
  }
}

DiscreteYoungMeasure build_measure(const OpacityFn& sigma, GroupGrid groups, std::size_t m,
                                   SpacingMode mode, std::size_t n_samples,
                                   const SamplingPlan& plan, RepresentativeRule rule) {
  DiscreteYoungMeasure out{std::move(groups), {}, {}, {plan, n_samples, mode, rule}};
  const std::size_t g = out.groups.group_count();
  out.bands.reserve(g);
  out.rows.reserve(g);
  for (std::size_t i = 0; i < g; ++i) {
    const double lo = out.groups.lower(i), hi = out.groups.upper(i);
    BandRow band = make_bands(sigma, lo, hi, m, mode, n_samples);
    MeasureRow row = estimate_measure(sigma, lo, hi, band, n_samples, plan, rule);
    out.bands.push_back(std::move(band));
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

json provenance_to_json(const MeasureProvenance& p) {
  return json{{"sampler", to_string(p.sampler.kind)},
              {"seed", p.sampler.seed},
              {"n_samples", p.n_samples},
              {"spacing", to_string(p.spacing)},
              {"representative", to_string(p.representative)}};
}

MeasureProvenance provenance_from_json(const json& j) {
  MeasureProvenance p;
  p.sampler.kind = sampler_from_string(j.at("sampler").get<std::string>());
  p.sampler.seed = j.at("seed").get<std::uint64_t>();
  p.n_samples = j.at("n_samples").get<std::size_t>();
  p.spacing = spacing_from_string(j.at("spacing").get<std::string>());
  p.representative = representative_from_string(j.at("representative").get<std::string>());
  return p;
}

}  // namespace

std::string DiscreteYoungMeasure::to_json_string() const {
  json rows_json = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows_json.push_back(json{{"band_boundaries", bands[i].boundaries},
                             {"spacing", to_string(bands[i].mode)},
                             {"constant", bands[i].constant},
                             {"representatives", rows[i].representatives},
                             {"probabilities", rows[i].probabilities},
                             {"n_samples", rows[i].n_samples},
                             {"clamped_below", rows[i].clamped_below},
                             {"clamped_above", rows[i].clamped_above}});
  }
  json j{{"kind", "discrete_young_measure"},
         {"group_boundaries", groups.boundaries()},
         {"provenance", provenance_to_json(provenance)},
         {"rows", rows_json}};
  return j.dump(2) + "\n";
}

DiscreteYoungMeasure DiscreteYoungMeasure::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("kind").get<std::string>() != "discrete_young_measure")
    throw std::runtime_error("measure file: wrong kind");
  GroupGrid grid(j.at("group_boundaries").get<std::vector<double>>());
  DiscreteYoungMeasure out{std::move(grid), {}, {}, provenance_from_json(j.at("provenance"))};
  for (const auto& rj : j.at("rows")) {
    BandRow band;
    band.boundaries = rj.at("band_boundaries").get<std::vector<double>>();
    band.mode = spacing_from_string(rj.at("spacing").get<std::string>());
    band.constant = rj.at("constant").get<bool>();
    MeasureRow row;
    row.representatives = rj.at("representatives").get<std::vector<double>>();
    row.probabilities = rj.at("probabilities").get<std::vector<double>>();
    row.n_samples = rj.at("n_samples").get<std::size_t>();
    row.clamped_below = rj.at("clamped_below").get<std::size_t>();
    row.clamped_above = rj.at("clamped_above").get<std::size_t>();
    out.bands.push_back(std::move(band));
    out.rows.push_back(std::move(row));
  }
  out.validate();
  return out;
}

void DiscreteYoungMeasure::save(const std::filesystem::path& path) const {
  write_text_file(path, to_json_string());
}

DiscreteYoungMeasure DiscreteYoungMeasure::load(const std::filesystem::path& path) {
  return from_json_string(read_text_file(path));
}

void JointBandMeasure::validate() const {
  if (rows.size() != groups.group_count())
    throw std::runtime_error("joint measure: row/group count mismatch");
  for (const auto& row : rows) {
    if (row.p.size() != row.ref_count * row.target_count)
      throw std::runtime_error("joint measure: matrix size mismatch");
    double sum = 0.0;
    for (double p : row.p) {
      if (p < 0.0) throw std::runtime_error("joint measure: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::runtime_error("joint measure: entries sum to " + format_double(sum));
  }
}

std::string JointBandMeasure::to_json_string() const {
  json rows_json = json::array();
  for (const auto& row : rows) {
    json matrix = json::array();
    for (std::size_t j = 0; j < row.ref_count; ++j) {
      json line = json::array();
      for (std::size_t jp = 0; jp < row.target_count; ++jp) line.push_back(row.at(j, jp));
      matrix.push_back(std::move(line));
    }
    rows_json.push_back(json{{"ref_representatives", row.ref_representatives},
                             {"target_representatives", row.target_representatives},
                             {"p", matrix},
                             {"n_samples", row.n_samples},
                             {"clamped", row.clamped}});
  }
  json j{{"kind", "joint_band_measure"},
         {"group_boundaries", groups.boundaries()},
         {"provenance", provenance_to_json(provenance)},
         {"rows", rows_json}};
  return j.dump(2) + "\n";
}

JointBandMeasure JointBandMeasure::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("kind").get<std::string>() != "joint_band_measure")
    throw std::runtime_error("joint measure file: wrong kind");
  GroupGrid grid(j.at("group_boundaries").get<std::vector<double>>());
  JointBandMeasure out{std::move(grid), {}, provenance_from_json(j.at("provenance"))};
  for (const auto& rj : j.at("rows")) {
    JointRow row;
    row.ref_representatives = rj.at("ref_representatives").get<std::vector<double>>();
    row.target_representatives = rj.at("target_representatives").get<std::vector<double>>();
    row.ref_count = row.ref_representatives.size();
    row.target_count = row.target_representatives.size();
    for (const auto& line : rj.at("p"))
      for (const auto& v : line) row.p.push_back(v.get<double>());
    row.n_samples = rj.at("n_samples").get<std::size_t>();
    row.clamped = rj.at("clamped").get<std::size_t>();
    out.rows.push_back(std::move(row));
  }
  out.validate();
  return out;
}

void JointBandMeasure::save(const std::filesystem::path& path) const {
  write_text_file(path, to_json_string());
}

JointBandMeasure JointBandMeasure::load(const std::filesystem::path& path) {
  return from_json_string(read_text_file(path));
}

void KappaTable::validate() const {
  const std::size_t g = groups.group_count();
  if (probabilities.size() != g || kappa.size() != g)
    throw std::runtime_error("kappa table: group count mismatch");
  for (std::size_t i = 0; i < g; ++i) {
    if (probabilities[i].size() != band_count || kappa[i].size() != band_count)
      throw std::runtime_error("kappa table: band count mismatch");
    for (std::size_t j = 0; j < band_count; ++j) {
      if (kappa[i][j].size() != layer_temperatures.size())
        throw std::runtime_error("kappa table: layer count mismatch");
      for (double k : kappa[i][j])
        if (!std::isnan(k) && k < 0.0)
          throw std::runtime_error("kappa table: negative effective opacity");
    }
  }
}

std::string KappaTable::to_json_string() const {
  json kj = json::array();
  for (const auto& group : kappa) {
    json bj = json::array();
    for (const auto& band : group) {
      json lj = json::array();
      for (double v : band) {
        if (std::isnan(v))
          lj.push_back(nullptr);
        else
          lj.push_back(v);
      }
      bj.push_back(std::move(lj));
    }
    kj.push_back(std::move(bj));
  }
  json j{{"kind", "kappa_table"},
         {"group_boundaries", groups.boundaries()},
         {"band_count", band_count},
         {"layer_temperatures", layer_temperatures},
         {"probabilities", probabilities},
         {"kappa", kj}};
  return j.dump(2) + "\n";
}

KappaTable KappaTable::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("kind").get<std::string>() != "kappa_table")
    throw std::runtime_error("kappa file: wrong kind");
  KappaTable out{GroupGrid(j.at("group_boundaries").get<std::vector<double>>()),
                 j.at("band_count").get<std::size_t>(),
                 j.at("layer_temperatures").get<std::vector<double>>(),
                 j.at("probabilities").get<std::vector<std::vector<double>>>(),
                 {}};
  for (const auto& gj : j.at("kappa")) {
    std::vector<std::vector<double>> group;
    for (const auto& bj : gj) {
      std::vector<double> band;
      for (const auto& v : bj)
        band.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                   : v.get<double>());
      group.push_back(std::move(band));
    }
    out.kappa.push_back(std::move(group));
  }
  out.validate();
  return out;
}

void KappaTable::save(const std::filesystem::path& path) const {
  write_text_file(path, to_json_string());
}

KappaTable KappaTable::load(const std::filesystem::path& path) {
  return from_json_string(read_text_file(path));
}

}  // namespace ymhom
