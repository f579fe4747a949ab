// util.hpp - number formatting, hashing, deterministic sampling, small numerics
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ymhom {

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

// FNV-1a, used for config hashes embedded in report metadata.
std::uint64_t fnv1a64(std::string_view s);

// Deterministic uniform doubles in [0,1). mt19937_64 output is fixed by the
// standard; std::uniform_real_distribution is not, so we build doubles from
// the raw bits directly.
class UniformSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double next_in(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

// Composite trapezoid over samples y(x) on an ascending grid.
double trapezoid(std::span<const double> x, std::span<const double> y);

// Adaptive Simpson on [a,b]. Used for report-side integrals of analytic
// densities; tests carry their own independent integrator.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-10, int max_depth = 48);

// Evenly spaced grid with n points including both endpoints (n >= 2).
std::vector<double> linspace(double a, double b, std::size_t n);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ymhom
