#include "triplex/kde.hpp"

#include <algorithm>
#include <cmath>

#include "triplex/math.hpp"

namespace triplex {

namespace {

double sample_sd(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Kernel contributions beyond this many bandwidths underflow the normal pdf
// and are skipped; the samples are sorted so the window is one range.
constexpr double kKernelCut = 38.0;

}  // namespace

KernelDensity::KernelDensity(const CellSamples& samples) : values_(samples.values()) {
  if (values_.size() < 2)
    throw Error(Errc::DegenerateSample, "kernel density needs at least 2 samples in cell " +
                                            cell_name(samples.id()));
  const double sd = sample_sd(values_);
  if (sd <= 0.0)
    throw Error(Errc::DegenerateSample,
                "zero sample spread in cell " + cell_name(samples.id()));
  bandwidth_ = 1.06 * sd * std::pow(static_cast<double>(values_.size()), -0.2);
}

KernelDensity::KernelDensity(const CellSamples& samples, double bandwidth)
    : values_(samples.values()), bandwidth_(bandwidth) {
  if (values_.size() < 2 || bandwidth <= 0.0)
    throw Error(Errc::DegenerateSample, "invalid kernel density configuration");
}

double KernelDensity::density(double y) const {
  const double h = bandwidth_;
  auto lo = std::lower_bound(values_.begin(), values_.end(), y - kKernelCut * h);
  auto hi = std::upper_bound(lo, values_.end(), y + kKernelCut * h);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) sum += standard_normal_pdf((y - *it) / h);
  return sum / (static_cast<double>(values_.size()) * h);
}

double KernelDensity::density_deriv(double y) const {
  const double h = bandwidth_;
  auto lo = std::lower_bound(values_.begin(), values_.end(), y - kKernelCut * h);
  auto hi = std::upper_bound(lo, values_.end(), y + kKernelCut * h);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double z = (y - *it) / h;
    sum += -z * standard_normal_pdf(z);
  }
  return sum / (static_cast<double>(values_.size()) * h * h);
}

}  // namespace triplex
