#ifndef TRIPLEX_KDE_HPP_
#define TRIPLEX_KDE_HPP_

#include <vector>

#include "triplex/cells.hpp"

namespace triplex {

// Gaussian-kernel density estimate of one cell with Silverman's bandwidth
// 1.06 * sd * n^(-1/5). Used only by the plug-in variance: the distribution
// machinery itself stays purely empirical. Owns a sorted copy of the samples.
class KernelDensity {
 public:
  explicit KernelDensity(const CellSamples& samples);
  KernelDensity(const CellSamples& samples, double bandwidth);

  double bandwidth() const { return bandwidth_; }

  double density(double y) const;
  double density_deriv(double y) const;

 private:
  std::vector<double> values_;
  double bandwidth_;
};

}  // namespace triplex

#endif  // TRIPLEX_KDE_HPP_
