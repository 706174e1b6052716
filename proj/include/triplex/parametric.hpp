#ifndef TRIPLEX_PARAMETRIC_HPP_
#define TRIPLEX_PARAMETRIC_HPP_

#include <array>
#include <optional>
#include <string>

#include "triplex/cells.hpp"

namespace triplex {

enum class Family { Gaussian, Exponential, Loglinear };

std::string family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

// A distribution fitted by maximum likelihood to one cell. cdf and quantile
// are exact closed forms of the fitted family; quantile arguments are clamped
// one ulp inside (0,1) so saturated CDF values cannot produce infinities.
class FittedDist {
 public:
  Family family() const { return family_; }
  double param1() const { return p1_; }  // mean (gaussian), rate (exponential), log-mean (loglinear)
  double param2() const { return p2_; }  // sd (gaussian), unused, log-sd (loglinear)

  double cdf(double y) const;
  double quantile(double u) const;

  static FittedDist gaussian(double mean, double sd) { return {Family::Gaussian, mean, sd}; }
  static FittedDist exponential(double rate) { return {Family::Exponential, rate, 0.0}; }
  static FittedDist loglinear(double log_mean, double log_sd) {
    return {Family::Loglinear, log_mean, log_sd};
  }

 private:
  FittedDist(Family f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}

  Family family_;
  double p1_;
  double p2_;
};

// Maximum-likelihood fit of one family to one cell:
//   gaussian    -> sample mean and MLE standard deviation (1/n)
//   exponential -> rate = 1 / sample mean
//   loglinear   -> gaussian MLE on log-values
// Requires n >= 2; positive-support families reject nonpositive values; a
// zero-spread cell is a degenerate fit.
FittedDist fit_parametric(const CellSamples& samples, Family family);

// Per-cell family assignment for the MLE estimator variants. A single study
// can need different families per cell (e.g. a log-scale post-period cell in
// an otherwise gaussian design), so the uniform constructor is a convenience,
// not the only mode.
class FamilyMap {
 public:
  FamilyMap() : families_{} { families_.fill(Family::Gaussian); }

  static FamilyMap uniform(Family f) {
    FamilyMap map;
    map.families_.fill(f);
    return map;
  }

  FamilyMap& set(CellId id, Family f) {
    families_[id.index()] = f;
    return *this;
  }

  Family at(CellId id) const { return families_[id.index()]; }

 private:
  std::array<Family, 8> families_;
};

}  // namespace triplex

#endif  // TRIPLEX_PARAMETRIC_HPP_
