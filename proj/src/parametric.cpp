#include "triplex/parametric.hpp"

#include <cmath>

#include "triplex/math.hpp"

namespace triplex {

std::string family_name(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::Exponential: return "exponential";
    case Family::Loglinear: return "loglinear";
  }
  return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "exponential") return Family::Exponential;
  if (name == "loglinear") return Family::Loglinear;
  return std::nullopt;
}

double FittedDist::cdf(double y) const {
  switch (family_) {
    case Family::Gaussian:
      return standard_normal_cdf((y - p1_) / p2_);
    case Family::Exponential:
      return y <= 0.0 ? 0.0 : -std::expm1(-p1_ * y);
    case Family::Loglinear:
      return y <= 0.0 ? 0.0 : standard_normal_cdf((std::log(y) - p1_) / p2_);
  }
  return 0.0;
}

double FittedDist::quantile(double u) const {
  u = clamp_open_unit(u);
  switch (family_) {
    case Family::Gaussian:
      return p1_ + p2_ * standard_normal_quantile(u);
    case Family::Exponential:
      return -std::log1p(-u) / p1_;
    case Family::Loglinear:
      return std::exp(p1_ + p2_ * standard_normal_quantile(u));
  }
  return 0.0;
}

namespace {

struct Moments {
  double mean;
  double sd_mle;
};

Moments mle_moments(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

}  // namespace

FittedDist fit_parametric(const CellSamples& samples, Family family) {
  const auto& v = samples.values();
  if (v.size() < 2)
    throw Error(Errc::DegenerateFit,
                "cell " + cell_name(samples.id()) + " has fewer than 2 samples");

  switch (family) {
    case Family::Gaussian: {
      Moments m = mle_moments(v);
      if (m.sd_mle <= 0.0)
        throw Error(Errc::DegenerateFit,
                    "zero variance in cell " + cell_name(samples.id()));
      return FittedDist::gaussian(m.mean, m.sd_mle);
    }
    case Family::Exponential: {
      if (v.front() <= 0.0)
        throw Error(Errc::DomainError, "nonpositive value in cell " + cell_name(samples.id()) +
                                           " for exponential fit");
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      return FittedDist::exponential(1.0 / mean);
    }
    case Family::Loglinear: {
      if (v.front() <= 0.0)
        throw Error(Errc::DomainError, "nonpositive value in cell " + cell_name(samples.id()) +
                                           " for loglinear fit");
      std::vector<double> logs(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) logs[i] = std::log(v[i]);
      Moments m = mle_moments(logs);
      if (m.sd_mle <= 0.0)
        throw Error(Errc::DegenerateFit,
                    "zero variance in cell " + cell_name(samples.id()));
      return FittedDist::loglinear(m.mean, m.sd_mle);
    }
  }
  throw Error(Errc::DomainError, "unknown family");
}

}  // namespace triplex
