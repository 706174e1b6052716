#ifndef TRIPLEX_CELLS_HPP_
#define TRIPLEX_CELLS_HPP_

#include <array>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace triplex {

// Typed failures surfaced by the estimation layers. The CLI maps input-side
// codes to exit 2 and computation-side codes to exit 3.
enum class Errc {
  EmptyCell,
  MissingCell,
  InvalidProbability,
  ChainTypeError,
  EmptyPanel,
  NegativeSlack,
  DegenerateFit,
  DomainError,
  DegenerateSample,
  DensityUnderflow,
  DimensionMismatch,
  SizeMismatch,
  ZeroTrueTau,
  BootstrapFailure,
  NonFinite,
  BadInput,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

enum class State : int { S0 = 0, S1 = 1 };
enum class Group : int { D0 = 0, D1 = 1 };
enum class Time : int { T0 = 0, T1 = 1 };

// One of the eight (state, group, time) design cells of a two-state,
// two-group, two-period study.
struct CellId {
  State s;
  Group d;
  Time t;

  constexpr std::size_t index() const {
    return static_cast<std::size_t>(s) * 4 + static_cast<std::size_t>(d) * 2 +
           static_cast<std::size_t>(t);
  }
  friend constexpr bool operator==(CellId a, CellId b) {
    return a.index() == b.index();
  }
};

inline constexpr CellId cell_id(int s, int d, int t) {
  return CellId{static_cast<State>(s), static_cast<Group>(d), static_cast<Time>(t)};
}

inline std::string cell_name(CellId id) {
  return std::string("s") + (id.s == State::S1 ? "1" : "0") + "d" +
         (id.d == Group::D1 ? "1" : "0") + "t" + (id.t == Time::T1 ? "1" : "0");
}

inline constexpr std::array<CellId, 8> all_cells() {
  return {cell_id(0, 0, 0), cell_id(0, 0, 1), cell_id(0, 1, 0), cell_id(0, 1, 1),
          cell_id(1, 0, 0), cell_id(1, 0, 1), cell_id(1, 1, 0), cell_id(1, 1, 1)};
}

// The outcome samples observed in one design cell. Values are kept sorted
// ascending; duplicates are allowed, all entries must be finite.
class CellSamples {
 public:
  CellSamples() = default;

  CellSamples(CellId id, std::vector<double> values) : id_(id), values_(std::move(values)) {
    for (double v : values_) {
      if (!std::isfinite(v))
        throw Error(Errc::BadInput, "non-finite outcome value in cell " + cell_name(id_));
    }
    std::sort(values_.begin(), values_.end());
  }

  CellId id() const { return id_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  double mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

 private:
  CellId id_{cell_id(0, 0, 0)};
  std::vector<double> values_;
};

// Container for the study's observed data: up to eight cells indexed by
// (state, group, time). The treated post-period cell (s1,d1,t1) may be absent
// for identification-only uses; everything else is required by the
// counterfactual chain.
class CellTable {
 public:
  void set(CellSamples samples) {
    if (samples.empty())
      throw Error(Errc::EmptyCell, "cell " + cell_name(samples.id()) + " is empty");
    cells_[samples.id().index()] = std::move(samples);
  }

  bool has(CellId id) const { return cells_[id.index()].has_value(); }

  const CellSamples& cell(CellId id) const {
    const auto& slot = cells_[id.index()];
    if (!slot) throw Error(Errc::MissingCell, "missing cell " + cell_name(id));
    return *slot;
  }

  // Cells required by the triple-changes counterfactual chain: all but
  // (s1,d1,t1).
  void require_chain_cells() const {
    for (CellId id : all_cells()) {
      if (id == cell_id(1, 1, 1)) continue;
      cell(id);
    }
  }

  void require_all_cells() const {
    for (CellId id : all_cells()) cell(id);
  }

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const auto& slot : cells_)
      if (slot) n += slot->size();
    return n;
  }

 private:
  std::array<std::optional<CellSamples>, 8> cells_;
};

}  // namespace triplex

#endif  // TRIPLEX_CELLS_HPP_
