#include "triplex/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace triplex {

namespace {

[[noreturn]] void bad_row(std::size_t row, const std::string& what) {
  throw Error(Errc::BadInput, "row " + std::to_string(row) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_code(const std::string& field, std::size_t row, const char* column) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  bad_row(row, std::string("column ") + column + " must be 0 or 1, got '" + field + "'");
}

double parse_outcome(const std::string& field, std::size_t row) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v))
    bad_row(row, "column y must be a finite number, got '" + field + "'");
  return v;
}

}  // namespace

DataFile read_data_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::BadInput, "empty data file");
  const auto header = split_csv(line);
  const bool with_id = header == std::vector<std::string>{"s", "d", "t", "y", "id"};
  if (!with_id && header != std::vector<std::string>{"s", "d", "t", "y"})
    throw Error(Errc::BadInput, "header must be exactly 's,d,t,y' or 's,d,t,y,id'");
  const std::size_t n_cols = with_id ? 5 : 4;

  std::array<std::vector<double>, 8> per_cell;
  // id -> outcome at (t0, t1) for the (s1,d1) cohort; needed for the joint
  // estimand.
  std::map<std::string, std::array<std::optional<double>, 2>> treated_by_id;

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv(line);
    if (fields.size() != n_cols)
      bad_row(row, "expected " + std::to_string(n_cols) + " columns, got " +
                       std::to_string(fields.size()));
    const int s = parse_code(fields[0], row, "s");
    const int d = parse_code(fields[1], row, "d");
    const int t = parse_code(fields[2], row, "t");
    const double y = parse_outcome(fields[3], row);
    per_cell[cell_id(s, d, t).index()].push_back(y);
    if (n_cols == 5 && s == 1 && d == 1 && !fields[4].empty()) {
      auto& slot = treated_by_id[fields[4]][t];
      if (slot.has_value()) bad_row(row, "duplicate id '" + fields[4] + "' at the same time");
      slot = y;
    }
  }

  DataFile data;
  data.has_ids = n_cols == 5;
  for (CellId id : all_cells()) {
    auto& values = per_cell[id.index()];
    if (!values.empty()) data.table.set(CellSamples(id, std::move(values)));
  }
  if (data.has_ids) {
    PanelPairs pairs;
    for (const auto& [id, both] : treated_by_id)
      if (both[0].has_value() && both[1].has_value())
        pairs.pairs.emplace_back(*both[0], *both[1]);
    if (!pairs.pairs.empty()) data.treated_pairs = std::move(pairs);
  }
  return data;
}

DataFile read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open data file: " + path);
  return read_data_csv(in);
}

void write_data_csv(std::ostream& out, const CellTable& table) {
  out << "s,d,t,y\n";
  for (CellId id : all_cells()) {
    if (!table.has(id)) continue;
    for (double y : table.cell(id).values()) {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof(buf), y);
      out << static_cast<int>(id.s) << ',' << static_cast<int>(id.d) << ','
          << static_cast<int>(id.t) << ',' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  }
}

PointCloud read_cloud(std::istream& in, const std::string& name) {
  std::vector<double> data;
  std::size_t dim = 0;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    for (char& c : line)
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    std::istringstream ss(line);
    std::vector<double> coords;
    double v;
    while (ss >> v) coords.push_back(v);
    if (coords.empty()) continue;
    if (dim == 0) dim = coords.size();
    if (coords.size() != dim)
      throw Error(Errc::DimensionMismatch, name + " row " + std::to_string(row) + ": expected " +
                                               std::to_string(dim) + " coordinates, got " +
                                               std::to_string(coords.size()));
    data.insert(data.end(), coords.begin(), coords.end());
  }
  if (dim == 0) throw Error(Errc::BadInput, name + ": no points");
  return PointCloud(dim, std::move(data));
}

PointCloud read_cloud_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open cloud file: " + path);
  return read_cloud(in, path);
}

void write_cloud(std::ostream& out, const PointCloud& cloud) {
  char buf[32];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto res = std::to_chars(buf, buf + sizeof(buf), p[k]);
      if (k) out << ' ';
      out << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

}  // namespace triplex
