#ifndef TRIPLEX_IO_HPP_
#define TRIPLEX_IO_HPP_

#include <iosfwd>
#include <string>

#include "triplex/cells.hpp"
#include "triplex/identification.hpp"
#include "triplex/transport.hpp"

namespace triplex {

// Parsed contents of an outcome data file. The CSV schema is
// `s,d,t,y[,id]` with integer codes for s, d, t; ids are optional and enable
// the joint estimand when the (s1,d1) rows carry the same ids at both times.
struct DataFile {
  CellTable table;
  bool has_ids = false;
  std::optional<PanelPairs> treated_pairs;  // (s1,d1) outcomes linked by id
};

// Strict reader: the header must match the schema exactly and any malformed
// row aborts the whole parse (no partial ingestion). Errors carry the row and
// column that failed.
DataFile read_data_csv(std::istream& in);
DataFile read_data_file(const std::string& path);

void write_data_csv(std::ostream& out, const CellTable& table);

// Point-cloud files: one point per line, coordinates separated by whitespace
// or commas.
PointCloud read_cloud(std::istream& in, const std::string& name);
PointCloud read_cloud_file(const std::string& path);
void write_cloud(std::ostream& out, const PointCloud& cloud);

}  // namespace triplex

#endif  // TRIPLEX_IO_HPP_
