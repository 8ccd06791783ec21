#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace mlandscape::cli {

/// Numeric CSV with a header row. Cells go through csv::parse, so "inf" is accepted.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Throws InputError if the column is missing.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  bool markers = false;
};

/// Shaded x-interval spanning the full plot height.
struct Band {
  double x0 = 0.0;
  double x1 = 0.0;
  std::string color = "#cccccc";
  double opacity = 0.4;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  std::vector<Band> bands;
  std::vector<double> vlines;
  std::vector<double> hlines;
};

/// Polyline / marker SVG. Non-finite points are dropped.
void write_svg(std::ostream& out, const Plot& p);

/// Default palette, cycled by series index.
const std::string& palette(std::size_t k);

}  // namespace mlandscape::cli
