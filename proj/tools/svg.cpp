#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mlandscape/csv.hpp"
#include "mlandscape/types.hpp"

namespace mlandscape::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = kInf;
  double hi = -kInf;
  void add(double x) {
    if (!std::isfinite(x)) return;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  void settle() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError("csv: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InputError("csv: empty input");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw InputError("csv: ragged row");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(csv::parse(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_csv(in);
}

const std::string& palette(std::size_t k) {
  static const std::array<std::string, 8> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return colors[k % colors.size()];
}

void write_svg(std::ostream& out, const Plot& p) {
  constexpr double width = 900, height = 500;
  constexpr double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  Range xr, yr;
  for (const auto& s : p.series) {
    for (const auto& [x, y] : s.points) {
      if (std::isfinite(x) && std::isfinite(y)) {
        xr.add(x);
        yr.add(y);
      }
    }
  }
  for (double y : p.hlines) yr.add(y);
  xr.settle();
  yr.settle();
  const auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto sy = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(p.title)
      << "</text>\n";

  for (const auto& b : p.bands) {
    const double x0 = std::clamp(sx(b.x0), left, left + pw);
    const double x1 = std::clamp(sx(b.x1), left, left + pw);
    out << "<rect x=\"" << x0 << "\" y=\"" << top << "\" width=\"" << std::max(0.5, x1 - x0) << "\" height=\""
        << ph << "\" fill=\"" << b.color << "\" fill-opacity=\"" << b.opacity << "\"/>\n";
  }

  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    out << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << fmt(xv) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
        << fmt(yv) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(p.xlabel) << "</text>\n";
  out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << top + ph / 2 << ")\">" << escape(p.ylabel) << "</text>\n";

  for (double x : p.vlines) {
    if (!std::isfinite(x)) continue;
    out << "<line x1=\"" << sx(x) << "\" y1=\"" << top << "\" x2=\"" << sx(x) << "\" y2=\"" << top + ph
        << "\" stroke=\"#555555\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (double y : p.hlines) {
    if (!std::isfinite(y)) continue;
    out << "<line x1=\"" << left << "\" y1=\"" << sy(y) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(y)
        << "\" stroke=\"#555555\" stroke-dasharray=\"2 2\"/>\n";
  }

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    if (s.markers) {
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"2\" fill=\"" << s.color << "\"/>\n";
      }
    } else {
      // break the polyline at non-finite points
      bool open = false;
      for (const auto& [x, y] : s.points) {
        const bool ok = std::isfinite(x) && std::isfinite(y);
        if (ok && !open) {
          out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
          open = true;
        } else if (!ok && open) {
          out << "\"/>\n";
          open = false;
        }
        if (ok) out << sx(x) << ',' << sy(y) << ' ';
      }
      if (open) out << "\"/>\n";
    }
    out << "<text x=\"" << left + 8 << "\" y=\"" << top + 16 + 14 * static_cast<double>(k)
        << "\" font-size=\"11\" fill=\"" << s.color << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace mlandscape::cli
