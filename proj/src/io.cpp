#include "dsim/io.hpp"

#include <cstdio>
#include <ostream>

namespace dsim {

std::string format_number(Real value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_qgrid_csv(std::ostream& out, const QGrid<Real>& grid) {
  out << "x\\y";
  for (Index j = 0; j < grid.y_axis.size(); ++j) out << ',' << format_number(grid.y_axis[j]);
  out << '\n';
  for (Index i = 0; i < grid.x_axis.size(); ++i) {
    out << format_number(grid.x_axis[i]);
    for (Index j = 0; j < grid.y_axis.size(); ++j) out << ',' << format_number(grid.values(i, j));
    out << '\n';
  }
}

void write_pattern_csv(std::ostream& out, const ScreenPattern& pattern) {
  write_series_csv(out, "x_lambda", "intensity", pattern.x_axis, pattern.intensity);
}

void write_series_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                      const VectorXr& x, const VectorXr& y) {
  if (x.size() != y.size()) throw InvalidInput("write_series_csv: column lengths differ");
  out << x_name << ',' << y_name << '\n';
  for (Index i = 0; i < x.size(); ++i) out << format_number(x[i]) << ',' << format_number(y[i]) << '\n';
}

}  // namespace dsim
