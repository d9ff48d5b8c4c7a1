#pragma once

// CSV writers. All numbers use 9 significant digits.

#include <fstream>
#include <string>

#include "dsim/fock.hpp"
#include "dsim/propagation.hpp"

namespace dsim {

/// Header row holds the y axis (first cell "x\y"); each following row starts with x.
void write_qgrid_csv(std::ostream& out, const QGrid<Real>& grid);

/// Two columns: x' in lambda_CF units, intensity.
void write_pattern_csv(std::ostream& out, const ScreenPattern& pattern);

void write_series_csv(std::ostream& out, const std::string& x_name, const std::string& y_name,
                      const VectorXr& x, const VectorXr& y);

std::string format_number(Real value);

template <typename Writer>
void write_file(const std::string& path, Writer&& write) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out);
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace dsim
