#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "so3lab/simulation.hpp"

namespace so3lab::app {

/// t, eRE_x..z, westim_err_x..z, eR_x..z, eOmega_x..z, u_x..z, Psi, PsiE, U, [V,] ortho_R, ortho_Rbar
std::vector<std::string> csv_header(bool with_V);

/// One row per sample, "%.17g" formatting. `V` must be empty or match the sample count.
void write_csv(std::ostream& out, const TrajectoryLog& log, const std::vector<double>& V = {});

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name; throws std::out_of_range when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace so3lab::app
