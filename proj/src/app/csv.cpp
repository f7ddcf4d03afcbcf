#include "so3lab/app/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace so3lab::app {

std::vector<std::string> csv_header(bool with_V) {
  std::vector<std::string> h{"t"};
  for (const char* base : {"eRE", "westim_err", "eR", "eOmega", "u"}) {
    for (const char* axis : {"_x", "_y", "_z"}) h.push_back(std::string(base) + axis);
  }
  h.insert(h.end(), {"Psi", "PsiE", "U"});
  if (with_V) h.push_back("V");
  h.insert(h.end(), {"ortho_R", "ortho_Rbar"});
  return h;
}

void write_csv(std::ostream& out, const TrajectoryLog& log, const std::vector<double>& V) {
  const bool with_V = !V.empty();
  if (with_V && V.size() != log.samples.size()) throw std::invalid_argument("V column length mismatch");
  const auto header = csv_header(with_V);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';

  char buf[32];
  for (std::size_t k = 0; k < log.samples.size(); ++k) {
    const LogSample& s = log.samples[k];
    std::vector<double> row{s.t};
    for (const Vec3* v : {&s.e_RE, &s.velocity_error, &s.e_R, &s.e_Omega, &s.u}) {
      row.insert(row.end(), {v->x(), v->y(), v->z()});
    }
    row.insert(row.end(), {s.Psi, s.Psi_E, s.U});
    if (with_V) row.push_back(V[k]);
    row.insert(row.end(), {s.ortho_R, s.ortho_R_bar});
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::out_of_range("no CSV column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != t.header.size()) throw std::runtime_error("CSV row width differs from header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace so3lab::app
