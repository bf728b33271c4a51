#include "helebern/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "helebern/error.hpp"

namespace helebern::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field(std::ostream& os, const ScalarField& f, const DomainMask* mask) {
  const GridSpec& g = f.grid;
  os << g.dim;
  for (int d = 0; d < g.dim; ++d) os << ' ' << g.nodes[d];
  os << '\n';
  for (int d = 0; d < g.dim; ++d) os << (d ? " " : "") << format_double(g.origin[d]);
  os << '\n' << format_double(g.h) << '\n';
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << format_double(f[i]);
    if (mask) os << ' ' << static_cast<int>(mask->cls[i]);
    os << '\n';
  }
}

ScalarField read_field(std::istream& is) {
  GridSpec g;
  if (!(is >> g.dim) || (g.dim != 2 && g.dim != 3)) throw Error(ErrorCode::Io, "bad field header");
  for (int d = 0; d < g.dim; ++d)
    if (!(is >> g.nodes[d])) throw Error(ErrorCode::Io, "bad node counts");
  for (int d = 0; d < g.dim; ++d)
    if (!(is >> g.origin[d])) throw Error(ErrorCode::Io, "bad origin");
  if (!(is >> g.h)) throw Error(ErrorCode::Io, "bad spacing");
  g.validate();
  ScalarField f(g);
  std::string line;
  std::getline(is, line);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::getline(is, line)) throw Error(ErrorCode::Io, "field truncated at value " + std::to_string(i));
    std::istringstream ls(line);
    if (!(ls >> f[i])) throw Error(ErrorCode::Io, "unreadable value at line " + std::to_string(i + 4));
  }
  return f;
}

void write_contour(std::ostream& os, const ContourPolyline& c) {
  os << (c.dim == 3 ? "loop_id,x,y,z\n" : "loop_id,x,y\n");
  for (std::size_t v = 0; v < c.vertices.size(); ++v) {
    os << c.loop_of_vertex[v];
    for (int d = 0; d < c.dim; ++d) os << ',' << format_double(c.vertices[v][d]);
    os << '\n';
  }
}

void write_diagnostics(std::ostream& os, const std::vector<FlowSnapshot>& rows) {
  os << kDiagnosticsHeader << '\n';
  for (const FlowSnapshot& s : rows) {
    const FlowDiagnostics& d = s.diag;
    os << format_double(s.t) << ',' << format_double(d.dt) << ',' << format_double(d.vol) << ','
       << format_double(d.cap) << ',' << format_double(d.j_lambda) << ',' << format_double(d.res_min) << ','
       << format_double(d.res_max) << ',' << format_double(d.eq_radius) << ',' << d.npts << '\n';
  }
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  out << contents;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace helebern::io
