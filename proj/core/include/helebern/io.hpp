#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "helebern/capacity.hpp"
#include "helebern/contour.hpp"
#include "helebern/evolve.hpp"

namespace helebern::io {

/// Field snapshot: `dim nx ny [nz]`, origin line, spacing line, then one value
/// per line in storage order (x fastest), printed with 17 significant digits.
/// With a mask, every value line carries a second column: 0 fluid, 1 source, 2 exterior.
void write_field(std::ostream& os, const ScalarField& f, const DomainMask* mask = nullptr);
ScalarField read_field(std::istream& is);

/// `loop_id,x,y[,z]` with vertices in loop order.
void write_contour(std::ostream& os, const ContourPolyline& c);

inline constexpr const char* kDiagnosticsHeader = "t,dt,vol,cap,J,res_min,res_max,eq_radius,npts";
void write_diagnostics(std::ostream& os, const std::vector<FlowSnapshot>& rows);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

void write_file(const std::string& path, const std::string& contents);

}  // namespace helebern::io
