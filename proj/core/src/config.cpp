#include "helebern/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "helebern/error.hpp"
#include "helebern/io.hpp"

namespace helebern {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "dim",           "grid.min",      "grid.max",        "grid.n",         "source.kind",  "source.center",
      "source.radius", "source.axes",   "g0",              "init.kind",      "init.center",  "init.radius",
      "init.axes",     "law.f",         "law.c",           "law.a",          "lambda",       "t_end",
      "cfl.safety",    "dt.cap",        "reinit.every",    "diag.every",     "steady.res_tol", "steady.disp_tol",
      "solver.tol",    "solver.max_iter", "out.dir",       "out.contours",   "out.fields"};
  return keys;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(int line, const std::string& key, const std::string& why) {
  throw Error(ErrorCode::BadValue, "line " + std::to_string(line) + ": " + key + ": " + why);
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry& need(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw Error(ErrorCode::MissingKey, "missing key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const { return parse_number(key, need(key)); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long integer(const std::string& key) const {
    const Entry& e = need(key);
    long v = 0;
    const char* end = e.value.data() + e.value.size();
    const auto [p, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || p != end) bad(e.line, key, "expected an integer, got '" + e.value + "'");
    return v;
  }
  long integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

  std::vector<double> list(const std::string& key) const {
    const Entry& e = need(key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, {trim(item), e.line}));
    if (out.empty()) bad(e.line, key, "expected a comma-separated list");
    return out;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Entry& e = need(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    bad(e.line, key, "expected true or false, got '" + e.value + "'");
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? need(key).value : fallback;
  }

  int line(const std::string& key) const { return has(key) ? need(key).line : 0; }

 private:
  static double parse_number(const std::string& key, const Entry& e) {
    double v = 0.0;
    const char* end = e.value.data() + e.value.size();
    const auto [p, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
      bad(e.line, key, "expected a number, got '" + e.value + "'");
    return v;
  }

  std::map<std::string, Entry> entries_;
};

ShapeSpec read_shape(const Reader& r, const std::string& prefix, int dim) {
  ShapeSpec s;
  const std::string kind_key = prefix + ".kind";
  const Entry& kind = r.need(kind_key);
  if (kind.value == "ball") {
    s.kind = ShapeSpec::Kind::Ball;
  } else if (kind.value == "ellipse") {
    s.kind = ShapeSpec::Kind::Ellipse;
  } else {
    bad(kind.line, kind_key, "expected ball or ellipse, got '" + kind.value + "'");
  }
  if (r.has(prefix + ".center")) {
    const auto c = r.list(prefix + ".center");
    if (static_cast<int>(c.size()) != dim) bad(r.line(prefix + ".center"), prefix + ".center", "needs dim values");
    for (int d = 0; d < dim; ++d) s.center[d] = c[d];
  }
  if (s.kind == ShapeSpec::Kind::Ball) {
    if (r.has(prefix + ".axes")) bad(r.line(prefix + ".axes"), prefix + ".axes", "only valid for an ellipse");
    s.radius = r.number(prefix + ".radius");
    if (!(s.radius > 0.0)) bad(r.line(prefix + ".radius"), prefix + ".radius", "must be positive");
  } else {
    if (r.has(prefix + ".radius")) bad(r.line(prefix + ".radius"), prefix + ".radius", "only valid for a ball");
    const auto a = r.list(prefix + ".axes");
    if (static_cast<int>(a.size()) != dim) bad(r.line(prefix + ".axes"), prefix + ".axes", "needs dim values");
    for (int d = 0; d < dim; ++d) {
      if (!(a[d] > 0.0)) bad(r.line(prefix + ".axes"), prefix + ".axes", "must be positive");
      s.axes[d] = a[d];
    }
  }
  return s;
}

std::string join(const Point& p, int dim) {
  std::string out;
  for (int d = 0; d < dim; ++d) out += (d ? "," : "") + io::format_double(p[d]);
  return out;
}

void write_shape(std::ostringstream& os, const ShapeSpec& s, const std::string& prefix, int dim) {
  os << prefix << ".kind = " << (s.kind == ShapeSpec::Kind::Ball ? "ball" : "ellipse") << '\n';
  os << prefix << ".center = " << join(s.center, dim) << '\n';
  if (s.kind == ShapeSpec::Kind::Ball)
    os << prefix << ".radius = " << io::format_double(s.radius) << '\n';
  else
    os << prefix << ".axes = " << join(s.axes, dim) << '\n';
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  const auto& keys = config_keys();
  std::map<std::string, Entry> entries;
  std::istringstream is{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string body = trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::BadValue, "line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw Error(ErrorCode::UnknownKey, "line " + std::to_string(line) + ": unknown key '" + key + "'");
    if (entries.count(key)) bad(line, key, "duplicate key");
    if (value.empty()) bad(line, key, "empty value");
    entries[key] = {value, line};
  }

  const Reader r(std::move(entries));
  RunConfig c;
  c.dim = static_cast<int>(r.integer("dim"));
  if (c.dim != 2 && c.dim != 3) bad(r.line("dim"), "dim", "must be 2 or 3");
  c.grid_min = r.number("grid.min");
  c.grid_max = r.number("grid.max");
  if (!(c.grid_max > c.grid_min)) bad(r.line("grid.max"), "grid.max", "must exceed grid.min");
  c.grid_n = static_cast<int>(r.integer("grid.n"));
  if (c.grid_n + 1 < GridSpec::kMinNodes)
    bad(r.line("grid.n"), "grid.n", "needs at least " + std::to_string(GridSpec::kMinNodes - 1) + " cells");
  c.source = read_shape(r, "source", c.dim);
  c.g0 = r.number("g0", c.g0);
  if (!(c.g0 > 0.0)) bad(r.line("g0"), "g0", "must be positive");
  c.init = read_shape(r, "init", c.dim);

  c.law_f = r.text("law.f", "");
  if (c.law_f.empty()) r.need("law.f");
  if (c.law_f == "constant") {
    if (r.has("law.a")) bad(r.line("law.a"), "law.a", "not used by law.f = constant");
    c.law_c = r.number("law.c", -1.0);
  } else if (c.law_f == "mean_curvature") {
    if (r.has("law.c")) bad(r.line("law.c"), "law.c", "not used by law.f = mean_curvature");
    c.law_a = r.number("law.a", 1.0);
  } else if (c.law_f == "affine") {
    c.law_a = r.number("law.a");
    c.law_c = r.number("law.c");
  } else {
    bad(r.line("law.f"), "law.f", "expected constant, mean_curvature or affine, got '" + c.law_f + "'");
  }
  if (c.law_f != "constant" && !(c.law_a >= 0.0)) bad(r.line("law.a"), "law.a", "must be >= 0");
  if (c.law_f == "constant") c.law_a = 1.0;
  if (c.law_f == "mean_curvature") c.law_c = -1.0;

  c.lambda = r.list("lambda");
  for (double l : c.lambda)
    if (!(l >= 0.0)) bad(r.line("lambda"), "lambda", "must be >= 0");

  c.t_end = r.number("t_end");
  if (!(c.t_end > 0.0)) bad(r.line("t_end"), "t_end", "must be positive");
  c.cfl_safety = r.number("cfl.safety", c.cfl_safety);
  if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) bad(r.line("cfl.safety"), "cfl.safety", "must lie in (0, 1]");
  c.dt_cap = r.number("dt.cap", c.dt_cap);
  if (!(c.dt_cap > 0.0)) bad(r.line("dt.cap"), "dt.cap", "must be positive");
  c.reinit_every = static_cast<int>(r.integer("reinit.every", c.reinit_every));
  if (c.reinit_every < 0) bad(r.line("reinit.every"), "reinit.every", "must be >= 0");
  c.diag_every = static_cast<int>(r.integer("diag.every", c.diag_every));
  if (c.diag_every < 1) bad(r.line("diag.every"), "diag.every", "must be >= 1");
  c.steady_res_tol = r.number("steady.res_tol", c.steady_res_tol);
  if (!(c.steady_res_tol >= 0.0)) bad(r.line("steady.res_tol"), "steady.res_tol", "must be >= 0");
  c.steady_disp_tol = r.number("steady.disp_tol", c.steady_disp_tol);
  if (!(c.steady_disp_tol >= 0.0)) bad(r.line("steady.disp_tol"), "steady.disp_tol", "must be >= 0");
  c.solver_tol = r.number("solver.tol", c.solver_tol);
  if (!(c.solver_tol > 0.0)) bad(r.line("solver.tol"), "solver.tol", "must be positive");
  c.solver_max_iter = r.integer("solver.max_iter", c.solver_max_iter);
  if (c.solver_max_iter < 1) bad(r.line("solver.max_iter"), "solver.max_iter", "must be >= 1");
  c.out_dir = r.text("out.dir", c.out_dir);
  c.out_contours = r.flag("out.contours", c.out_contours);
  c.out_fields = r.flag("out.fields", c.out_fields);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  os << "dim = " << c.dim << '\n';
  os << "grid.min = " << io::format_double(c.grid_min) << '\n';
  os << "grid.max = " << io::format_double(c.grid_max) << '\n';
  os << "grid.n = " << c.grid_n << '\n';
  write_shape(os, c.source, "source", c.dim);
  os << "g0 = " << io::format_double(c.g0) << '\n';
  write_shape(os, c.init, "init", c.dim);
  os << "law.f = " << c.law_f << '\n';
  if (c.law_f != "mean_curvature") os << "law.c = " << io::format_double(c.law_c) << '\n';
  if (c.law_f != "constant") os << "law.a = " << io::format_double(c.law_a) << '\n';
  os << "lambda = ";
  for (std::size_t k = 0; k < c.lambda.size(); ++k) os << (k ? "," : "") << io::format_double(c.lambda[k]);
  os << '\n';
  os << "t_end = " << io::format_double(c.t_end) << '\n';
  os << "cfl.safety = " << io::format_double(c.cfl_safety) << '\n';
  os << "dt.cap = " << io::format_double(c.dt_cap) << '\n';
  os << "reinit.every = " << c.reinit_every << '\n';
  os << "diag.every = " << c.diag_every << '\n';
  os << "steady.res_tol = " << io::format_double(c.steady_res_tol) << '\n';
  os << "steady.disp_tol = " << io::format_double(c.steady_disp_tol) << '\n';
  os << "solver.tol = " << io::format_double(c.solver_tol) << '\n';
  os << "solver.max_iter = " << c.solver_max_iter << '\n';
  os << "out.dir = " << c.out_dir << '\n';
  os << "out.contours = " << (c.out_contours ? "true" : "false") << '\n';
  os << "out.fields = " << (c.out_fields ? "true" : "false") << '\n';
  return os.str();
}

GridSpec RunConfig::grid() const { return GridSpec::box(dim, grid_min, grid_max, grid_n); }

SpeedLaw RunConfig::law(double lambda_value) const {
  SpeedLaw l;
  l.lambda = lambda_value;
  if (law_f == "constant")
    l.curvature_part = ConstantSpeed{law_c};
  else if (law_f == "mean_curvature")
    l.curvature_part = MeanCurvatureSpeed{law_a};
  else
    l.curvature_part = AffineSpeed{law_a, law_c};
  return l;
}

FlowConfig RunConfig::flow(double lambda_value) const {
  FlowConfig f;
  f.grid = grid();
  f.source = SourceSpec{make_shape(source, f.grid), g0};
  f.initial = make_shape(init, f.grid);
  f.law = law(lambda_value);
  f.t_end = t_end;
  f.reinit_every = reinit_every;
  f.steady_res_tol = steady_res_tol;
  f.steady_disp_tol = steady_disp_tol;
  f.diag_every = diag_every;
  f.solver.tol = solver_tol;
  f.solver.max_iter = solver_max_iter;
  f.cfl_safety = cfl_safety;
  f.dt_cap = dt_cap;
  return f;
}

FlowConfig RunConfig::flow() const {
  if (lambda.size() != 1) throw Error(ErrorCode::BadValue, "lambda: expected a single value for this command");
  return flow(lambda.front());
}

LevelSetField make_shape(const ShapeSpec& shape, const GridSpec& grid) {
  if (shape.kind == ShapeSpec::Kind::Ball) return sdf_ball(shape.center, shape.radius, grid);
  const int dim = grid.dim;
  double smallest = shape.axes[0];
  for (int d = 1; d < dim; ++d) smallest = std::min(smallest, shape.axes[d]);
  const auto f = [&](const Point& x) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double q = (x[d] - shape.center[d]) / shape.axes[d];
      s += q * q;
    }
    return (std::sqrt(s) - 1.0) * smallest;
  };
  return sdf_from_implicit(f, grid, LevelSetField::default_band(grid));
}

}  // namespace helebern
