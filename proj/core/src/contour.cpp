#include "helebern/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "helebern/error.hpp"

namespace helebern {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

bool inside(double v) noexcept { return v < 0.0; }

Point lerp_zero(const Point& a, const Point& b, double fa, double fb) noexcept {
  const double t = fa / (fa - fb);
  return Point{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) noexcept {
  const Point ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Point ap{p[0] - a[0], p[1] - a[1], p[2] - a[2]};
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(ap, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Point q{a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]};
  return distance(p, q);
}

ContourPolyline crossings_3d(const LevelSetField& phi) {
  const GridSpec& g = phi.grid();
  ContourPolyline c;
  c.dim = 3;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index3 ijk = g.unflatten(i);
    for (int d = 0; d < 3; ++d) {
      if (ijk[d] + 1 >= g.nodes[d]) continue;
      const std::size_t j = i + g.stride(d);
      if (inside(phi[i]) != inside(phi[j])) {
        c.vertices.push_back(lerp_zero(g.position(i), g.position(j), phi[i], phi[j]));
        c.loop_of_vertex.push_back(0);
      }
    }
  }
  if (!c.vertices.empty()) c.closed.push_back(false);
  return c;
}

}  // namespace

ContourPolyline extract_contour(const LevelSetField& phi) {
  if (!phi.has_interface()) throw Error(ErrorCode::NoInterface, "no zero level set to extract");
  const GridSpec& g = phi.grid();
  if (g.dim == 3) return crossings_3d(phi);

  const int nx = g.nodes[0], ny = g.nodes[1];
  // One potential vertex per edge: slot 2*node for the +x edge, 2*node+1 for +y.
  std::vector<std::size_t> edge_vertex(2 * g.size(), kNone);
  std::vector<Point> raw;
  auto edge = [&](std::size_t node, int axis) -> std::size_t {
    std::size_t& slot = edge_vertex[2 * node + axis];
    if (slot == kNone) {
      const std::size_t other = node + g.stride(axis);
      slot = raw.size();
      raw.push_back(lerp_zero(g.position(node), g.position(other), phi[node], phi[other]));
    }
    return slot;
  };

  std::vector<std::array<std::size_t, 2>> segs;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t n0 = g.flatten({i, j, 0});
      const std::size_t n1 = n0 + 1, n3 = n0 + nx, n2 = n3 + 1;
      const double v0 = phi[n0], v1 = phi[n1], v2 = phi[n2], v3 = phi[n3];
      const int code = inside(v0) | inside(v1) << 1 | inside(v2) << 2 | inside(v3) << 3;
      if (code == 0 || code == 15) continue;
      // Edges: bottom (0-1), right (1-2), top (3-2), left (0-3).
      auto bottom = [&] { return edge(n0, 0); };
      auto right = [&] { return edge(n1, 1); };
      auto top = [&] { return edge(n3, 0); };
      auto left = [&] { return edge(n0, 1); };
      switch (code) {
        case 1: case 14: segs.push_back({left(), bottom()}); break;
        case 2: case 13: segs.push_back({bottom(), right()}); break;
        case 3: case 12: segs.push_back({left(), right()}); break;
        case 4: case 11: segs.push_back({right(), top()}); break;
        case 6: case 9: segs.push_back({bottom(), top()}); break;
        case 7: case 8: segs.push_back({left(), top()}); break;
        case 5: case 10: {
          const bool center_inside = inside(0.25 * (v0 + v1 + v2 + v3));
          // Corners 0 and 2 share a sign in case 5, corners 1 and 3 in case 10.
          const bool join_02 = (code == 5) == center_inside;
          if (join_02) {
            segs.push_back({left(), top()});
            segs.push_back({bottom(), right()});
          } else {
            segs.push_back({left(), bottom()});
            segs.push_back({right(), top()});
          }
          break;
        }
        default: break;
      }
    }
  }

  std::vector<std::array<std::size_t, 2>> adj(raw.size(), {kNone, kNone});
  for (std::size_t s = 0; s < segs.size(); ++s) {
    for (int e = 0; e < 2; ++e) {
      auto& slots = adj[segs[s][e]];
      (slots[0] == kNone ? slots[0] : slots[1]) = s;
    }
  }

  ContourPolyline out;
  out.dim = 2;
  std::vector<char> used(segs.size(), 0);
  auto walk = [&](std::size_t start_vertex, std::size_t start_seg) {
    const std::size_t first_out = out.vertices.size();
    const int loop = static_cast<int>(out.closed.size());
    std::size_t v = start_vertex, s = start_seg;
    out.vertices.push_back(raw[v]);
    out.loop_of_vertex.push_back(loop);
    bool closed = false;
    while (s != kNone && !used[s]) {
      used[s] = 1;
      const std::size_t next = segs[s][0] == v ? segs[s][1] : segs[s][0];
      if (next == start_vertex) {
        closed = true;
        out.segments.push_back({out.vertices.size() - 1, first_out});
        break;
      }
      out.vertices.push_back(raw[next]);
      out.loop_of_vertex.push_back(loop);
      out.segments.push_back({out.vertices.size() - 2, out.vertices.size() - 1});
      v = next;
      s = adj[v][0] == s ? adj[v][1] : adj[v][0];
    }
    out.closed.push_back(closed);
  };
  // Open chains start at their free ends, then the remaining closed loops.
  for (std::size_t v = 0; v < raw.size(); ++v)
    if (adj[v][1] == kNone && adj[v][0] != kNone && !used[adj[v][0]]) walk(v, adj[v][0]);
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) walk(segs[s][0], s);

  // Orient every loop with the inside on its left.
  const double probe = 0.05 * g.h;
  std::size_t seg_begin = 0;
  for (std::size_t loop = 0; loop < out.closed.size(); ++loop) {
    std::size_t seg_end = seg_begin;
    while (seg_end < out.segments.size() && out.loop_of_vertex[out.segments[seg_end][0]] == int(loop)) ++seg_end;
    if (seg_end == seg_begin) continue;
    double votes = 0.0;
    for (std::size_t s = seg_begin; s < seg_end; ++s) {
      const Point& a = out.vertices[out.segments[s][0]];
      const Point& b = out.vertices[out.segments[s][1]];
      const double len = distance(a, b);
      if (len <= 0.0) continue;
      const Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.0};
      const Point left{mid[0] - probe * (b[1] - a[1]) / len, mid[1] + probe * (b[0] - a[0]) / len, 0.0};
      votes += phi.phi.interpolate(left) < 0.0 ? 1.0 : -1.0;
    }
    if (votes < 0.0) {
      for (std::size_t s = seg_begin; s < seg_end; ++s) std::swap(out.segments[s][0], out.segments[s][1]);
    }
    seg_begin = seg_end;
  }
  return out;
}

double ContourPolyline::enclosed_area() const {
  double area = 0.0;
  for (const auto& s : segments) {
    const Point& a = vertices[s[0]];
    const Point& b = vertices[s[1]];
    if (!closed[static_cast<std::size_t>(loop_of_vertex[s[0]])]) continue;
    area += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * area;
}

double ContourPolyline::length() const {
  double len = 0.0;
  for (const auto& s : segments) len += distance(vertices[s[0]], vertices[s[1]]);
  return len;
}

double distance_to_contour(const ContourPolyline& c, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  if (c.segments.empty()) {
    for (const Point& v : c.vertices) best = std::min(best, distance(p, v));
    return best;
  }
  for (const auto& s : c.segments)
    best = std::min(best, point_segment_distance(p, c.vertices[s[0]], c.vertices[s[1]]));
  return best;
}

double hausdorff_distance(const ContourPolyline& a, const ContourPolyline& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "hausdorff_distance needs nonempty contours");
  double h = 0.0;
  for (const Point& v : a.vertices) h = std::max(h, distance_to_contour(b, v));
  for (const Point& v : b.vertices) h = std::max(h, distance_to_contour(a, v));
  return h;
}

double equivalent_radius(const LevelSetField& phi, const ContourPolyline& contour) {
  const GridSpec& g = phi.grid();
  if (g.dim == 2) return std::sqrt(std::max(0.0, contour.enclosed_area()) / std::numbers::pi);
  const double eps = 1.5 * g.h;
  double vol = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) vol += smoothed_heaviside(-phi[i], eps);
  vol *= g.h * g.h * g.h;
  return std::cbrt(3.0 * vol / (4.0 * std::numbers::pi));
}

}  // namespace helebern
