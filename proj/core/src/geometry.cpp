#include "fbc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

namespace fbc {

namespace {

struct V3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

V3 to_v3(const RatePoint& p) { return {p.r0, p.r1, p.r2}; }
V3 operator-(const V3& a, const V3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
V3 operator+(const V3& a, const V3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
V3 operator*(double s, const V3& a) { return {s * a.x, s * a.y, s * a.z}; }
double dot(const V3& a, const V3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
V3 cross(const V3& a, const V3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double norm(const V3& a) { return std::sqrt(dot(a, a)); }

bool lex_less(const RatePoint& a, const RatePoint& b) {
  if (a.r0 != b.r0) return a.r0 < b.r0;
  if (a.r1 != b.r1) return a.r1 < b.r1;
  return a.r2 < b.r2;
}

double linf(const RatePoint& a, const RatePoint& b) {
  return std::max({std::abs(a.r0 - b.r0), std::abs(a.r1 - b.r1), std::abs(a.r2 - b.r2)});
}

double cross2(const std::array<double, 2>& o, const std::array<double, 2>& a,
              const std::array<double, 2>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain; returns indices of strictly convex vertices in
// counter-clockwise order starting from the lexicographically smallest point.
std::vector<std::size_t> hull2d(const std::vector<std::array<double, 2>>& pts) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a] < pts[b] || (pts[a] == pts[b] && a < b);
  });
  if (idx.size() < 3) return idx;
  constexpr double eps = 1e-14;
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i : idx) {
    while (k >= 2 && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lo = k + 1; t-- > 0;) {
    const std::size_t i = idx[t];
    while (k >= lo && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

struct Face {
  std::array<int, 3> v{};
  V3 n;
  double d = 0.0;
  bool alive = true;
  std::vector<int> outside;  // points strictly above this face, pending
};

// Quickhull over points known to span three dimensions. Returns the indices
// of extreme points.
std::vector<std::size_t> hull3d(const std::vector<V3>& pts, std::array<int, 4> seed) {
  constexpr double vis_eps = 1e-11;
  const auto n = static_cast<long long>(pts.size());
  std::vector<Face> faces;
  std::unordered_map<long long, int> edge_face;
  auto key = [n](int a, int b) { return static_cast<long long>(a) * n + b; };
  auto height = [&](int f, int p) { return dot(faces[f].n, pts[p]) - faces[f].d; };

  const V3 centroid = 0.25 * (pts[seed[0]] + pts[seed[1]] + pts[seed[2]] + pts[seed[3]]);
  auto add_face = [&](int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    V3 nn = cross(pts[b] - pts[a], pts[c] - pts[a]);
    const double len = norm(nn);
    f.n = len > 0.0 ? (1.0 / len) * nn : V3{};
    f.d = dot(f.n, pts[a]);
    const int id = static_cast<int>(faces.size());
    faces.push_back(std::move(f));
    edge_face[key(a, b)] = id;
    edge_face[key(b, c)] = id;
    edge_face[key(c, a)] = id;
    return id;
  };
  auto oriented = [&](int a, int b, int c) {
    const V3 nn = cross(pts[b] - pts[a], pts[c] - pts[a]);
    if (dot(nn, centroid - pts[a]) > 0.0) {
      add_face(a, c, b);
    } else {
      add_face(a, b, c);
    }
  };
  oriented(seed[0], seed[1], seed[2]);
  oriented(seed[0], seed[1], seed[3]);
  oriented(seed[0], seed[2], seed[3]);
  oriented(seed[1], seed[2], seed[3]);

  // Each pending point waits on the face it is highest above.
  auto assign = [&](int p, std::span<const int> candidates) {
    int best = -1;
    double top = vis_eps;
    for (int f : candidates) {
      const double h = height(f, p);
      if (h > top) top = h, best = f;
    }
    if (best >= 0) faces[best].outside.push_back(p);
  };
  const std::vector<int> first{0, 1, 2, 3};
  for (int i = 0; i < n; ++i) {
    if (std::find(seed.begin(), seed.end(), i) == seed.end()) assign(i, first);
  }

  std::vector<char> visible;
  std::vector<int> stack, region, fresh, orphans;
  std::vector<std::pair<int, int>> horizon;
  std::unordered_map<int, int> next;
  for (std::size_t cur = 0; cur < faces.size(); ++cur) {
    while (faces[cur].alive && !faces[cur].outside.empty()) {
      auto& out = faces[cur].outside;
      const auto far = std::max_element(out.begin(), out.end(), [&](int a, int b) {
        return height(static_cast<int>(cur), a) < height(static_cast<int>(cur), b);
      });
      const int eye = *far;
      out.erase(far);

      // Visible faces form a connected cap around the eye's face.
      visible.assign(faces.size(), 0);
      region.assign(1, static_cast<int>(cur));
      stack.assign(1, static_cast<int>(cur));
      visible[cur] = 1;
      while (!stack.empty()) {
        const int f = stack.back();
        stack.pop_back();
        for (int e = 0; e < 3; ++e) {
          const auto twin = edge_face.find(key(faces[f].v[(e + 1) % 3], faces[f].v[e]));
          if (twin == edge_face.end()) continue;
          const int g = twin->second;
          if (!visible[g] && height(g, eye) > vis_eps) {
            visible[g] = 1;
            region.push_back(g);
            stack.push_back(g);
          }
        }
      }
      horizon.clear();
      next.clear();
      for (int f : region) {
        for (int e = 0; e < 3; ++e) {
          const int a = faces[f].v[e];
          const int b = faces[f].v[(e + 1) % 3];
          const auto twin = edge_face.find(key(b, a));
          if (twin == edge_face.end() || !visible[twin->second]) {
            horizon.emplace_back(a, b);
            next[a] = b;
          }
        }
      }
      // The cap must be a disk: its boundary one simple cycle. Otherwise the
      // eye sits within rounding of the hull and is dropped.
      bool simple = next.size() == horizon.size() && !horizon.empty();
      if (simple) {
        std::size_t steps = 0;
        int v = horizon.front().first;
        do {
          const auto it = next.find(v);
          if (it == next.end()) break;
          v = it->second;
          ++steps;
        } while (v != horizon.front().first && steps <= horizon.size());
        simple = v == horizon.front().first && steps == horizon.size();
      }
      if (!simple) continue;

      orphans.clear();
      for (int f : region) {
        faces[f].alive = false;
        orphans.insert(orphans.end(), faces[f].outside.begin(), faces[f].outside.end());
        faces[f].outside.clear();
        for (int e = 0; e < 3; ++e) edge_face.erase(key(faces[f].v[e], faces[f].v[(e + 1) % 3]));
      }
      fresh.clear();
      for (const auto& [a, b] : horizon) fresh.push_back(add_face(a, b, eye));
      for (int p : orphans) assign(p, fresh);
    }
  }

  // A hull vertex is extreme iff the sum of its incident face normals
  // strictly separates it from every other hull vertex.
  std::vector<V3> normal_sum(pts.size());
  std::vector<char> on_hull(pts.size(), 0);
  for (const Face& f : faces) {
    if (!f.alive) continue;
    for (int v : f.v) {
      normal_sum[v] = normal_sum[v] + f.n;
      on_hull[v] = 1;
    }
  }
  std::vector<std::size_t> hv;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (on_hull[i]) hv.push_back(i);
  }
  std::vector<std::size_t> extreme;
  for (std::size_t i : hv) {
    const V3& w = normal_sum[i];
    const double wn = norm(w);
    if (wn == 0.0) continue;
    const double own = dot(w, pts[i]);
    bool strict = true;
    for (std::size_t j : hv) {
      if (j != i && dot(w, pts[j]) >= own - 1e-13 * wn) {
        strict = false;
        break;
      }
    }
    if (strict) extreme.push_back(i);
  }
  return extreme;
}

// Extreme points of a finite set of distinct points, whatever its affine dimension.
std::vector<std::size_t> extreme_points(const std::vector<RatePoint>& rp) {
  if (rp.size() <= 1) return std::vector<std::size_t>(rp.size(), 0);
  std::vector<V3> pts;
  pts.reserve(rp.size());
  for (const auto& p : rp) pts.push_back(to_v3(p));

  constexpr double eps = 1e-9;
  const V3 p0 = pts[0];
  std::size_t i1 = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = norm(pts[i] - p0);
    if (d > best) best = d, i1 = i;
  }
  if (best <= eps) return {0};
  const V3 u = (1.0 / best) * (pts[i1] - p0);

  std::size_t i2 = 0;
  best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const V3 r = pts[i] - p0;
    const double d = norm(r - dot(r, u) * u);
    if (d > best) best = d, i2 = i;
  }
  if (best <= eps) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double t = dot(pts[i] - p0, u);
      if (t < dot(pts[lo] - p0, u)) lo = i;
      if (t > dot(pts[hi] - p0, u)) hi = i;
    }
    std::vector<std::size_t> out{lo, hi};
    std::sort(out.begin(), out.end());
    return out;
  }
  const V3 r2 = pts[i2] - p0;
  const V3 v = (1.0 / best) * (r2 - dot(r2, u) * u);
  V3 nrm = cross(u, v);
  nrm = (1.0 / norm(nrm)) * nrm;

  std::size_t i3 = 0;
  best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = std::abs(dot(pts[i] - p0, nrm));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) {
    std::vector<std::array<double, 2>> flat;
    flat.reserve(pts.size());
    for (const auto& p : pts) flat.push_back({dot(p - p0, u), dot(p - p0, v)});
    auto out = hull2d(flat);
    std::sort(out.begin(), out.end());
    return out;
  }
  auto out = hull3d(pts, {0, static_cast<int>(i1), static_cast<int>(i2), static_cast<int>(i3)});
  std::sort(out.begin(), out.end());
  return out;
}

std::string fixed9(double x) {
  if (std::abs(x) < 5e-10) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

}  // namespace

std::vector<RatePoint> polytope_vertices(const RatePolytope& poly) {
  struct Plane {
    std::array<double, 3> a;
    double b;
  };
  std::vector<Plane> planes;
  for (const auto& c : poly.constraints) {
    planes.push_back({{double(c.coeff[0]), double(c.coeff[1]), double(c.coeff[2])}, c.rhs});
  }
  planes.push_back({{1, 0, 0}, 0});
  planes.push_back({{0, 1, 0}, 0});
  planes.push_back({{0, 0, 1}, 0});

  auto feasible = [&](const RatePoint& x) {
    if (x.r0 < -kGeomTol || x.r1 < -kGeomTol || x.r2 < -kGeomTol) return false;
    for (const auto& c : poly.constraints) {
      if (c.coeff[0] * x.r0 + c.coeff[1] * x.r1 + c.coeff[2] * x.r2 > c.rhs + kGeomTol) {
        return false;
      }
    }
    return true;
  };

  std::vector<RatePoint> found;
  const std::size_t m = planes.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        const auto& A = planes[i].a;
        const auto& B = planes[j].a;
        const auto& C = planes[k].a;
        const double det = A[0] * (B[1] * C[2] - B[2] * C[1]) - A[1] * (B[0] * C[2] - B[2] * C[0]) +
                           A[2] * (B[0] * C[1] - B[1] * C[0]);
        if (std::abs(det) < 1e-12) continue;
        const double bi = planes[i].b, bj = planes[j].b, bk = planes[k].b;
        // Cramer's rule
        const double x0 = (bi * (B[1] * C[2] - B[2] * C[1]) - A[1] * (bj * C[2] - B[2] * bk) +
                           A[2] * (bj * C[1] - B[1] * bk)) /
                          det;
        const double x1 = (A[0] * (bj * C[2] - B[2] * bk) - bi * (B[0] * C[2] - B[2] * C[0]) +
                           A[2] * (B[0] * bk - bj * C[0])) /
                          det;
        const double x2 = (A[0] * (B[1] * bk - bj * C[1]) - A[1] * (B[0] * bk - bj * C[0]) +
                           bi * (B[0] * C[1] - B[1] * C[0])) /
                          det;
        RatePoint x{x0, x1, x2};
        if (!feasible(x)) continue;
        x = {std::max(0.0, x.r0) + 0.0, std::max(0.0, x.r1) + 0.0, std::max(0.0, x.r2) + 0.0};
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const RatePoint& y) { return linf(x, y) <= kGeomTol; });
        if (!dup) found.push_back(x);
      }
    }
  }
  if (found.empty()) found.push_back({});
  std::sort(found.begin(), found.end(), lex_less);
  return found;
}

RatePoint staircase_argmax(double a, double b, double c, const Weight& w) {
  const double tmax = std::max(0.0, std::min({a, b, c}));
  const double kink = a + b - c;
  std::array<double, 3> ts{0.0, tmax, std::clamp(kink, 0.0, tmax)};

  RatePoint best{};
  double best_val = -std::numeric_limits<double>::infinity();
  auto consider = [&](double t, double x, double y) {
    const RatePoint p{t, std::max(0.0, x), std::max(0.0, y)};
    const double v = dot(w, p);
    if (v > best_val) best_val = v, best = p;
  };
  for (double t : ts) {
    const double A = a - t, B = b - t, C = c - t;
    consider(t, 0.0, 0.0);
    consider(t, std::min(A, C), 0.0);
    consider(t, 0.0, std::min(B, C));
    if (A + B <= C) {
      consider(t, A, B);
    } else {
      if (A <= C) consider(t, A, C - A);
      if (B <= C) consider(t, C - B, B);
    }
  }
  return best;
}

double support(std::span<const RatePoint> points, const Weight& w) {
  if (points.empty()) throw Error(ErrorKind::EmptyRegion, "support of an empty region");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) best = std::max(best, dot(w, p));
  return best;
}

double support(const RateRegion& region, const Weight& w) { return support(region.vertices, w); }

std::vector<RatePoint> transfer_closure(std::span<const RatePoint> points) {
  std::vector<RatePoint> out(points.begin(), points.end());
  for (const auto& p : points) {
    if (p.r0 > 0.0) {
      out.push_back({0.0, p.r1 + p.r0, p.r2});
      out.push_back({0.0, p.r1, p.r2 + p.r0});
    }
  }
  return out;
}

RateRegion hull(std::span<const RatePoint> points, std::span<const std::size_t> tags) {
  struct Tagged {
    RatePoint p;
    std::size_t tag;
  };
  std::vector<Tagged> all;
  all.reserve(points.size() * 8);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const RatePoint& p = points[i];
    const std::size_t tag = tags.empty() ? i : tags[i];
    for (int mask = 0; mask < 8; ++mask) {
      all.push_back({{(mask & 1) ? 0.0 : std::max(0.0, p.r0) + 0.0,
                      (mask & 2) ? 0.0 : std::max(0.0, p.r1) + 0.0,
                      (mask & 4) ? 0.0 : std::max(0.0, p.r2) + 0.0},
                     tag});
    }
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    if (a.p == b.p) return a.tag < b.tag;
    return lex_less(a.p, b.p);
  });

  // Merging is kept far below kGeomTol: the survivor of a merge may sit
  // below the dropped point by up to the merge radius.
  constexpr double merge = 1e-12;
  std::vector<RatePoint> uniq;
  std::vector<std::size_t> utags;
  for (const auto& t : all) {
    bool dup = false;
    for (std::size_t j = uniq.size(); j-- > 0;) {
      if (uniq[j].r0 < t.p.r0 - merge) break;
      if (linf(uniq[j], t.p) <= merge) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      uniq.push_back(t.p);
      utags.push_back(t.tag);
    }
  }

  RateRegion region;
  for (std::size_t i : extreme_points(uniq)) {
    region.vertices.push_back(uniq[i]);
    region.generators.push_back(utags[i]);
  }
  return region;
}

ContainmentReport contains(const RateRegion& outer, const RateRegion& inner,
                           std::span<const Weight> directions, double tol) {
  ContainmentReport rep;
  rep.worst_gap = -std::numeric_limits<double>::infinity();
  for (const auto& w : directions) {
    const double gap = support(inner, w) - support(outer, w);
    if (gap > rep.worst_gap) {
      rep.worst_gap = gap;
      rep.worst_dir = w;
    }
  }
  rep.ok = rep.worst_gap <= tol;
  return rep;
}

std::vector<Weight> octant_directions(std::size_t n) {
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<Weight> dirs;
  dirs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double r = std::sqrt(1.0 - z * z);
    double frac = std::fmod(static_cast<double>(i) * golden, 1.0);
    // keep strictly inside the octant
    frac = 0.02 + 0.96 * frac;
    const double theta = frac * std::numbers::pi / 2.0;
    dirs.push_back({z, r * std::cos(theta), r * std::sin(theta)});
  }
  return dirs;
}

std::vector<std::array<double, 2>> slice_at_r0(const RateRegion& region, double r0) {
  if (region.vertices.empty()) throw Error(ErrorKind::EmptyRegion, "cannot slice an empty region");
  double top = 0.0;
  for (const auto& v : region.vertices) top = std::max(top, v.r0);
  if (r0 < 0.0 || r0 > top + 1e-12) {
    throw Error(ErrorKind::SliceOutOfRange, "R0 slice " + std::to_string(r0) +
                                                " outside [0, " + std::to_string(top) + "]");
  }
  std::vector<std::array<double, 2>> cut;
  const auto& vs = region.vertices;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double di = vs[i].r0 - r0;
    if (std::abs(di) <= 1e-12) cut.push_back({vs[i].r1, vs[i].r2});
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      const double dj = vs[j].r0 - r0;
      if ((di < -1e-12 && dj > 1e-12) || (di > 1e-12 && dj < -1e-12)) {
        const double t = di / (di - dj);
        cut.push_back({vs[i].r1 + t * (vs[j].r1 - vs[i].r1), vs[i].r2 + t * (vs[j].r2 - vs[i].r2)});
      }
    }
  }
  std::vector<std::array<double, 2>> poly;
  for (std::size_t i : hull2d(cut)) poly.push_back(cut[i]);
  return poly;
}

void write_region_csv(const RateRegion& region, std::ostream& os) {
  for (const auto& v : region.vertices) {
    os << fixed9(v.r0) << ',' << fixed9(v.r1) << ',' << fixed9(v.r2) << '\n';
  }
}

void write_region_svg(const RateRegion& region, double r0, std::ostream& os) {
  const auto poly = slice_at_r0(region, r0);
  double xmax = 0.0, ymax = 0.0;
  for (const auto& p : poly) {
    xmax = std::max(xmax, p[0]);
    ymax = std::max(ymax, p[1]);
  }
  if (xmax <= 0.0) xmax = 1.0;
  if (ymax <= 0.0) ymax = 1.0;

  constexpr double size = 480.0, margin = 64.0;
  const double sx = (size - 2 * margin) / xmax;
  const double sy = (size - 2 * margin) / ymax;
  auto num = [](double v) { return fixed9(v); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
        "viewBox=\"0 0 480 480\">\n";
  os << "  <title>(R1, R2) slice at R0 = " << num(r0) << " bits</title>\n";
  os << "  <rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  os << "  <line x1=\"64\" y1=\"416\" x2=\"432\" y2=\"416\" stroke=\"black\"/>\n";
  os << "  <line x1=\"64\" y1=\"416\" x2=\"64\" y2=\"48\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = margin + k * (size - 2 * margin) / 4.0;
    const double fy = size - margin - k * (size - 2 * margin) / 4.0;
    os << "  <text x=\"" << fx << "\" y=\"436\" font-size=\"11\" text-anchor=\"middle\">"
       << num(xmax * k / 4.0).substr(0, 6) << "</text>\n";
    os << "  <text x=\"58\" y=\"" << fy + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
       << num(ymax * k / 4.0).substr(0, 6) << "</text>\n";
  }
  os << "  <text x=\"248\" y=\"468\" font-size=\"13\" text-anchor=\"middle\">R1 (bits)</text>\n";
  os << "  <text x=\"16\" y=\"232\" font-size=\"13\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 16 232)\">R2 (bits)</text>\n";
  os << "  <g transform=\"translate(64 416) scale(" << num(sx) << ' ' << num(-sy) << ")\">\n";
  os << "    <polyline fill=\"#cfe3f7\" stroke=\"#1f5fa8\" stroke-width=\"2\" "
        "vector-effect=\"non-scaling-stroke\" points=\"";
  for (std::size_t i = 0; i <= poly.size(); ++i) {
    const auto& p = poly[i % poly.size()];
    if (i) os << ' ';
    os << num(p[0]) << ',' << num(p[1]);
  }
  os << "\"/>\n  </g>\n</svg>\n";
}

}  // namespace fbc
