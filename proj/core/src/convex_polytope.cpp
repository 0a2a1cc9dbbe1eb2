#include "ma3d/convex_polytope.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <utility>

#include <Eigen/Geometry>

namespace ma3d {

ConvexPolytope ConvexPolytope::box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  ConvexPolytope p;
  for (int k = 0; k < 8; ++k) {
    p.verts_.emplace_back(k & 1 ? hi.x() : lo.x(), k & 2 ? hi.y() : lo.y(), k & 4 ? hi.z() : lo.z());
  }
  p.faces_ = {
      {{0, 2, 6, 4}, kBoxTag}, {{1, 5, 7, 3}, kBoxTag},  // x
      {{0, 4, 5, 1}, kBoxTag}, {{2, 3, 7, 6}, kBoxTag},  // y
      {{0, 1, 3, 2}, kBoxTag}, {{4, 6, 7, 5}, kBoxTag},  // z
  };
  return p;
}

bool ConvexPolytope::clip(const Halfspace& h) {
  if (empty()) return false;

  double extent = 0.0;
  for (const auto& v : verts_) extent = std::max(extent, v.norm());
  const double eps = 1e-12 * (h.normal.norm() * extent + std::abs(h.offset));

  std::vector<double> dist(verts_.size());
  double dmax = -INFINITY;
  double dmin = INFINITY;
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    dist[i] = h.normal.dot(verts_[i]) - h.offset;
    dmax = std::max(dmax, dist[i]);
    dmin = std::min(dmin, dist[i]);
  }
  if (dmax <= eps) return true;
  if (dmin >= -eps) {
    verts_.clear();
    faces_.clear();
    return false;
  }

  // A face already lying in the cutting plane makes the cap redundant.
  bool coplanar_face = false;
  for (const auto& f : faces_) {
    if (std::all_of(f.loop.begin(), f.loop.end(), [&](int i) { return std::abs(dist[i]) <= eps; })) {
      coplanar_face = true;
    }
  }

  std::map<std::pair<int, int>, int> cut_vertex;
  auto cut = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = cut_vertex.find(key);
    if (it != cut_vertex.end()) return it->second;
    const double t = dist[a] / (dist[a] - dist[b]);
    verts_.push_back(verts_[a] + t * (verts_[b] - verts_[a]));
    dist.push_back(0.0);
    const int idx = static_cast<int>(verts_.size()) - 1;
    cut_vertex.emplace(key, idx);
    return idx;
  };

  std::vector<Face> kept;
  kept.reserve(faces_.size() + 1);
  std::vector<int> on_plane;
  for (const auto& f : faces_) {
    Face nf{{}, f.tag};
    const std::size_t m = f.loop.size();
    for (std::size_t i = 0; i < m; ++i) {
      const int a = f.loop[i];
      const int b = f.loop[(i + 1) % m];
      if (dist[a] <= eps) nf.loop.push_back(a);
      if ((dist[a] < -eps && dist[b] > eps) || (dist[a] > eps && dist[b] < -eps)) {
        nf.loop.push_back(cut(a, b));
      }
    }
    if (nf.loop.size() >= 3) {
      for (int i : nf.loop) {
        if (std::abs(dist[i]) <= eps) on_plane.push_back(i);
      }
      kept.push_back(std::move(nf));
    }
  }
  faces_ = std::move(kept);

  std::sort(on_plane.begin(), on_plane.end());
  on_plane.erase(std::unique(on_plane.begin(), on_plane.end()), on_plane.end());
  if (!coplanar_face && on_plane.size() >= 3) {
    Eigen::Vector3d centre = Eigen::Vector3d::Zero();
    for (int i : on_plane) centre += verts_[i];
    centre /= static_cast<double>(on_plane.size());
    const Eigen::Vector3d n = h.normal.normalized();
    Eigen::Vector3d u = n.unitOrthogonal();
    Eigen::Vector3d w = n.cross(u);
    std::vector<std::pair<double, int>> ring;
    for (int i : on_plane) {
      const Eigen::Vector3d r = verts_[i] - centre;
      ring.emplace_back(std::atan2(r.dot(w), r.dot(u)), i);
    }
    std::sort(ring.begin(), ring.end());
    Face cap{{}, h.tag};
    for (const auto& [angle, i] : ring) cap.loop.push_back(i);
    faces_.push_back(std::move(cap));
  }

  if (faces_.size() < 4) {
    verts_.clear();
    faces_.clear();
    return false;
  }
  compact();
  return true;
}

void ConvexPolytope::compact() {
  std::vector<int> remap(verts_.size(), -1);
  std::vector<Eigen::Vector3d> nv;
  nv.reserve(verts_.size());
  for (auto& f : faces_) {
    for (int& i : f.loop) {
      if (remap[i] < 0) {
        remap[i] = static_cast<int>(nv.size());
        nv.push_back(verts_[i]);
      }
      i = remap[i];
    }
  }
  verts_ = std::move(nv);
}

double ConvexPolytope::face_area(const Face& f) const {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  const auto& v0 = verts_[f.loop[0]];
  for (std::size_t i = 1; i + 1 < f.loop.size(); ++i) {
    a += (verts_[f.loop[i]] - v0).cross(verts_[f.loop[i + 1]] - v0);
  }
  return 0.5 * a.norm();
}

double ConvexPolytope::volume() const {
  if (empty()) return 0.0;
  Eigen::Vector3d ref = Eigen::Vector3d::Zero();
  for (const auto& v : verts_) ref += v;
  ref /= static_cast<double>(verts_.size());
  double vol = 0.0;
  for (const auto& f : faces_) {
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    const auto& v0 = verts_[f.loop[0]];
    for (std::size_t i = 1; i + 1 < f.loop.size(); ++i) {
      a += (verts_[f.loop[i]] - v0).cross(verts_[f.loop[i + 1]] - v0);
    }
    vol += std::abs(a.dot(v0 - ref)) / 6.0;
  }
  return vol;
}

std::vector<double> ConvexPolytope::facet_areas(int ntags) const {
  std::vector<double> out(static_cast<std::size_t>(std::max(ntags, 0)), 0.0);
  for (const auto& f : faces_) {
    if (f.tag >= 0 && f.tag < ntags) out[static_cast<std::size_t>(f.tag)] += face_area(f);
  }
  return out;
}

bool ConvexPolytope::has_tag(int tag) const {
  return std::any_of(faces_.begin(), faces_.end(), [tag](const Face& f) { return f.tag == tag; });
}

void ConvexPolytope::write_off(std::ostream& os) const {
  os << "OFF\n" << verts_.size() << ' ' << faces_.size() << " 0\n";
  for (const auto& v : verts_) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : faces_) {
    os << f.loop.size();
    for (int i : f.loop) os << ' ' << i;
    os << '\n';
  }
}

}  // namespace ma3d
