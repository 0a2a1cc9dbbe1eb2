#pragma once

// Bounded convex polyhedra in R^3 built by successive halfspace clipping
// of a box. Faces carry the tag of the halfspace that created them, so
// facet measures can be read back per constraint.

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ma3d {

/// { g : <normal, g> <= offset }
struct Halfspace {
  Eigen::Vector3d normal;
  double offset = 0.0;
  int tag = -1;
};

class ConvexPolytope {
 public:
  static constexpr int kBoxTag = -1;

  static ConvexPolytope box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);

  /// Intersects with h. Coplanarity decisions use a relative tolerance of
  /// 1e-12 times the current extent. Returns false once the polytope has
  /// no interior left.
  bool clip(const Halfspace& h);

  bool empty() const { return faces_.empty(); }
  double volume() const;

  /// Area of the faces tagged t, summed per tag, for tags in [0, ntags).
  std::vector<double> facet_areas(int ntags) const;
  bool has_tag(int tag) const;

  const std::vector<Eigen::Vector3d>& vertices() const { return verts_; }
  std::size_t face_count() const { return faces_.size(); }

  /// Object File Format dump (vertices and face loops).
  void write_off(std::ostream& os) const;

 private:
  struct Face {
    std::vector<int> loop;
    int tag;
  };

  double face_area(const Face& f) const;
  void compact();

  std::vector<Eigen::Vector3d> verts_;
  std::vector<Face> faces_;
};

}  // namespace ma3d
