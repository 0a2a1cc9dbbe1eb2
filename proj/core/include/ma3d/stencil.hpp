#pragma once

// Integer lattice directions, stencils of such directions, symmetric
// matrices, and the stencil generators used by the schemes.

#include <array>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ma3d {

inline constexpr int kMaxDim = 4;

/// Non-zero integer vector with co-prime coordinates, d <= kMaxDim.
class LatticeVector {
 public:
  LatticeVector() = default;
  LatticeVector(std::initializer_list<int> coords);
  explicit LatticeVector(std::span<const int> coords);

  int dim() const { return dim_; }
  int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::span<const int> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  LatticeVector operator-() const;

  /// Lexicographically larger of {e, -e}.
  LatticeVector canonical() const;
  bool is_canonical() const { return *this == canonical(); }

  long long norm2() const;
  double norm() const;
  Eigen::Vector3d to_vector3d() const;

  friend bool operator==(const LatticeVector&, const LatticeVector&) = default;
  friend std::strong_ordering operator<=>(const LatticeVector& a, const LatticeVector& b);

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

long long dot(const LatticeVector& a, const LatticeVector& b);
bool is_coprime(std::span<const int> coords);
std::ostream& operator<<(std::ostream& os, const LatticeVector& e);

/// Finite set of lattice directions, stored up to sign as canonical
/// representatives; the symmetric closure {+-e} must span R^d.
class Stencil {
 public:
  Stencil(std::string label, std::vector<LatticeVector> directions);

  const std::string& label() const { return label_; }
  int dim() const { return dim_; }
  std::size_t size() const { return dirs_.size(); }
  const std::vector<LatticeVector>& directions() const { return dirs_; }
  const LatticeVector& operator[](std::size_t k) const { return dirs_[k]; }

  /// Index of e or -e in the stencil.
  std::optional<std::size_t> index_of(const LatticeVector& e) const;
  bool contains(const LatticeVector& e) const { return index_of(e).has_value(); }

  /// Directions as real 3-vectors (d == 3 only).
  const std::vector<Eigen::Vector3d>& real_directions() const { return real_; }

 private:
  std::string label_;
  int dim_ = 0;
  std::vector<LatticeVector> dirs_;
  std::vector<Eigen::Vector3d> real_;
};

enum class Table1Stencil { small, large };

Stencil make_table1_stencil(Table1Stencil which);
Stencil make_kappa_stencil(double kappa, int d);

/// Line-based text format: a header line "stencil <label>", then one
/// direction per line as space separated integers.
void write_stencil(std::ostream& os, const Stencil& stencil);
Stencil read_stencil(std::istream& is);

/// Symmetric d x d matrix, upper triangle stored row by row.
class SymMatrix {
 public:
  explicit SymMatrix(int dim = 3);
  /// Upper triangle entries m11 m12 .. m1d m22 .. mdd.
  static SymMatrix from_upper(std::span<const double> upper, int dim = 3);
  static SymMatrix from_dense(const Eigen::MatrixXd& m);
  static SymMatrix identity(int dim = 3);
  static SymMatrix diagonal(std::span<const double> diag);

  int dim() const { return dim_; }
  double operator()(int i, int j) const;
  void set(int i, int j, double v);

  Eigen::MatrixXd dense() const;
  Eigen::Matrix3d dense3() const;
  /// <e, M e>
  double quad(const LatticeVector& e) const;
  double quad(const Eigen::VectorXd& x) const;

  double det() const;
  Eigen::VectorXd eigenvalues() const;
  bool is_positive_definite() const;
  /// sqrt(||M|| ||M^-1||), requires M positive definite.
  double kappa() const;

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  static std::size_t slot(int dim, int i, int j);
  int dim_;
  std::array<double, kMaxDim * (kMaxDim + 1) / 2> upper_{};
};

using Triplet = std::array<LatticeVector, 3>;

/// Orthogonal triplets of lattice directions for the wide stencil scheme.
/// Members are canonical and each triplet is sorted, which deduplicates
/// up to reordering and sign flips.
class OrthogonalTripletSet {
 public:
  OrthogonalTripletSet(std::string label, std::vector<Triplet> triplets);

  const std::string& label() const { return label_; }
  std::size_t size() const { return triplets_.size(); }
  const std::vector<Triplet>& triplets() const { return triplets_; }

  /// Union of the triplet members, as a stencil.
  Stencil stencil() const;

 private:
  std::string label_;
  std::vector<Triplet> triplets_;
};

/// All orthogonal co-prime triplets inside {-r..r}^3, r in {1,2,3}.
OrthogonalTripletSet make_ws_triplets(int box_radius);

}  // namespace ma3d
