#include "ma3d/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace ma3d {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("lattice dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
}

// Canonical ordering used for every generated stencil: shortest first,
// then lexicographically decreasing.
bool stencil_order(const LatticeVector& a, const LatticeVector& b) {
  if (a.norm2() != b.norm2()) return a.norm2() < b.norm2();
  return b < a;
}

}  // namespace

LatticeVector::LatticeVector(std::initializer_list<int> coords)
    : LatticeVector(std::span<const int>(coords.begin(), coords.size())) {}

LatticeVector::LatticeVector(std::span<const int> coords) {
  check_dim(static_cast<int>(coords.size()));
  dim_ = static_cast<int>(coords.size());
  std::copy(coords.begin(), coords.end(), c_.begin());
  if (std::all_of(coords.begin(), coords.end(), [](int x) { return x == 0; })) {
    throw std::invalid_argument("lattice vector must be non-zero");
  }
  if (!is_coprime(coords)) {
    throw std::invalid_argument("lattice vector coordinates must be co-prime");
  }
}

LatticeVector LatticeVector::operator-() const {
  LatticeVector r = *this;
  for (int i = 0; i < dim_; ++i) r.c_[i] = -c_[i];
  return r;
}

LatticeVector LatticeVector::canonical() const {
  LatticeVector neg = -*this;
  return (neg < *this) ? *this : neg;
}

long long LatticeVector::norm2() const {
  long long s = 0;
  for (int i = 0; i < dim_; ++i) s += static_cast<long long>(c_[i]) * c_[i];
  return s;
}

double LatticeVector::norm() const { return std::sqrt(static_cast<double>(norm2())); }

Eigen::Vector3d LatticeVector::to_vector3d() const {
  if (dim_ != 3) throw std::logic_error("to_vector3d requires d == 3");
  return {static_cast<double>(c_[0]), static_cast<double>(c_[1]), static_cast<double>(c_[2])};
}

std::strong_ordering operator<=>(const LatticeVector& a, const LatticeVector& b) {
  if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
  for (int i = 0; i < a.dim_; ++i) {
    if (auto c = a.c_[i] <=> b.c_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

long long dot(const LatticeVector& a, const LatticeVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch in dot");
  long long s = 0;
  for (int i = 0; i < a.dim(); ++i) s += static_cast<long long>(a[i]) * b[i];
  return s;
}

bool is_coprime(std::span<const int> coords) {
  int g = 0;
  for (int x : coords) g = std::gcd(g, x);
  return g == 1;
}

std::ostream& operator<<(std::ostream& os, const LatticeVector& e) {
  os << '(';
  for (int i = 0; i < e.dim(); ++i) os << (i ? "," : "") << e[i];
  return os << ')';
}

// ---------------------------------------------------------------------------

Stencil::Stencil(std::string label, std::vector<LatticeVector> directions)
    : label_(std::move(label)) {
  if (directions.empty()) throw std::invalid_argument("stencil must not be empty");
  dim_ = directions.front().dim();
  std::set<LatticeVector> seen;
  for (const auto& e : directions) {
    if (e.dim() != dim_) throw std::invalid_argument("stencil directions have mixed dimensions");
    auto c = e.canonical();
    if (!seen.insert(c).second) {
      std::ostringstream msg;
      msg << "duplicate stencil direction " << c << " (up to sign)";
      throw std::invalid_argument(msg.str());
    }
    dirs_.push_back(c);
  }
  Eigen::MatrixXd m(dim_, static_cast<Eigen::Index>(dirs_.size()));
  for (std::size_t k = 0; k < dirs_.size(); ++k) {
    for (int i = 0; i < dim_; ++i) m(i, static_cast<Eigen::Index>(k)) = dirs_[k][i];
  }
  if (Eigen::FullPivLU<Eigen::MatrixXd>(m).rank() < dim_) {
    throw std::invalid_argument("stencil '" + label_ + "' does not span R^" + std::to_string(dim_));
  }
  if (dim_ == 3) {
    real_.reserve(dirs_.size());
    for (const auto& e : dirs_) real_.push_back(e.to_vector3d());
  }
}

std::optional<std::size_t> Stencil::index_of(const LatticeVector& e) const {
  if (e.dim() != dim_) return std::nullopt;
  auto c = e.canonical();
  for (std::size_t k = 0; k < dirs_.size(); ++k) {
    if (dirs_[k] == c) return k;
  }
  return std::nullopt;
}

namespace {

// Closure of generators under coordinate permutations and sign changes,
// up to sign.
std::vector<LatticeVector> symmetric_closure(const std::vector<std::array<int, 3>>& gens) {
  std::set<LatticeVector> out;
  for (auto g : gens) {
    std::sort(g.begin(), g.end());
    do {
      for (int s = 0; s < 8; ++s) {
        std::array<int, 3> v{};
        for (int i = 0; i < 3; ++i) v[i] = (s >> i & 1) ? -g[i] : g[i];
        out.insert(LatticeVector(std::span<const int>(v)).canonical());
      }
    } while (std::next_permutation(g.begin(), g.end()));
  }
  std::vector<LatticeVector> dirs(out.begin(), out.end());
  std::sort(dirs.begin(), dirs.end(), stencil_order);
  return dirs;
}

}  // namespace

Stencil make_table1_stencil(Table1Stencil which) {
  std::vector<std::array<int, 3>> gens{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}};
  if (which == Table1Stencil::large) {
    gens.push_back({2, 1, 0});
    gens.push_back({2, 1, 1});
  }
  return Stencil(which == Table1Stencil::small ? "small" : "large", symmetric_closure(gens));
}

Stencil make_kappa_stencil(double kappa, int d) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("kappa must be >= 1");
  check_dim(d);
  const double bound2 = kappa * kappa * d;
  const int r = static_cast<int>(std::floor(std::sqrt(bound2) + 1e-9));
  std::vector<LatticeVector> dirs;
  std::vector<int> c(static_cast<std::size_t>(d), -r);
  while (true) {
    long long n2 = 0;
    for (int x : c) n2 += static_cast<long long>(x) * x;
    if (n2 > 0 && static_cast<double>(n2) <= bound2 * (1 + 1e-12) && is_coprime(c)) {
      LatticeVector e{std::span<const int>(c)};
      if (e.is_canonical()) dirs.push_back(e);
    }
    int i = 0;
    while (i < d && c[static_cast<std::size_t>(i)] == r) c[static_cast<std::size_t>(i++)] = -r;
    if (i == d) break;
    ++c[static_cast<std::size_t>(i)];
  }
  std::sort(dirs.begin(), dirs.end(), stencil_order);
  std::ostringstream label;
  label << "kappa:" << kappa;
  return Stencil(label.str(), std::move(dirs));
}

void write_stencil(std::ostream& os, const Stencil& stencil) {
  os << "stencil " << stencil.label() << '\n';
  for (const auto& e : stencil.directions()) {
    for (int i = 0; i < e.dim(); ++i) os << (i ? " " : "") << e[i];
    os << '\n';
  }
}

Stencil read_stencil(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("stencil", 0) != 0) {
    throw std::invalid_argument("stencil file must start with a 'stencil <label>' header");
  }
  std::string label = line.size() > 8 ? line.substr(8) : std::string("custom");
  std::vector<LatticeVector> dirs;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<int> c;
    int x = 0;
    while (ls >> x) c.push_back(x);
    if (!ls.eof()) throw std::invalid_argument("stencil file line " + std::to_string(lineno) + ": not an integer");
    if (c.empty()) continue;
    dirs.emplace_back(std::span<const int>(c));
  }
  return Stencil(label, std::move(dirs));
}

// ---------------------------------------------------------------------------

SymMatrix::SymMatrix(int dim) : dim_(dim) { check_dim(dim); }

std::size_t SymMatrix::slot(int dim, int i, int j) {
  if (i > j) std::swap(i, j);
  // rows 0..i-1 hold dim, dim-1, ... entries
  return static_cast<std::size_t>(i * dim - i * (i - 1) / 2 + (j - i));
}

SymMatrix SymMatrix::from_upper(std::span<const double> upper, int dim) {
  SymMatrix m(dim);
  if (upper.size() != static_cast<std::size_t>(dim * (dim + 1) / 2)) {
    throw std::invalid_argument("expected " + std::to_string(dim * (dim + 1) / 2) + " upper-triangle entries");
  }
  std::copy(upper.begin(), upper.end(), m.upper_.begin());
  return m;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols()) throw std::invalid_argument("matrix must be square");
  SymMatrix m(static_cast<int>(d.rows()));
  for (int i = 0; i < m.dim_; ++i) {
    for (int j = i; j < m.dim_; ++j) m.set(i, j, 0.5 * (d(i, j) + d(j, i)));
  }
  return m;
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(static_cast<int>(diag.size()));
  for (int i = 0; i < m.dim_; ++i) m.set(i, i, diag[static_cast<std::size_t>(i)]);
  return m;
}

double SymMatrix::operator()(int i, int j) const { return upper_[slot(dim_, i, j)]; }

void SymMatrix::set(int i, int j, double v) { upper_[slot(dim_, i, j)] = v; }

Eigen::MatrixXd SymMatrix::dense() const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  }
  return m;
}

Eigen::Matrix3d SymMatrix::dense3() const {
  if (dim_ != 3) throw std::logic_error("dense3 requires d == 3");
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = (*this)(i, j);
  }
  return m;
}

double SymMatrix::quad(const LatticeVector& e) const {
  if (e.dim() != dim_) throw std::invalid_argument("dimension mismatch in quad");
  double s = 0;
  for (int i = 0; i < dim_; ++i) {
    s += (*this)(i, i) * e[i] * e[i];
    for (int j = i + 1; j < dim_; ++j) s += 2.0 * (*this)(i, j) * e[i] * e[j];
  }
  return s;
}

double SymMatrix::quad(const Eigen::VectorXd& x) const { return x.dot(dense() * x); }

double SymMatrix::det() const { return dense().determinant(); }

Eigen::VectorXd SymMatrix::eigenvalues() const {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense(), Eigen::EigenvaluesOnly).eigenvalues();
}

bool SymMatrix::is_positive_definite() const {
  Eigen::LLT<Eigen::MatrixXd> llt(dense());
  return llt.info() == Eigen::Success && eigenvalues().minCoeff() > 0.0;
}

double SymMatrix::kappa() const {
  auto ev = eigenvalues();
  if (!(ev.minCoeff() > 0.0)) throw std::invalid_argument("kappa requires a positive definite matrix");
  return std::sqrt(ev.maxCoeff() / ev.minCoeff());
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (o.dim_ != dim_) throw std::invalid_argument("dimension mismatch");
  SymMatrix r = *this;
  for (std::size_t k = 0; k < upper_.size(); ++k) r.upper_[k] += o.upper_[k];
  return r;
}

SymMatrix SymMatrix::operator*(double s) const {
  SymMatrix r = *this;
  for (auto& v : r.upper_) v *= s;
  return r;
}

// ---------------------------------------------------------------------------

OrthogonalTripletSet::OrthogonalTripletSet(std::string label, std::vector<Triplet> triplets)
    : label_(std::move(label)) {
  std::set<Triplet> seen;
  for (auto t : triplets) {
    for (auto& e : t) {
      if (e.dim() != 3) throw std::invalid_argument("orthogonal triplets require d == 3");
      e = e.canonical();
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        if (dot(t[a], t[b]) != 0) throw std::invalid_argument("triplet members must be pairwise orthogonal");
      }
    }
    std::sort(t.begin(), t.end(), stencil_order);
    if (seen.insert(t).second) triplets_.push_back(t);
  }
  if (triplets_.empty()) throw std::invalid_argument("triplet set must not be empty");
}

Stencil OrthogonalTripletSet::stencil() const {
  std::set<LatticeVector> all;
  for (const auto& t : triplets_) all.insert(t.begin(), t.end());
  std::vector<LatticeVector> dirs(all.begin(), all.end());
  std::sort(dirs.begin(), dirs.end(), stencil_order);
  return Stencil("ws:" + label_, std::move(dirs));
}

OrthogonalTripletSet make_ws_triplets(int box_radius) {
  if (box_radius < 1 || box_radius > 3) throw std::invalid_argument("box radius must be 1, 2 or 3");
  const int r = box_radius;
  std::vector<LatticeVector> vs;
  for (int x = -r; x <= r; ++x) {
    for (int y = -r; y <= r; ++y) {
      for (int z = -r; z <= r; ++z) {
        std::array<int, 3> c{x, y, z};
        if ((x || y || z) && is_coprime(c)) {
          LatticeVector e{std::span<const int>(c)};
          if (e.is_canonical()) vs.push_back(e);
        }
      }
    }
  }
  std::sort(vs.begin(), vs.end(), stencil_order);
  std::vector<Triplet> out;
  for (std::size_t a = 0; a < vs.size(); ++a) {
    for (std::size_t b = a + 1; b < vs.size(); ++b) {
      if (dot(vs[a], vs[b]) != 0) continue;
      for (std::size_t c = b + 1; c < vs.size(); ++c) {
        if (dot(vs[a], vs[c]) == 0 && dot(vs[b], vs[c]) == 0) out.push_back({vs[a], vs[b], vs[c]});
      }
    }
  }
  static constexpr const char* names[] = {"", "small", "medium", "large"};
  return OrthogonalTripletSet(names[r], std::move(out));
}

}  // namespace ma3d
