#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twsm {

using cplx = std::complex<double>;
using Dense = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr cplx kI{0.0, 1.0};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense complex matrix with finite entries. Immutable once built.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(Eigen::Index rows, Eigen::Index cols) : m_(Dense::Zero(rows, cols)) {}

  explicit ComplexMatrix(Dense m) : m_(std::move(m)) {
    if (!m_.allFinite()) throw std::domain_error("ComplexMatrix: non-finite entry");
  }

  /// Arithmetic results of finite operands skip the entry scan.
  struct Unchecked {};
  ComplexMatrix(Dense m, Unchecked) : m_(std::move(m)) {}

  /// Row-major construction.
  static ComplexMatrix from_rows(Eigen::Index rows, Eigen::Index cols,
                                 const std::vector<cplx>& entries) {
    if (static_cast<Eigen::Index>(entries.size()) != rows * cols)
      throw ShapeError("ComplexMatrix: entry count does not match shape");
    Dense m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = entries[i * cols + j];
    return ComplexMatrix(std::move(m));
  }

  static ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix(Dense::Identity(n, n)); }
  static ComplexMatrix zero(Eigen::Index r, Eigen::Index c) { return ComplexMatrix(r, c); }
  static ComplexMatrix scalar(cplx v) {
    Dense m(1, 1);
    m(0, 0) = v;
    return ComplexMatrix(std::move(m));
  }
  static ComplexMatrix diag(const std::vector<cplx>& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Dense m = Dense::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = d[i];
    return ComplexMatrix(std::move(m));
  }

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  bool square() const { return m_.rows() == m_.cols(); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Dense& dense() const { return m_; }

  /// Row-major copy of the entries.
  std::vector<cplx> entries() const {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(rows() * cols()));
    for (Eigen::Index i = 0; i < rows(); ++i)
      for (Eigen::Index j = 0; j < cols(); ++j) out.push_back(m_(i, j));
    return out;
  }

  ComplexMatrix adjoint() const { return {Dense(m_.adjoint()), Unchecked{}}; }
  ComplexMatrix conjugate() const { return {Dense(m_.conjugate()), Unchecked{}}; }
  ComplexMatrix transpose() const { return {Dense(m_.transpose()), Unchecked{}}; }
  double norm() const { return m_.norm(); }
  cplx trace() const { return m_.trace(); }

  ComplexMatrix block(Eigen::Index i, Eigen::Index j, Eigen::Index r, Eigen::Index c) const {
    return {Dense(m_.block(i, j, r, c)), Unchecked{}};
  }

  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same(a, b, "operator+");
    return {Dense(a.m_ + b.m_), Unchecked{}};
  }
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same(a, b, "operator-");
    return {Dense(a.m_ - b.m_), Unchecked{}};
  }
  friend ComplexMatrix operator-(const ComplexMatrix& a) { return {Dense(-a.m_), Unchecked{}}; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("operator*: inner dimensions differ");
    if (tiled(a) && tiled(b)) return {tiled_product(a.m_, b.m_), Unchecked{}};
    Dense p(a.rows(), b.cols());
    p.noalias() = a.m_ * b.m_;
    return {std::move(p), Unchecked{}};
  }
  friend ComplexMatrix operator*(cplx s, const ComplexMatrix& a) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw std::domain_error("operator*: non-finite scalar");
    return {Dense(s * a.m_), Unchecked{}};
  }
  friend ComplexMatrix operator*(const ComplexMatrix& a, cplx s) { return s * a; }

  static void check_same(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
      throw ShapeError(std::string(what) + ": shape mismatch");
  }

 private:
  // Operators on the 128-dimensional space are mostly block-sparse; products
  // skip all-zero 16x16 tiles.
  static constexpr Eigen::Index kTile = 16;
  using Tile = Eigen::Matrix<cplx, kTile, kTile>;

  static bool tiled(const ComplexMatrix& x) {
    return x.rows() >= 4 * kTile && x.cols() >= 4 * kTile && x.rows() % kTile == 0 && x.cols() % kTile == 0;
  }

  static std::vector<char> tile_mask(const Dense& x) {
    const auto r = x.rows() / kTile, c = x.cols() / kTile;
    std::vector<char> mask(static_cast<std::size_t>(r * c), 0);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (x(i, j) != cplx(0)) mask[static_cast<std::size_t>((i / kTile) * c + j / kTile)] = 1;
    return mask;
  }

  static Dense tiled_product(const Dense& a, const Dense& b) {
    const auto ma = tile_mask(a), mb = tile_mask(b);
    const auto R = a.rows() / kTile, K = a.cols() / kTile, C = b.cols() / kTile;
    Dense p = Dense::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < R; ++i)
      for (Eigen::Index j = 0; j < C; ++j) {
        Tile acc = Tile::Zero();
        bool any = false;
        for (Eigen::Index k = 0; k < K; ++k)
          if (ma[static_cast<std::size_t>(i * K + k)] && mb[static_cast<std::size_t>(k * C + j)]) {
            acc.noalias() += Tile(a.block<kTile, kTile>(i * kTile, k * kTile)) *
                             Tile(b.block<kTile, kTile>(k * kTile, j * kTile));
            any = true;
          }
        if (any) p.block<kTile, kTile>(i * kTile, j * kTile) = acc;
      }
    return p;
  }

  Dense m_;
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  Dense out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j) out.block(i * br, j * bc, br, bc) = a(i, j) * b.dense();
  return ComplexMatrix(std::move(out));
}

/// D a - rho(a) D
inline ComplexMatrix twisted_commutator(const ComplexMatrix& d, const ComplexMatrix& a,
                                        const ComplexMatrix& rho_a) {
  if (!d.square() || !a.square() || !rho_a.square() || d.rows() != a.rows() ||
      d.rows() != rho_a.rows())
    throw ShapeError("twisted_commutator: operands must be square of equal dimension");
  return d * a - rho_a * d;
}

/// ||A-B||_F / max(1, ||A||_F, ||B||_F)
inline double rel_residual(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("rel_residual: shape mismatch");
  const double scale = std::max({1.0, a.norm(), b.norm()});
  return (a.dense() - b.dense()).norm() / scale;
}

// ---------------------------------------------------------------------------
// Basis layout of the 128-dimensional pointwise Hilbert space.

enum class Factor : int { C = 0, s = 1, sd = 2, I = 3, alpha = 4 };

struct BasisLayout {
  static constexpr int kFactors = 5;
  static constexpr std::array<int, kFactors> sizes{2, 2, 2, 4, 4};
  static constexpr std::array<int, kFactors> strides{64, 32, 16, 4, 1};
  static constexpr int dim = 128;

  using Index = std::array<int, kFactors>;

  static constexpr int flat(int c, int s, int sd, int i, int a) {
    return a + 4 * i + 16 * sd + 32 * s + 64 * c;
  }
  static constexpr int flat(const Index& x) { return flat(x[0], x[1], x[2], x[3], x[4]); }

  static constexpr Index unflat(int k) {
    Index x{};
    for (int f = 0; f < kFactors; ++f) {
      x[f] = (k / strides[f]) % sizes[f];
    }
    return x;
  }

  static constexpr int size(Factor f) { return sizes[static_cast<int>(f)]; }
};

// alpha slots: dotted (right-handed) first, then undotted.
inline constexpr int kDot1 = 0;
inline constexpr int kDot2 = 1;
inline constexpr int kUndot1 = 2;
inline constexpr int kUndot2 = 3;
inline constexpr int kRight = 0;
inline constexpr int kLeft = 1;

/// Acts as `block` on the listed factors (in the listed order, first = slowest)
/// and as the identity on the remaining ones.
inline ComplexMatrix embed(const ComplexMatrix& block, std::initializer_list<Factor> factors) {
  std::vector<int> fs;
  int n = 1;
  for (Factor f : factors) {
    for (int g : fs)
      if (g == static_cast<int>(f)) throw ShapeError("embed: repeated factor");
    fs.push_back(static_cast<int>(f));
    n *= BasisLayout::sizes[static_cast<int>(f)];
  }
  if (block.rows() != n || block.cols() != n) throw ShapeError("embed: block does not match placement");

  auto sub = [&](const BasisLayout::Index& x) {
    int k = 0;
    for (int f : fs) k = k * BasisLayout::sizes[f] + x[f];
    return k;
  };
  std::array<bool, BasisLayout::kFactors> named{};
  for (int f : fs) named[f] = true;

  constexpr int N = BasisLayout::dim;
  Dense out = Dense::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const auto xi = BasisLayout::unflat(i);
    for (int j = 0; j < N; ++j) {
      const auto xj = BasisLayout::unflat(j);
      bool ok = true;
      for (int f = 0; f < BasisLayout::kFactors && ok; ++f)
        if (!named[f] && xi[f] != xj[f]) ok = false;
      if (ok) out(i, j) = block(sub(xi), sub(xj));
    }
  }
  return ComplexMatrix(std::move(out));
}

/// Projection onto operators acting trivially on `factors` (average over their
/// diagonal, zero elsewhere). The residual against the input measures triviality.
inline ComplexMatrix trivialize(const ComplexMatrix& m, std::initializer_list<Factor> factors) {
  constexpr int N = BasisLayout::dim;
  if (m.rows() != N || m.cols() != N) throw ShapeError("trivialize: expected 128x128");
  std::array<bool, BasisLayout::kFactors> triv{};
  int mult = 1;
  for (Factor f : factors) {
    triv[static_cast<int>(f)] = true;
    mult *= BasisLayout::size(f);
  }
  Dense out = Dense::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const auto xi = BasisLayout::unflat(i);
    for (int j = 0; j < N; ++j) {
      const auto xj = BasisLayout::unflat(j);
      bool diag = true;
      for (int f = 0; f < BasisLayout::kFactors; ++f)
        if (triv[f] && xi[f] != xj[f]) diag = false;
      if (!diag) continue;
      // average over all joint values of the trivial factors
      cplx acc = 0;
      for (int t = 0; t < mult; ++t) {
        auto yi = xi, yj = xj;
        int r = t;
        for (int f = BasisLayout::kFactors - 1; f >= 0; --f) {
          if (!triv[f]) continue;
          yi[f] = yj[f] = r % BasisLayout::sizes[f];
          r /= BasisLayout::sizes[f];
        }
        acc += m(BasisLayout::flat(yi), BasisLayout::flat(yj));
      }
      out(i, j) = acc / static_cast<double>(mult);
    }
  }
  return ComplexMatrix(std::move(out));
}

/// Keeps only the entries whose C indices are (c_row, c_col).
inline ComplexMatrix c_block_mask(const ComplexMatrix& m, int c_row, int c_col) {
  Dense out = Dense::Zero(m.rows(), m.cols());
  const int h = BasisLayout::dim / 2;
  out.block(c_row * h, c_col * h, h, h) = m.dense().block(c_row * h, c_col * h, h, h);
  return ComplexMatrix(std::move(out));
}

/// Exchange of the s = r and s = l blocks, P M P with P the s-flip.
inline ComplexMatrix swap_s(const ComplexMatrix& m) {
  constexpr int N = BasisLayout::dim;
  std::array<int, N> perm{};
  for (int i = 0; i < N; ++i) {
    auto x = BasisLayout::unflat(i);
    x[1] = 1 - x[1];
    perm[i] = BasisLayout::flat(x);
  }
  Dense out(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) out(i, j) = m(perm[i], perm[j]);
  return ComplexMatrix(std::move(out));
}

// ---------------------------------------------------------------------------
// Small constant matrices.

namespace mat {

inline ComplexMatrix unit(int n, int i, int j) {
  Dense m = Dense::Zero(n, n);
  m(i, j) = 1.0;
  return ComplexMatrix(std::move(m));
}

inline ComplexMatrix pauli(int k) {
  switch (k) {
    case 1: return ComplexMatrix::from_rows(2, 2, {0, 1, 1, 0});
    case 2: return ComplexMatrix::from_rows(2, 2, {0, -kI, kI, 0});
    case 3: return ComplexMatrix::from_rows(2, 2, {1, 0, 0, -1});
    default: throw std::out_of_range("pauli: index must be 1..3");
  }
}

/// Gell-Mann matrices, m = 1..8, normalized Tr(l_a l_b) = 2 delta_ab.
inline ComplexMatrix gell_mann(int m) {
  const double r3 = 1.0 / std::sqrt(3.0);
  switch (m) {
    case 1: return ComplexMatrix::from_rows(3, 3, {0, 1, 0, 1, 0, 0, 0, 0, 0});
    case 2: return ComplexMatrix::from_rows(3, 3, {0, -kI, 0, kI, 0, 0, 0, 0, 0});
    case 3: return ComplexMatrix::from_rows(3, 3, {1, 0, 0, 0, -1, 0, 0, 0, 0});
    case 4: return ComplexMatrix::from_rows(3, 3, {0, 0, 1, 0, 0, 0, 1, 0, 0});
    case 5: return ComplexMatrix::from_rows(3, 3, {0, 0, -kI, 0, 0, 0, kI, 0, 0});
    case 6: return ComplexMatrix::from_rows(3, 3, {0, 0, 0, 0, 0, 1, 0, 1, 0});
    case 7: return ComplexMatrix::from_rows(3, 3, {0, 0, 0, 0, 0, -kI, 0, kI, 0});
    case 8: return ComplexMatrix::from_rows(3, 3, {r3, 0, 0, 0, r3, 0, 0, 0, -2 * r3});
    default: throw std::out_of_range("gell_mann: index must be 1..8");
  }
}

inline ComplexMatrix eta() { return ComplexMatrix::diag({1, -1}); }

}  // namespace mat

// ---------------------------------------------------------------------------
// Seeded draws.

inline double gauss(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

inline cplx complex_gauss(Rng& rng) {
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

inline ComplexMatrix gaussian_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Dense m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = complex_gauss(rng);
  return ComplexMatrix(std::move(m));
}

inline ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  const auto g = gaussian_matrix(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

/// Haar unitary: QR of a complex Gaussian with the phases of diag(R) removed.
inline ComplexMatrix haar_unitary(Eigen::Index n, Rng& rng) {
  const Dense g = gaussian_matrix(n, n, rng).dense();
  Eigen::HouseholderQR<Dense> qr(g);
  Dense q = qr.householderQ();
  const Dense r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    const double a = std::abs(d);
    q.col(k) *= (a > 0 ? d / a : cplx(1.0));
  }
  return ComplexMatrix(std::move(q));
}

}  // namespace twsm
