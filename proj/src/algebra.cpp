#include "cpsector/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cpsector {

namespace {

// vec norm of an HS-normalized matrix on C^n is sqrt(n)
std::vector<Vec> to_unit_vectors(const std::vector<Mat>& mats) {
  std::vector<Vec> out;
  out.reserve(mats.size());
  for (const Mat& m : mats) out.push_back(vectorize(m) / std::sqrt(double(m.rows())));
  return out;
}

std::vector<Mat> to_hs_basis(const std::vector<Vec>& vecs, int n) {
  std::vector<Mat> out;
  out.reserve(vecs.size());
  for (const Vec& v : vecs) out.push_back(std::sqrt(double(n)) * unvectorize(v, n, n));
  return out;
}

}  // namespace

MatrixAlgebra MatrixAlgebra::full(int n) {
  if (n < 1) throw InvalidInput("algebra dimension must be >= 1");
  MatrixAlgebra a;
  a.n_ = n;
  double s = std::sqrt(double(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = s;
      a.basis_.push_back(std::move(e));
    }
  a.tag_ = AlgebraTag{AlgebraTag::Kind::full, {}, {}, {}};
  return a;
}

MatrixAlgebra MatrixAlgebra::blocks(const std::vector<int>& sizes) {
  int n = 0;
  for (int s : sizes) {
    if (s < 1) throw InvalidInput("block sizes must be >= 1");
    n += s;
  }
  if (n < 1) throw InvalidInput("blocks: empty size list");
  MatrixAlgebra a;
  a.n_ = n;
  double sc = std::sqrt(double(n));
  int off = 0;
  for (int s : sizes) {
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        Mat e = Mat::Zero(n, n);
        e(off + i, off + j) = sc;
        a.basis_.push_back(std::move(e));
      }
    off += s;
  }
  a.tag_ = AlgebraTag{AlgebraTag::Kind::blocks, sizes, {}, {}};
  return a;
}

MatrixAlgebra MatrixAlgebra::diagonal(int n) {
  return blocks(std::vector<int>(n, 1));
}

MatrixAlgebra MatrixAlgebra::scalars(int n) {
  MatrixAlgebra a;
  a.n_ = n;
  a.basis_.push_back(Mat::Identity(n, n));  // HS norm 1 already
  return a;
}

MatrixAlgebra MatrixAlgebra::span_of(int n, const std::vector<Mat>& spanning,
                                     const Tolerance& tol) {
  for (const Mat& m : spanning)
    if (m.rows() != n || m.cols() != n)
      throw InvalidInput("span_of: dimension mismatch among basis elements");
  MatrixAlgebra a;
  a.n_ = n;
  auto onb = orthonormalize_vectors(to_unit_vectors(spanning), tol.rank_cutoff);
  a.basis_ = to_hs_basis(onb, n);
  return a;
}

Vec MatrixAlgebra::coords(const Mat& x, double* residual) const {
  Vec c(dim());
  for (int i = 0; i < dim(); ++i) c(i) = hs_inner(basis_[i], x);
  if (residual) {
    Mat rec = from_coords(c);
    *residual = (x - rec).norm();  // Frobenius distance to span
  }
  return c;
}

Mat MatrixAlgebra::from_coords(const Vec& c) const {
  Mat out = Mat::Zero(n_, n_);
  for (int i = 0; i < dim(); ++i) out += c(i) * basis_[i];
  return out;
}

Mat MatrixAlgebra::project(const Mat& x) const { return from_coords(coords(x)); }

bool MatrixAlgebra::contains(const Mat& x, double tol) const {
  double r = 0;
  coords(x, &r);
  return r <= tol * std::max(1.0, x.norm());
}

bool MatrixAlgebra::contains_span(const MatrixAlgebra& other, double tol) const {
  for (const Mat& b : other.basis_)
    if (!contains(b, tol)) return false;
  return true;
}

bool MatrixAlgebra::same_span(const MatrixAlgebra& other, double tol) const {
  return dim() == other.dim() && contains_span(other, tol) &&
         other.contains_span(*this, tol);
}

bool MatrixAlgebra::is_abelian(double tol) const {
  for (int i = 0; i < dim(); ++i)
    for (int j = i + 1; j < dim(); ++j)
      if ((basis_[i] * basis_[j] - basis_[j] * basis_[i]).norm() > tol)
        return false;
  return true;
}

double MatrixAlgebra::closure_defect() const {
  double worst = 0;
  double r = 0;
  coords(identity(), &r);
  worst = std::max(worst, r);
  for (const Mat& b : basis_) {
    coords(b.adjoint(), &r);
    worst = std::max(worst, r);
  }
  for (const Mat& a : basis_)
    for (const Mat& b : basis_) {
      coords(a * b, &r);
      worst = std::max(worst, r);
    }
  return worst;
}

void MatrixAlgebra::validate(const Tolerance& tol) const {
  if (n_ < 1 || basis_.empty()) throw InvalidInput("empty matrix algebra");
  for (const Mat& b : basis_)
    if (b.rows() != n_ || b.cols() != n_)
      throw InvalidInput("algebra basis element has wrong shape");
  // orthonormality
  for (size_t i = 0; i < basis_.size(); ++i)
    for (size_t j = i; j < basis_.size(); ++j) {
      cplx g = hs_inner(basis_[i], basis_[j]);
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - want) > 100 * tol.abs_tol)
        throw InvalidInput("algebra basis is not HS-orthonormal");
    }
  double d = closure_defect();
  if (d > 100 * tol.abs_tol)
    throw InvalidInput("algebra span is not a unital *-algebra (defect " +
                       std::to_string(d) + ")");
}

MatrixAlgebra commutant(const MatrixAlgebra& alg, const Tolerance& tol) {
  const int n = alg.space_dim();
  const int d = n * n;
  // Phi(R) = sum_a F_a R F_a^* has range exactly alg' for an HS-orthonormal
  // basis {F_a} of a unital *-algebra; vec(F R F^*) = (conj(F) x F) vec(R).
  Mat phi = Mat::Zero(d, d);
  for (const Mat& f : alg.basis()) phi += kron(f.conjugate(), f);
  Mat range = column_space(phi, tol.nullspace_tol());
  std::vector<Mat> mats;
  mats.reserve(range.cols());
  for (int c = 0; c < range.cols(); ++c)
    mats.push_back(std::sqrt(double(n)) * unvectorize(range.col(c), n, n));
  MatrixAlgebra out = MatrixAlgebra::span_of(n, mats, tol);
  return out;
}

MatrixAlgebra generated_algebra(const std::vector<Mat>& gens, int n,
                                const Tolerance& tol) {
  for (const Mat& g : gens)
    if (g.rows() != n || g.cols() != n)
      throw InvalidInput("generated_algebra: generator has wrong shape");
  std::vector<Mat> current{Mat::Identity(n, n)};
  for (const Mat& g : gens) current.push_back(g);
  MatrixAlgebra alg = MatrixAlgebra::span_of(n, current, tol);
  for (;;) {
    std::vector<Mat> next = alg.basis();
    for (const Mat& b : alg.basis()) next.push_back(b.adjoint());
    for (const Mat& a : alg.basis())
      for (const Mat& b : alg.basis()) next.push_back(a * b);
    MatrixAlgebra bigger = MatrixAlgebra::span_of(n, next, tol);
    if (bigger.dim() == alg.dim()) return bigger;
    alg = std::move(bigger);
  }
}

MatrixAlgebra center(const MatrixAlgebra& alg, const Tolerance& tol) {
  return subspace_intersect(alg, commutant(alg, tol), tol);
}

std::vector<Mat> minimal_central_projections(const MatrixAlgebra& alg,
                                             const Tolerance& tol) {
  const int n = alg.space_dim();
  MatrixAlgebra z = center(alg, tol);
  if (!z.is_abelian(100 * tol.abs_tol))
    throw Error("center failed abelianness check; input algebra is broken");

  // Self-adjoint spanning family of the center.
  std::vector<Mat> herm;
  for (const Mat& b : z.basis()) {
    herm.push_back(0.5 * (b + b.adjoint()));
    herm.push_back(cplx(0, -0.5) * (b - b.adjoint()));
  }

  // Joint eigenspace refinement: blocks are isometries n x p whose columns
  // span a candidate joint eigenspace.
  std::vector<Mat> blocks{Mat::Identity(n, n)};
  const double cluster_gap = std::max(1e-6, 100 * tol.abs_tol);
  for (const Mat& h : herm) {
    std::vector<Mat> refined;
    for (const Mat& blk : blocks) {
      if (blk.cols() == 1) {
        refined.push_back(blk);
        continue;
      }
      Mat compressed = blk.adjoint() * h * blk;
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (compressed + compressed.adjoint()));
      const RVec& ev = es.eigenvalues();
      const Mat& evec = es.eigenvectors();
      int start = 0;
      for (int i = 1; i <= ev.size(); ++i) {
        if (i == ev.size() || ev(i) - ev(i - 1) > cluster_gap) {
          refined.push_back(blk * evec.middleCols(start, i - start));
          start = i;
        }
      }
    }
    blocks = std::move(refined);
  }

  std::vector<Mat> projections;
  projections.reserve(blocks.size());
  for (const Mat& blk : blocks) projections.push_back(blk * blk.adjoint());

  // Every projection must itself lie in the center span.
  for (const Mat& p : projections)
    if (!z.contains(p, 1000 * tol.abs_tol))
      throw Error("central projection left the center span; clustering failed");
  return projections;
}

MatrixAlgebra subspace_intersect(const MatrixAlgebra& a, const MatrixAlgebra& b,
                                 const Tolerance& tol) {
  if (a.space_dim() != b.space_dim())
    throw InvalidInput("subspace_intersect: dimension mismatch");
  const int n = a.space_dim();
  const int d = n * n;
  Mat sa(d, a.dim()), sb(d, b.dim());
  double s = std::sqrt(double(n));
  for (int i = 0; i < a.dim(); ++i) sa.col(i) = vectorize(a.basis(i)) / s;
  for (int i = 0; i < b.dim(); ++i) sb.col(i) = vectorize(b.basis(i)) / s;
  // x = sa u lies in span(b) iff (1 - sb sb^*) sa u = 0.
  Mat c = sa - sb * (sb.adjoint() * sa);
  Mat null = nullspace(c, tol.nullspace_tol());
  std::vector<Mat> mats;
  for (int k = 0; k < null.cols(); ++k) {
    Vec v = sa * null.col(k);
    mats.push_back(s * unvectorize(v, n, n));
  }
  if (mats.empty())
    throw Error("subspace_intersect: empty intersection (no unital algebra)");
  return MatrixAlgebra::span_of(n, mats, tol);
}

}  // namespace cpsector
