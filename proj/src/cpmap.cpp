#include "cpsector/cpmap.hpp"

#include <algorithm>
#include <cmath>

namespace cpsector {

namespace {

// (X (x) 1_r) v without materializing the Kronecker product; v has n*r rows
// indexed (row, j) -> row*r + j.
Mat apply_x_tensor_id(const Mat& x, const Mat& v, int n, int r) {
  Mat out = Mat::Zero(v.rows(), v.cols());
  for (int row = 0; row < n; ++row)
    for (int rp = 0; rp < n; ++rp) {
      cplx c = x(row, rp);
      if (c == cplx(0, 0)) continue;
      for (int j = 0; j < r; ++j) out.row(row * r + j) += c * v.row(rp * r + j);
    }
  return out;
}

}  // namespace

Mat CpMap::apply(const Mat& x, double span_tol) const {
  double res = 0;
  Vec c = domain.coords(x, &res);
  if (res > span_tol * std::max(1.0, x.norm()))
    throw InvalidInput("apply: element not resolvable in the domain span");
  return apply_coords(c);
}

Mat CpMap::apply_coords(const Vec& c) const {
  Mat out = Mat::Zero(m(), m());
  for (int i = 0; i < c.size(); ++i) out += c(i) * images[i];
  return out;
}

Mat CpMap::image_of_identity() const {
  return apply_coords(domain.coords(domain.identity()));
}

bool CpMap::is_unital(double tol) const {
  return (image_of_identity() - target.identity()).norm() <= tol;
}

void CpMap::validate(const Tolerance& tol) const {
  if (images.size() != static_cast<size_t>(domain.dim()))
    throw InvalidInput("CpMap: one image per domain basis element required");
  for (const Mat& y : images)
    if (y.rows() != m() || y.cols() != m())
      throw InvalidInput("CpMap: image has wrong shape");
  double span_tol = 100 * tol.abs_tol;
  for (const Mat& y : images)
    if (!target.contains(y, span_tol))
      throw InvalidInput("CpMap: image leaves the target span");
  // self-adjointness: T(B^*) = T(B)^* resolved through span coordinates
  for (int i = 0; i < domain.dim(); ++i) {
    Mat lhs = apply(domain.basis(i).adjoint(), span_tol);
    if ((lhs - images[i].adjoint()).norm() >
        span_tol * std::max(1.0, images[i].norm()))
      throw InvalidInput("CpMap: adjoint compatibility violated");
  }
  for (const Mat& c : kraus)
    if (c.rows() != n() || c.cols() != m())
      throw InvalidInput("CpMap: Kraus operator must be n x m");
}

CpMap CpMap::from_images(MatrixAlgebra domain, MatrixAlgebra target,
                         std::vector<Mat> images, const Tolerance& tol) {
  CpMap t{std::move(domain), std::move(target), std::move(images), {}};
  t.validate(tol);
  return t;
}

CpMap CpMap::from_kraus(MatrixAlgebra domain, MatrixAlgebra target,
                        std::vector<Mat> kraus, const Tolerance& tol) {
  if (kraus.empty()) throw InvalidInput("from_kraus: empty Kraus list");
  const int m = target.space_dim();
  const int n = domain.space_dim();
  for (const Mat& c : kraus)
    if (c.rows() != n || c.cols() != m)
      throw InvalidInput("from_kraus: Kraus operator must be n x m");
  std::vector<Mat> images;
  images.reserve(domain.dim());
  for (const Mat& b : domain.basis()) {
    Mat y = Mat::Zero(m, m);
    for (const Mat& c : kraus) y += c.adjoint() * b * c;
    images.push_back(std::move(y));
  }
  CpMap t{std::move(domain), std::move(target), std::move(images),
          std::move(kraus)};
  t.validate(tol);
  return t;
}

void require_same_spaces(const CpMap& a, const CpMap& b) {
  if (a.n() != b.n() || a.m() != b.m() || a.domain.dim() != b.domain.dim() ||
      a.target.dim() != b.target.dim())
    throw InvalidInput("maps live on different domain/target algebras");
  for (int i = 0; i < a.domain.dim(); ++i)
    if ((a.domain.basis(i) - b.domain.basis(i)).norm() > 1e-9)
      throw InvalidInput("maps use different domain bases");
}

CpMap cp_add(const CpMap& a, const CpMap& b) {
  require_same_spaces(a, b);
  CpMap out = a;
  out.kraus.clear();
  for (size_t i = 0; i < out.images.size(); ++i) out.images[i] += b.images[i];
  if (!a.kraus.empty() && !b.kraus.empty()) {
    out.kraus = a.kraus;
    out.kraus.insert(out.kraus.end(), b.kraus.begin(), b.kraus.end());
  }
  return out;
}

CpMap cp_scale(const CpMap& a, double s) {
  if (s < 0) throw InvalidInput("cp_scale: negative scale breaks positivity");
  CpMap out = a;
  for (Mat& y : out.images) y *= s;
  double r = std::sqrt(s);
  for (Mat& c : out.kraus) c *= r;
  return out;
}

CpMap cp_compose(const CpMap& a, const CpMap& b, const Tolerance& tol) {
  if (b.m() != a.n()) throw InvalidInput("cp_compose: space mismatch");
  std::vector<Mat> images;
  images.reserve(b.domain.dim());
  for (const Mat& y : b.images) images.push_back(a.apply(y, 100 * tol.abs_tol));
  return CpMap{b.domain, a.target, std::move(images), {}};
}

Mat gram_of_images(const MatrixAlgebra& domain, const std::vector<Mat>& images,
                   int m) {
  const int b = domain.dim();
  auto image_of = [&](const Vec& c) {
    Mat out = Mat::Zero(m, m);
    for (int i = 0; i < b; ++i) out += c(i) * images[i];
    return out;
  };
  Mat g(b * m, b * m);
  for (int i = 0; i < b; ++i) {
    for (int j = i; j < b; ++j) {
      double res = 0;
      Vec c = domain.coords(domain.basis(i).adjoint() * domain.basis(j), &res);
      if (res > 1e-6 * double(domain.space_dim()))
        throw InvalidInput(
            "gram: basis product not resolvable in the domain span");
      Mat t = image_of(c);
      g.block(i * m, j * m, m, m) = t;
      if (j > i) g.block(j * m, i * m, m, m) = t.adjoint();
    }
  }
  return 0.5 * (g + g.adjoint());
}

Mat gram_matrix(const CpMap& t) {
  return gram_of_images(t.domain, t.images, t.m());
}

CpCertificate is_completely_positive(const CpMap& t, const Tolerance& tol) {
  Mat g = gram_matrix(t);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  double min_eig = es.eigenvalues().minCoeff();
  return {min_eig >= -tol.abs_tol, min_eig};
}

Mat StinespringRep::pi_apply_coords(const Vec& c) const {
  Mat out = Mat::Zero(dilation_dim, dilation_dim);
  for (int i = 0; i < c.size(); ++i) out += c(i) * pi_images[i];
  return out;
}

Mat StinespringRep::pi_apply(const MatrixAlgebra& domain, const Mat& x) const {
  return pi_apply_coords(domain.coords(x));
}

StinespringRep minimal_stinespring(const CpMap& t, const Tolerance& tol) {
  const int b = t.domain.dim();
  const int m = t.m();
  Mat g = gram_matrix(t);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const RVec& ev = es.eigenvalues();
  double top = ev.size() ? ev(ev.size() - 1) : 0.0;
  if (ev.size() && ev(0) < -std::max(tol.abs_tol, tol.abs_tol * top))
    throw NotCompletelyPositive(ev(0));

  double cut = tol.rank_cutoff * std::max(top, 0.0);
  std::vector<int> kept;
  for (int i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > cut && ev(i) > 0) kept.push_back(i);
  const int r = static_cast<int>(kept.size());

  // W maps symbol coordinates B_j (x) e_l isometrically (w.r.t. the Gram
  // form) onto C^r: <W s, W s'> = s^* G s'. Wp is a right inverse.
  Mat w(r, b * m), wp(b * m, r);
  for (int p = 0; p < r; ++p) {
    double lam = ev(kept[p]);
    w.row(p) = std::sqrt(lam) * es.eigenvectors().col(kept[p]).adjoint();
    wp.col(p) = es.eigenvectors().col(kept[p]) / std::sqrt(lam);
  }

  StinespringRep rep;
  rep.dilation_dim = r;
  rep.pi_images.reserve(b);
  for (int i = 0; i < b; ++i) {
    // left multiplication on symbols: S_i = C_i (x) 1_m with
    // C_i(a,j) = coords(B_i B_j)_a
    Mat ci(b, b);
    for (int j = 0; j < b; ++j)
      ci.col(j) = t.domain.coords(t.domain.basis(i) * t.domain.basis(j));
    rep.pi_images.push_back(w * kron(ci, Mat::Identity(m, m)) * wp);
  }
  Vec c1 = t.domain.coords(t.domain.identity());
  Mat sym1 = Mat::Zero(b * m, m);
  for (int i = 0; i < b; ++i)
    sym1.block(i * m, 0, m, m) = c1(i) * Mat::Identity(m, m);
  rep.V = w * sym1;
  return rep;
}

StinespringRep stinespring_from_kraus(const CpMap& t, const Tolerance& tol) {
  if (t.kraus.empty())
    throw InvalidInput("stinespring_from_kraus: map carries no Kraus family");
  const int n = t.n(), m = t.m();
  const int r = static_cast<int>(t.kraus.size());
  const int b = t.domain.dim();
  const int d0 = n * r;

  // K0 = C^n (x) C^r with index (row, j) -> row*r + j;
  // V0 e_k = sum_j (C_j e_k) (x) f_j, pi0(X) = X (x) 1_r.
  Mat v0 = Mat::Zero(d0, m);
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < m; ++k)
      for (int row = 0; row < n; ++row)
        v0(row * r + j, k) = t.kraus[j](row, k);

  // Minimal invariant subspace span{pi0(B_i) V0 e_k}.
  Mat symbols(d0, b * m);
  for (int i = 0; i < b; ++i)
    symbols.middleCols(i * m, m) =
        apply_x_tensor_id(t.domain.basis(i), v0, n, r);
  Mat u = column_space(symbols, tol.nullspace_tol());

  StinespringRep rep;
  rep.dilation_dim = static_cast<int>(u.cols());
  rep.pi_images.reserve(b);
  for (int i = 0; i < b; ++i)
    rep.pi_images.push_back(u.adjoint() *
                            apply_x_tensor_id(t.domain.basis(i), u, n, r));
  rep.V = u.adjoint() * v0;
  return rep;
}

StinespringRep dilate(const CpMap& t, const Tolerance& tol) {
  return t.kraus.empty() ? minimal_stinespring(t, tol)
                         : stinespring_from_kraus(t, tol);
}

double reconstruction_residual(const CpMap& t, const StinespringRep& rep) {
  double worst = 0;
  for (int i = 0; i < t.domain.dim(); ++i) {
    Mat rec = rep.V.adjoint() * rep.pi_images[i] * rep.V;
    worst = std::max(worst, (rec - t.images[i]).norm());
  }
  return worst;
}

double multiplicativity_residual(const MatrixAlgebra& domain,
                                 const StinespringRep& rep) {
  double worst = 0;
  const int b = domain.dim();
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) {
      Vec c = domain.coords(domain.basis(i) * domain.basis(j));
      Mat lhs = rep.pi_apply_coords(c);
      Mat rhs = rep.pi_images[i] * rep.pi_images[j];
      worst = std::max(worst, (lhs - rhs).norm());
    }
  return worst;
}

MatrixAlgebra pi_image_algebra(const StinespringRep& rep,
                               const MatrixAlgebra& domain,
                               const Tolerance& tol) {
  if (rep.dilation_dim == 0)
    throw InvalidInput("pi_image_algebra: zero-dimensional dilation");
  (void)domain;
  return MatrixAlgebra::span_of(rep.dilation_dim, rep.pi_images, tol);
}

std::optional<Mat> stinespring_intertwiner(const MatrixAlgebra& domain,
                                           const StinespringRep& a,
                                           const StinespringRep& b,
                                           const Tolerance& tol) {
  if (a.dilation_dim != b.dilation_dim) return std::nullopt;
  const int bb = domain.dim();
  const int m = static_cast<int>(a.V.cols());
  Mat sa(a.dilation_dim, bb * m), sb(b.dilation_dim, bb * m);
  for (int i = 0; i < bb; ++i) {
    sa.middleCols(i * m, m) = a.pi_images[i] * a.V;
    sb.middleCols(i * m, m) = b.pi_images[i] * b.V;
  }
  // U S_a = S_b, i.e. S_a^T U^T = S_b^T
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(sa.transpose());
  Mat ut = cod.solve(sb.transpose());
  Mat u = ut.transpose();
  double unit_defect =
      (u.adjoint() * u - Mat::Identity(a.dilation_dim, a.dilation_dim)).norm();
  double residual = (u * sa - sb).norm();
  double scale = std::max(1.0, sb.norm());
  if (unit_defect > 1e-6 * a.dilation_dim || residual > 1e-6 * scale)
    return std::nullopt;
  (void)tol;
  return u;
}

Mat commutant_lifting(const StinespringRep& rep, const MatrixAlgebra& domain,
                      const Mat& a, const Tolerance& tol) {
  MatrixAlgebra pi_alg = pi_image_algebra(rep, domain, tol);
  return commutant_lifting(rep, domain, commutant(pi_alg, tol), a, tol);
}

Mat commutant_lifting(const StinespringRep& rep, const MatrixAlgebra& domain,
                      const MatrixAlgebra& pi_commutant, const Mat& a,
                      const Tolerance& tol) {
  const int m = static_cast<int>(rep.V.cols());
  if (a.rows() != m || a.cols() != m)
    throw InvalidInput("commutant_lifting: operator has wrong shape");
  // precondition: a commutes with every compression V^* pi(B) V
  for (size_t i = 0; i < rep.pi_images.size(); ++i) {
    Mat comp = rep.V.adjoint() * rep.pi_images[i] * rep.V;
    if ((comp * a - a * comp).norm() >
        100 * tol.abs_tol * std::max(1.0, comp.norm() * a.norm()))
      throw InvalidInput(
          "commutant_lifting: operator does not commute with V* pi(X) V");
  }
  // solve sum_q x_q R_q V = V a over the commutant basis; unique by
  // minimality of the representation
  const int q = pi_commutant.dim();
  const int k = rep.dilation_dim;
  Mat sys(k * m, q);
  for (int j = 0; j < q; ++j)
    sys.col(j) = vectorize(pi_commutant.basis(j) * rep.V);
  Vec rhs = vectorize(rep.V * a);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(sys);
  Vec x = cod.solve(rhs);
  double residual = (sys * x - rhs).norm();
  if (residual > 1e-6 * std::max(1.0, rhs.norm()))
    throw Error("commutant_lifting: linear system inconsistent (" +
                std::to_string(residual) + "); representation not minimal?");
  Mat lifted = Mat::Zero(k, k);
  for (int j = 0; j < q; ++j) lifted += x(j) * pi_commutant.basis(j);
  return lifted;
}

MatrixAlgebra relative_commutant(const CpMap& t, const StinespringRep& rep,
                                 const Tolerance& tol) {
  MatrixAlgebra pi_alg = pi_image_algebra(rep, t.domain, tol);
  MatrixAlgebra comm = commutant(pi_alg, tol);
  const int m = t.m();
  if (t.target.dim() == m * m) return comm;  // full target: no constraint

  const int q = comm.dim();
  const int b = t.domain.dim();
  // R = sum x_q R_q stays in the relative commutant iff every compression
  // V^* R pi(B_i) V has vanishing component orthogonal to the target span.
  Mat constraints(b * m * m, q);
  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < b; ++i) {
      Mat comp = rep.V.adjoint() * comm.basis(j) * rep.pi_images[i] * rep.V;
      Mat perp = comp - t.target.project(comp);
      constraints.block(i * m * m, j, m * m, 1) = vectorize(perp);
    }
  }
  Mat null = nullspace(constraints, tol.nullspace_tol());
  std::vector<Mat> mats;
  for (int c = 0; c < null.cols(); ++c) {
    Mat r = Mat::Zero(rep.dilation_dim, rep.dilation_dim);
    for (int j = 0; j < q; ++j) r += null(j, c) * comm.basis(j);
    mats.push_back(std::move(r));
  }
  if (mats.empty())
    throw Error("relative_commutant: lost the identity; numerical breakdown");
  MatrixAlgebra out = MatrixAlgebra::span_of(rep.dilation_dim, mats, tol);
  double defect = out.closure_defect();
  if (defect > 1000 * tol.abs_tol)
    throw Error("relative_commutant: closure verification failed (defect " +
                std::to_string(defect) + ")");
  return out;
}

}  // namespace cpsector
