#include "cpsector/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cpsector {

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw InvalidInput("matrix: expected a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw InvalidInput("matrix: ragged rows");
    for (int c = 0; c < cols; ++c) {
      const json& e = j[i][c];
      if (!e.is_array() || e.size() != 2)
        throw InvalidInput("matrix: entries must be [re, im] pairs");
      m(i, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

json algebra_descriptor(const MatrixAlgebra& a) {
  json d;
  if (a.dim() == a.space_dim() * a.space_dim()) {
    d["kind"] = "full";
    return d;
  }
  switch (a.tag().kind) {
    case AlgebraTag::Kind::blocks:
      d["kind"] = "blocks";
      d["blocks"] = a.tag().blocks;
      return d;
    case AlgebraTag::Kind::net: {
      d["kind"] = "net";
      d["dims"] = a.tag().net_dims;
      json kinds = json::array();
      for (int k : a.tag().net_kinds) kinds.push_back(k == 0 ? "full" : "diag");
      d["kinds"] = std::move(kinds);
      return d;
    }
    default: {
      d["kind"] = "span";
      json basis = json::array();
      for (const Mat& b : a.basis()) basis.push_back(matrix_to_json(b));
      d["basis"] = std::move(basis);
      return d;
    }
  }
}

MatrixAlgebra algebra_from_descriptor(const json& j, int n,
                                      const Tolerance& tol) {
  if (!j.is_object() || !j.contains("kind"))
    throw InvalidInput("algebra descriptor: missing kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "full") return MatrixAlgebra::full(n);
  if (kind == "blocks") {
    if (!j.contains("blocks"))
      throw InvalidInput("algebra descriptor: blocks kind needs block sizes");
    std::vector<int> sizes = j.at("blocks").get<std::vector<int>>();
    MatrixAlgebra a = MatrixAlgebra::blocks(sizes);
    if (a.space_dim() != n)
      throw InvalidInput("algebra descriptor: block sizes do not sum to n");
    return a;
  }
  if (kind == "net") {
    json netj;
    netj["sites"] = j.contains("dims") ? j.at("dims").size() : 0;
    netj["dims"] = j.at("dims");
    netj["kinds"] = j.at("kinds");
    LatticeNet net = net_from_json(netj);
    if (net.total_dim() != n)
      throw InvalidInput("algebra descriptor: net dimension does not match n");
    return algebra_of(net, Region::of({}).complement(net.sites()), tol);
  }
  if (kind == "span") {
    if (!j.contains("basis"))
      throw InvalidInput("algebra descriptor: span kind needs a basis");
    std::vector<Mat> basis;
    for (const json& b : j.at("basis")) basis.push_back(matrix_from_json(b));
    MatrixAlgebra a = MatrixAlgebra::span_of(n, basis, tol);
    a.validate(tol);
    return a;
  }
  throw InvalidInput("algebra descriptor: unknown kind '" + kind + "'");
}

json cpmap_to_json(const CpMap& t) {
  json out;
  out["n"] = t.n();
  out["m"] = t.m();
  out["domain"] = algebra_descriptor(t.domain);
  out["target"] = algebra_descriptor(t.target);
  json repr;
  if (!t.kraus.empty()) {
    repr["kind"] = "kraus";
    json ops = json::array();
    for (const Mat& c : t.kraus) ops.push_back(matrix_to_json(c));
    repr["ops"] = std::move(ops);
  } else {
    repr["kind"] = "images";
    json basis = json::array(), images = json::array();
    for (const Mat& b : t.domain.basis()) basis.push_back(matrix_to_json(b));
    for (const Mat& y : t.images) images.push_back(matrix_to_json(y));
    repr["basis"] = std::move(basis);
    repr["images"] = std::move(images);
  }
  out["repr"] = std::move(repr);
  return out;
}

CpMap cpmap_from_json(const json& j, const Tolerance& tol) {
  if (!j.is_object()) throw InvalidInput("cp map: expected an object");
  for (const char* key : {"n", "m", "domain", "target", "repr"})
    if (!j.contains(key))
      throw InvalidInput(std::string("cp map: missing field '") + key + "'");
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  if (n < 1 || m < 1) throw InvalidInput("cp map: n and m must be >= 1");
  MatrixAlgebra domain = algebra_from_descriptor(j.at("domain"), n, tol);
  MatrixAlgebra target = algebra_from_descriptor(j.at("target"), m, tol);
  const json& repr = j.at("repr");
  const std::string kind = repr.at("kind").get<std::string>();
  if (kind == "kraus") {
    std::vector<Mat> ops;
    for (const json& o : repr.at("ops")) ops.push_back(matrix_from_json(o));
    return CpMap::from_kraus(std::move(domain), std::move(target),
                             std::move(ops), tol);
  }
  if (kind == "images") {
    std::vector<Mat> raw_basis, raw_images;
    for (const json& b : repr.at("basis"))
      raw_basis.push_back(matrix_from_json(b));
    for (const json& y : repr.at("images"))
      raw_images.push_back(matrix_from_json(y));
    if (raw_basis.size() != raw_images.size() || raw_basis.empty())
      throw InvalidInput("cp map: basis/images size mismatch");
    for (const Mat& b : raw_basis)
      if (b.rows() != n || b.cols() != n)
        throw InvalidInput("cp map: basis element has wrong shape");
    for (const Mat& y : raw_images)
      if (y.rows() != m || y.cols() != m)
        throw InvalidInput("cp map: image has wrong shape");

    // express the canonical domain basis through the caller's family
    const int k = static_cast<int>(raw_basis.size());
    Mat a(n * n, k), yimg(m * m, k);
    for (int i = 0; i < k; ++i) {
      a.col(i) = vectorize(raw_basis[i]);
      yimg.col(i) = vectorize(raw_images[i]);
    }
    // consistency on linear dependencies of the supplied basis
    Mat null = nullspace(a, tol.nullspace_tol());
    if ((yimg * null).norm() > 1e-6 * std::max(1.0, yimg.norm()))
      throw InvalidInput("cp map: images are inconsistent on linearly "
                         "dependent basis elements");
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
    std::vector<Mat> images;
    images.reserve(domain.dim());
    for (const Mat& f : domain.basis()) {
      Vec x = cod.solve(vectorize(f));
      if ((a * x - vectorize(f)).norm() > 1e-6 * std::max(1.0, f.norm()))
        throw InvalidInput("cp map: supplied basis does not span the declared "
                           "domain algebra");
      images.push_back(unvectorize(yimg * x, m, m));
    }
    return CpMap::from_images(std::move(domain), std::move(target),
                              std::move(images), tol);
  }
  throw InvalidInput("cp map: unknown repr kind '" + kind + "'");
}

json measure_to_json(const CpMeasure& mu) {
  json out;
  out["barycenter"] = cpmap_to_json(mu.barycenter);
  json atoms = json::array();
  for (const CpMap& a : mu.atoms) atoms.push_back(cpmap_to_json(a));
  out["atoms"] = std::move(atoms);
  return out;
}

CpMeasure measure_from_json(const json& j, const Tolerance& tol) {
  if (!j.is_object() || !j.contains("atoms"))
    throw InvalidInput("cp measure: expected {barycenter?, atoms}");
  std::vector<CpMap> atoms;
  for (const json& a : j.at("atoms")) atoms.push_back(cpmap_from_json(a, tol));
  CpMeasure mu = measure_from_atoms(std::move(atoms), tol);
  if (j.contains("barycenter")) {
    CpMap bary = cpmap_from_json(j.at("barycenter"), tol);
    require_same_spaces(bary, mu.barycenter);
    for (size_t i = 0; i < bary.images.size(); ++i)
      if ((bary.images[i] - mu.barycenter.images[i]).norm() >
          1000 * tol.abs_tol * std::max(1.0, bary.images[i].norm()))
        throw InvalidInput("cp measure: atoms do not sum to the declared "
                           "barycenter");
    mu.barycenter = std::move(bary);
  }
  return mu;
}

json net_to_json(const LatticeNet& net) {
  json out;
  out["sites"] = net.sites();
  out["dims"] = net.dims;
  json kinds = json::array();
  for (SiteKind k : net.kinds)
    kinds.push_back(k == SiteKind::full ? "full" : "diag");
  out["kinds"] = std::move(kinds);
  out["cap"] = net.dim_cap;
  return out;
}

LatticeNet net_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("kinds"))
    throw InvalidInput("net: expected {sites, dims, kinds}");
  LatticeNet net;
  net.dims = j.at("dims").get<std::vector<int>>();
  for (const json& k : j.at("kinds")) {
    const std::string s = k.get<std::string>();
    if (s == "full")
      net.kinds.push_back(SiteKind::full);
    else if (s == "diag")
      net.kinds.push_back(SiteKind::diag);
    else
      throw InvalidInput("net: site kind must be 'full' or 'diag'");
  }
  if (j.contains("sites") &&
      j.at("sites").get<size_t>() != net.dims.size())
    throw InvalidInput("net: 'sites' does not match the dims list");
  if (j.contains("cap")) net.dim_cap = j.at("cap").get<long>();
  net.validate();
  return net;
}

Region region_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("region: expected an index array");
  return Region::of(j.get<std::vector<int>>());
}

namespace {

void write_value(std::ostream& os, const json& j, int depth, int indent);

void write_indent(std::ostream& os, int depth, int indent) {
  if (indent > 0) {
    os << '\n';
    for (int i = 0; i < depth * indent; ++i) os << ' ';
  }
}

void write_number(std::ostream& os, double v) {
  if (!std::isfinite(v)) {
    os << "null";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void write_value(std::ostream& os, const json& j, int depth, int indent) {
  switch (j.type()) {
    case json::value_t::object: {
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        write_indent(os, depth + 1, indent);
        os << json(it.key()).dump() << ':';
        if (indent > 0) os << ' ';
        write_value(os, it.value(), depth + 1, indent);
      }
      if (!first) write_indent(os, depth, indent);
      os << '}';
      break;
    }
    case json::value_t::array: {
      os << '[';
      bool first = true;
      for (const json& e : j) {
        if (!first) os << ',';
        first = false;
        write_indent(os, depth + 1, indent);
        write_value(os, e, depth + 1, indent);
      }
      if (!first) write_indent(os, depth, indent);
      os << ']';
      break;
    }
    case json::value_t::number_float:
      write_number(os, j.get<double>());
      break;
    default:
      os << j.dump();
      break;
  }
}

}  // namespace

void write_json_17g(std::ostream& os, const json& j, int indent) {
  write_value(os, j, 0, indent);
}

std::string dump_json_17g(const json& j) {
  std::ostringstream ss;
  write_json_17g(ss, j, 1);
  ss << '\n';
  return ss.str();
}

}  // namespace cpsector
