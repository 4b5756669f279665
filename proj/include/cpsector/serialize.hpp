#ifndef CPSECTOR_SERIALIZE_HPP
#define CPSECTOR_SERIALIZE_HPP

#include <json.hpp>
#include <ostream>
#include <string>

#include "cpsector/decomp.hpp"
#include "cpsector/localnet.hpp"

namespace cpsector {

using json = nlohmann::ordered_json;

// Matrices travel as row-major nested arrays of [re, im] pairs.
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

// Algebra descriptors: {"kind":"full"} (all of M_n), {"kind":"blocks",
// "blocks":[s1,...]} (block-diagonal sum), {"kind":"net","dims":[...],
// "kinds":[...]} (lattice-net global algebra).
json algebra_descriptor(const MatrixAlgebra& a);  // by structural match
MatrixAlgebra algebra_from_descriptor(const json& j, int n,
                                      const Tolerance& tol = {});

// {"n":..,"m":..,"domain":{..},"target":{..},"repr":{..}} with repr either
// {"kind":"kraus","ops":[..]} or {"kind":"images","basis":[..],"images":[..]}.
json cpmap_to_json(const CpMap& t);
CpMap cpmap_from_json(const json& j, const Tolerance& tol = {});

// {"barycenter": CpMap, "atoms": [CpMap...]}
json measure_to_json(const CpMeasure& mu);
CpMeasure measure_from_json(const json& j, const Tolerance& tol = {});

json net_to_json(const LatticeNet& net);
LatticeNet net_from_json(const json& j);
Region region_from_json(const json& j);

// Deterministic writer: fixed field order (insertion order of ordered_json),
// floats at 17 significant digits.
void write_json_17g(std::ostream& os, const json& j, int indent = 0);
std::string dump_json_17g(const json& j);

}  // namespace cpsector

#endif
