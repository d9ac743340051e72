#pragma once

// JSON records for fields, elements, polynomials, instances and matrices.
//
//   field    {"p": 2, "a": 2, "modulus": [1, 1, 1]}      low-to-high, monic
//   element  [c_0, ..., c_{a-1}]                         c_j in [0, p)
//   poly     {"n": 2, "d": 2, "coeffs": [elem, ...]}     d^n entries
//   instance {"field": ..., "poly": ..., "points": [[elem, ...], ...]}
//   matrix   {"rows": r, "cols": c, "entries": [elem, ...]}  row-major

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmeval/ffield.hpp"
#include "mmeval/linalg.hpp"
#include "mmeval/mme.hpp"
#include "mmeval/poly.hpp"
#include "mmeval/rigidity.hpp"

namespace mmeval::io {

using json = nlohmann::json;

/// Parses text; syntax errors become ParseError with line and column.
json parse_json(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

std::shared_ptr<const ff::BaseField> parse_field(const json& j, const std::string& where = "field");
json field_to_json(const ff::BaseField& F);

ff::Elem parse_element(const ff::BaseField& F, const json& j, const std::string& where);
json element_to_json(const ff::BaseField& F, const ff::Elem& x);
/// Comma-separated digits, e.g. "1,0".
ff::Elem parse_element_text(const ff::BaseField& F, const std::string& text);

poly::MultiPoly parse_poly(const ff::BaseField& F, const json& j, const std::string& where = "poly");
json poly_to_json(const ff::BaseField& F, const poly::MultiPoly& f);

mme::MmeInstance parse_instance(const json& j);
json instance_to_json(const mme::MmeInstance& inst);
json results_to_json(const ff::BaseField& F, const std::vector<ff::Elem>& values);

/// Matrix entries are elements of F_q.
la::FieldMatrix parse_matrix(const std::shared_ptr<const ff::BaseField>& base, const json& j,
                             const std::string& where);
json matrix_to_json(const ff::BaseField& F, const la::FieldMatrix& m);

/// {"field": ..., "t": 1, "factors": [{"L": matrix, "S": matrix}, ...]}
struct SplitInput {
  std::shared_ptr<const ff::BaseField> field;
  std::vector<rigidity::SplitFactor> factors;
  unsigned t = 0;
};
SplitInput parse_split(const json& j);

/// {"field": ..., "generators": [elem, ...]}
struct GeneratorInput {
  std::shared_ptr<const ff::BaseField> field;
  std::vector<ff::Elem> generators;
};
GeneratorInput parse_generators(const json& j);

}  // namespace mmeval::io
