#include "mmeval/io.hpp"

#include <fstream>
#include <sstream>

namespace mmeval::io {

namespace {

const json& field_of(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

std::uint64_t as_uint(const json& j, const std::string& where) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ParseError(where + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

const json& as_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  return j;
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) { return parse_json(read_text_file(path), path); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParamError("cannot write '" + path + "'");
  out << text;
}

std::shared_ptr<const ff::BaseField> parse_field(const json& j, const std::string& where) {
  const std::uint64_t p = as_uint(field_of(j, "p", where), where + ".p");
  const std::uint64_t a = as_uint(field_of(j, "a", where), where + ".a");
  const json& mod = as_array(field_of(j, "modulus", where), where + ".modulus");
  if (p > 65535) throw ParamError(where + ".p: characteristic too large");
  if (a == 0 || a > 16) throw ParamError(where + ".a: degree must be in [1, 16]");
  if (mod.size() != a + 1) {
    throw ParseError(where + ".modulus: expected " + std::to_string(a + 1) + " coefficients, got " +
                     std::to_string(mod.size()));
  }
  std::vector<ff::Digit> v;
  for (std::size_t i = 0; i < mod.size(); ++i) {
    const std::uint64_t c = as_uint(mod[i], where + ".modulus[" + std::to_string(i) + "]");
    if (c >= p) throw ParamError(where + ".modulus[" + std::to_string(i) + "]: coefficient not below p");
    v.push_back(static_cast<ff::Digit>(c));
  }
  return ff::BaseField::with_modulus(static_cast<std::uint32_t>(p), std::move(v));
}

json field_to_json(const ff::BaseField& F) {
  return json{{"p", F.characteristic()}, {"a", F.degree()}, {"modulus", F.modulus()}};
}

ff::Elem parse_element(const ff::BaseField& F, const json& j, const std::string& where) {
  const json& arr = as_array(j, where);
  if (arr.size() != F.degree()) {
    throw ParseError(where + ": expected " + std::to_string(F.degree()) + " digits, got " + std::to_string(arr.size()));
  }
  std::vector<ff::Digit> d;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::uint64_t v = as_uint(arr[i], where + "[" + std::to_string(i) + "]");
    if (v >= F.characteristic()) throw ParseError(where + "[" + std::to_string(i) + "]: digit not below p");
    d.push_back(static_cast<ff::Digit>(v));
  }
  return ff::ExtField::embed(F.from_digits(d));
}

json element_to_json(const ff::BaseField& F, const ff::Elem& x) { return json(F.digits(x.c[0])); }

ff::Elem parse_element_text(const ff::BaseField& F, const std::string& text) {
  json arr = json::array();
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(tok, &used);
      if (used != tok.size() || v < 0) throw ParseError("bad digit");
      arr.push_back(static_cast<std::uint64_t>(v));
    } catch (const std::exception&) {
      throw ParseError("--point: '" + tok + "' is not a non-negative integer");
    }
  }
  return parse_element(F, arr, "--point");
}

poly::MultiPoly parse_poly(const ff::BaseField& F, const json& j, const std::string& where) {
  const std::uint64_t n = as_uint(field_of(j, "n", where), where + ".n");
  const std::uint64_t d = as_uint(field_of(j, "d", where), where + ".d");
  if (n == 0 || n > 16) throw ParamError(where + ".n: variable count must be in [1, 16]");
  if (d == 0) throw ParamError(where + ".d: degree bound must be positive");
  const json& coeffs = as_array(field_of(j, "coeffs", where), where + ".coeffs");
  poly::MultiPoly f = poly::MultiPoly::zero(static_cast<unsigned>(n), static_cast<unsigned>(d));
  if (coeffs.size() != f.coeffs.size()) {
    throw ParseError(where + ".coeffs: expected d^n = " + std::to_string(f.coeffs.size()) + " entries, got " +
                     std::to_string(coeffs.size()));
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    f.coeffs[i] = parse_element(F, coeffs[i], where + ".coeffs[" + std::to_string(i) + "]");
  }
  return f;
}

json poly_to_json(const ff::BaseField& F, const poly::MultiPoly& f) {
  json coeffs = json::array();
  for (const auto& c : f.coeffs) coeffs.push_back(element_to_json(F, c));
  return json{{"n", f.n}, {"d", f.d}, {"coeffs", coeffs}};
}

mme::MmeInstance parse_instance(const json& j) {
  mme::MmeInstance inst;
  inst.base = parse_field(field_of(j, "field", "instance"));
  inst.f = parse_poly(*inst.base, field_of(j, "poly", "instance"));
  const json& pts = as_array(field_of(j, "points", "instance"), "points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string where = "points[" + std::to_string(i) + "]";
    const json& pt = as_array(pts[i], where);
    if (pt.size() != inst.f.n) {
      throw ParseError(where + ": expected " + std::to_string(inst.f.n) + " coordinates, got " +
                       std::to_string(pt.size()));
    }
    mme::Point x;
    for (std::size_t k = 0; k < pt.size(); ++k) {
      x.push_back(parse_element(*inst.base, pt[k], where + "[" + std::to_string(k) + "]"));
    }
    inst.points.push_back(std::move(x));
  }
  return inst;
}

json instance_to_json(const mme::MmeInstance& inst) {
  json pts = json::array();
  for (const auto& pt : inst.points) {
    json row = json::array();
    for (const auto& x : pt) row.push_back(element_to_json(*inst.base, x));
    pts.push_back(row);
  }
  return json{{"field", field_to_json(*inst.base)}, {"poly", poly_to_json(*inst.base, inst.f)}, {"points", pts}};
}

json results_to_json(const ff::BaseField& F, const std::vector<ff::Elem>& values) {
  json vals = json::array();
  for (const auto& v : values) vals.push_back(element_to_json(F, v));
  return json{{"values", vals}};
}

la::FieldMatrix parse_matrix(const std::shared_ptr<const ff::BaseField>& base, const json& j,
                             const std::string& where) {
  const ff::BaseField& F = *base;
  const std::uint64_t rows = as_uint(field_of(j, "rows", where), where + ".rows");
  const std::uint64_t cols = as_uint(field_of(j, "cols", where), where + ".cols");
  const json& entries = as_array(field_of(j, "entries", where), where + ".entries");
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) throw ParamError(where + ": matrix dimensions out of range");
  if (entries.size() != rows * cols) {
    throw ParseError(where + ".entries: expected " + std::to_string(rows * cols) + " entries, got " +
                     std::to_string(entries.size()));
  }
  la::FieldMatrix m(ff::ExtField::trivial(base), rows, cols);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    m.at(i / cols, i % cols) = parse_element(F, entries[i], where + ".entries[" + std::to_string(i) + "]");
  }
  return m;
}

json matrix_to_json(const ff::BaseField& F, const la::FieldMatrix& m) {
  json entries = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) entries.push_back(element_to_json(F, m.at(r, c)));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

SplitInput parse_split(const json& j) {
  SplitInput in;
  in.field = parse_field(field_of(j, "field", "split"));
  in.t = static_cast<unsigned>(as_uint(field_of(j, "t", "split"), "split.t"));
  const json& factors = as_array(field_of(j, "factors", "split"), "split.factors");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string where = "split.factors[" + std::to_string(i) + "]";
    in.factors.push_back({parse_matrix(in.field, field_of(factors[i], "L", where), where + ".L"),
                          parse_matrix(in.field, field_of(factors[i], "S", where), where + ".S")});
  }
  return in;
}

GeneratorInput parse_generators(const json& j) {
  GeneratorInput in;
  in.field = parse_field(field_of(j, "field", "generators"));
  const json& gens = as_array(field_of(j, "generators", "generators"), "generators");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    in.generators.push_back(parse_element(*in.field, gens[i], "generators[" + std::to_string(i) + "]"));
  }
  return in;
}

}  // namespace mmeval::io
