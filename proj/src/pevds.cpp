#include "mmeval/pevds.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>

#include "mmeval/mme.hpp"

namespace mmeval::pevds {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'E', 'V', 'D', 'S', '\0', '\0', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) throw FormatError("truncated data structure file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw FormatError("truncated data structure file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

std::uint64_t pow_checked(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (base != 0 && r > UINT64_MAX / base) throw ParamError("parameter power overflows");
    r *= base;
  }
  return r;
}

}  // namespace

poly::MultiPoly inverse_kronecker(const poly::UniPoly& f, unsigned d, unsigned m) {
  if (d == 0 || m == 0) throw ParamError("Kronecker parameters must be positive");
  const std::size_t len = poly::checked_power(d, m);
  if (f.degree() >= 0 && static_cast<std::size_t>(f.degree()) >= len) {
    throw DegreeError("polynomial degree " + std::to_string(f.degree()) + " is not below d^m = " + std::to_string(len));
  }
  poly::MultiPoly F = poly::MultiPoly::zero(m, d);
  std::copy(f.coeffs.begin(), f.coeffs.end(), F.coeffs.begin());
  return F;
}

KroneckerParams ds_choose_params(std::uint64_t n) {
  if (n < 2) throw ParamError("degree bound n must be at least 2");
  // ceil(log2 log2 n) = smallest m with 2^(2^m) >= n.
  unsigned m = 1;
  while (m < 6 && (std::uint64_t{1} << (1u << m)) < n) ++m;
  unsigned d = 1;
  while (pow_checked(d, m) < n) ++d;
  return {n, d, m};
}

KroneckerParams explicit_params(std::uint64_t n, unsigned d, unsigned m) {
  if (d == 0 || m == 0) throw ParamError("Kronecker parameters must be positive");
  if (pow_checked(d, m) < n) {
    throw DegreeError("d^m = " + std::to_string(pow_checked(d, m)) + " is below the degree bound " + std::to_string(n));
  }
  return {n, d, m};
}

EvalDataStructure::EvalDataStructure(std::shared_ptr<const ff::BaseField> base, ExtField ext, KroneckerParams params)
    : base_(std::move(base)), ext_(std::move(ext)), params_(params) {}

void EvalDataStructure::prepare() {
  S_ = ff::enumerate_subfield(ext_, ext_.degree());
  pos_.clear();
  for (std::size_t i = 0; i < S_.size(); ++i) pos_.emplace(S_[i], i);
  const std::size_t adm = std::size_t{a()} * params_.d * params_.m;
  if (S_.size() <= adm) throw InvariantError("subfield too small for the query interpolation");
  weights_ = poly::lagrange_weights(ext_, std::span<const Elem>(S_.data(), adm), ExtField::embed(base_->y0()));
  node_pows_.assign(S_.size(), std::vector<Elem>(a()));
  for (std::size_t r = 0; r < S_.size(); ++r) {
    node_pows_[r][0] = ext_.one();
    for (unsigned k = 1; k < a(); ++k) node_pows_[r][k] = ext_.mul(node_pows_[r][k - 1], S_[r]);
  }
}

std::vector<Elem> EvalDataStructure::cell_point(std::size_t index) const {
  std::vector<Elem> pt(params_.m);
  for (unsigned j = 0; j < params_.m; ++j) {
    pt[j] = S_[index % S_.size()];
    index /= S_.size();
  }
  return pt;
}

EvalDataStructure ds_build(std::shared_ptr<const ff::BaseField> base, const poly::UniPoly& f, KroneckerParams params,
                           unsigned threads) {
  if (params.n > pow_checked(params.d, params.m)) {
    throw DegreeError("d^m is below the degree bound " + std::to_string(params.n));
  }
  if (f.degree() >= 0 && static_cast<std::uint64_t>(f.degree()) >= params.n) {
    throw DegreeError("polynomial degree " + std::to_string(f.degree()) + " is not below n = " +
                      std::to_string(params.n));
  }
  const std::uint64_t adm = std::uint64_t{base->degree()} * params.d * params.m;
  const unsigned b = mme::smallest_exponent_above(base->characteristic(), adm);
  EvalDataStructure ds(base, ExtField::build(base, b), params);
  ds.prepare();
  const poly::MultiPoly F = inverse_kronecker(f, params.d, params.m);
  ds.cells_ = poly::grid_eval(ds.ext_, F, ds.S_, threads);
  return ds;
}

Elem ds_query(const EvalDataStructure& ds, const Elem& alpha, QueryStats* stats) {
  const ff::BaseField& base = ds.base();
  if (alpha.c[0] >= base.order()) throw ParamError("query point is not a ground field element");
  for (std::size_t j = 1; j < ff::kMaxExtDegree; ++j) {
    if (alpha.c[j] != 0) throw ParamError("query point is not a ground field element");
  }
  ff::OpCounter local;
  Elem result;
  std::unordered_set<std::size_t> read;
  {
    ff::CounterScope scope(local);
    const ExtField Fq = ExtField::trivial(ds.base_ptr());
    const unsigned m = ds.params().m, a = ds.a();
    std::vector<std::vector<ff::Digit>> curve(m);
    Elem coord = alpha;
    for (unsigned j = 0; j < m; ++j) {
      if (j > 0) coord = Fq.pow(coord, ds.params().d);
      curve[j] = ff::extract_ground_coeffs(base, coord.c[0]);
    }
    const ExtField& E = ds.ext();
    const std::size_t s = ds.S_.size();
    const std::size_t adm = ds.weights_.size();
    Elem acc = E.zero();
    for (std::size_t r = 0; r < s; ++r) {
      std::size_t cell = 0;
      for (unsigned j = m; j-- > 0;) {
        Elem x = E.zero();
        for (unsigned k = 0; k < a; ++k) {
          if (curve[j][k] != 0) x = E.add(x, E.scale_int(ds.node_pows_[r][k], curve[j][k]));
        }
        auto it = ds.pos_.find(x);
        if (it == ds.pos_.end()) throw InvariantError("query curve left the subfield grid");
        cell = cell * s + it->second;
      }
      read.insert(cell);
      if (r < adm) acc = E.add(acc, E.mul(ds.weights_[r], ds.cells_[cell]));
    }
    result = ff::project_to_subfield(E, acc);
  }
  if (stats) {
    stats->cells_read = read.size();
    stats->ops = local;
  }
  ff::charge(local.adds, local.muls, local.invs);
  return result;
}

void ds_save(const EvalDataStructure& ds, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kFormatVersion);
  put_u32(out, ds.p());
  put_u32(out, ds.a());
  put_u32(out, ds.b());
  put_u32(out, ds.params().d);
  put_u32(out, ds.params().m);
  put_u64(out, ds.params().n);
  for (ff::Digit v : ds.base().modulus()) put_u32(out, v);
  for (ff::Code c : ds.ext().modulus()) {
    for (ff::Digit v : ds.base().digits(c)) put_u32(out, v);
  }
  put_u64(out, ds.cell_count());
  for (const Elem& x : ds.cells()) {
    for (ff::Digit v : ds.ext().prime_digits(x)) put_u32(out, v);
  }
  if (!out) throw FormatError("failed to write data structure");
}

EvalDataStructure ds_load(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size())) throw FormatError("truncated data structure header");
  if (magic != kMagic) throw FormatError("bad magic; not a data structure file");
  const std::uint32_t version = get_u32(in);
  if (version != kFormatVersion) throw VersionError("unsupported data structure version " + std::to_string(version));
  const std::uint32_t p = get_u32(in), a = get_u32(in), b = get_u32(in), d = get_u32(in), m = get_u32(in);
  const std::uint64_t n = get_u64(in);
  if (!ff::is_prime(p) || p > 65535 || a == 0 || a > 16 || b == 0 || b > ff::kMaxExtDegree || d == 0 || m == 0 ||
      m > 64) {
    throw FormatError("data structure header has out-of-range parameters");
  }
  std::vector<ff::Digit> v0(a + 1);
  for (auto& v : v0) {
    v = get_u32(in);
    if (v >= p) throw FormatError("ground modulus digit out of range");
  }
  std::shared_ptr<const ff::BaseField> base;
  try {
    base = ff::BaseField::with_modulus(p, v0);
  } catch (const ParamError& e) {
    throw FormatError(std::string("invalid ground modulus: ") + e.what());
  }
  ff::BasePoly v1(b + 1);
  std::vector<ff::Digit> digits(a);
  for (auto& c : v1) {
    for (auto& v : digits) {
      v = get_u32(in);
      if (v >= p) throw FormatError("extension modulus digit out of range");
    }
    c = base->from_digits(digits);
  }
  std::optional<ExtField> ext;
  try {
    ext.emplace(base, v1);
  } catch (const ParamError& e) {
    throw FormatError(std::string("invalid extension modulus: ") + e.what());
  }
  if (ext->degree() != b) throw FormatError("extension modulus degree does not match b");
  const std::uint64_t adm = std::uint64_t{a} * d * m;
  if (mme::smallest_exponent_above(p, adm) != b) throw FormatError("b is not minimal with p^b > adm");
  if (pow_checked(d, m) < n) throw FormatError("d^m is below the stored degree bound");
  const std::uint64_t expected = pow_checked(pow_checked(p, b), m);
  const std::uint64_t count = get_u64(in);
  if (count != expected) throw FormatError("cell count does not equal p^(bm)");

  EvalDataStructure ds(base, *ext, KroneckerParams{n, d, m});
  {
    ff::CounterScope quiet(nullptr);
    ds.prepare();
  }
  ds.cells_.resize(count);
  std::vector<ff::Digit> cell_digits(std::size_t{a} * b);
  for (auto& cell : ds.cells_) {
    for (auto& v : cell_digits) {
      v = get_u32(in);
      if (v >= p) throw FormatError("cell digit out of range");
    }
    cell = ds.ext_.from_prime_digits(cell_digits);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after cell table");
  return ds;
}

bool ds_verify(const EvalDataStructure& ds, const poly::UniPoly& f, std::mt19937_64& rng, unsigned samples) {
  ff::CounterScope quiet(nullptr);
  const poly::MultiPoly F = inverse_kronecker(f, ds.params().d, ds.params().m);
  std::uniform_int_distribution<std::size_t> pick(0, ds.cell_count() - 1);
  for (unsigned i = 0; i < samples; ++i) {
    const std::size_t idx = pick(rng);
    const auto pt = ds.cell_point(idx);
    if (!(poly::multi_eval(ds.ext(), F, pt) == ds.cells()[idx])) return false;
  }
  return true;
}

}  // namespace mmeval::pevds
