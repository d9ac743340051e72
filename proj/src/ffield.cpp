#include "mmeval/ffield.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "fp_linalg.hpp"

namespace mmeval::ff {

namespace {

constexpr std::uint32_t kMaxGroundOrder = 65536;
constexpr std::uint32_t kAddTableLimit = 1024;

// Tallies raw base-field operations and charges them on destruction.
class CountingBase {
 public:
  explicit CountingBase(const BaseField& f) : f_(f) {}
  ~CountingBase() { charge(adds_, muls_, invs_); }
  CountingBase(const CountingBase&) = delete;
  CountingBase& operator=(const CountingBase&) = delete;

  Code add(Code x, Code y) { ++adds_; return f_.add(x, y); }
  Code sub(Code x, Code y) { ++adds_; return f_.sub(x, y); }
  Code mul(Code x, Code y) { ++muls_; return f_.mul(x, y); }
  Code inv(Code x) { ++invs_; return f_.inv(x); }
  const BaseField& field() const { return f_; }

 private:
  const BaseField& f_;
  std::uint64_t adds_ = 0, muls_ = 0, invs_ = 0;
};

// --- digit-vector arithmetic over F_p, used only to build ground tables ---

std::vector<Digit> mulmod_digits(const std::vector<Digit>& x, const std::vector<Digit>& y,
                                 const std::vector<Digit>& modulus, std::uint32_t p) {
  const std::size_t a = modulus.size() - 1;
  std::vector<std::uint64_t> prod(2 * a, 0);
  for (std::size_t i = 0; i < a; ++i) {
    if (!x[i]) continue;
    for (std::size_t j = 0; j < a; ++j) prod[i + j] = (prod[i + j] + std::uint64_t{x[i]} * y[j]) % p;
  }
  for (std::size_t k = 2 * a - 1; k-- > a;) {
    const std::uint64_t c = prod[k];
    if (!c) continue;
    prod[k] = 0;
    for (std::size_t j = 0; j < a; ++j) {
      prod[k - a + j] = (prod[k - a + j] + (p - modulus[j]) % p * c) % p;
    }
  }
  std::vector<Digit> out(a);
  for (std::size_t i = 0; i < a; ++i) out[i] = static_cast<Digit>(prod[i]);
  return out;
}

// --- polynomials over a BaseField, counted ---

void trim(BasePoly& v) {
  while (!v.empty() && v.back() == 0) v.pop_back();
}

int deg(const BasePoly& v) { return static_cast<int>(v.size()) - 1; }

// r = a mod m, m nonzero.
BasePoly poly_mod(CountingBase& F, BasePoly a, const BasePoly& m) {
  trim(a);
  const int dm = deg(m);
  const Code lead_inv = m.back() == 1 ? Code{1} : F.inv(m.back());
  while (deg(a) >= dm) {
    const int shift = deg(a) - dm;
    const Code c = lead_inv == 1 ? a.back() : F.mul(a.back(), lead_inv);
    for (int j = 0; j <= dm; ++j) a[shift + j] = F.sub(a[shift + j], F.mul(c, m[j]));
    trim(a);
  }
  return a;
}

BasePoly poly_mul(CountingBase& F, const BasePoly& x, const BasePoly& y) {
  if (x.empty() || y.empty()) return {};
  BasePoly out(x.size() + y.size() - 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] = F.add(out[i + j], F.mul(x[i], y[j]));
  }
  trim(out);
  return out;
}

BasePoly poly_powmod(CountingBase& F, const BasePoly& x, std::uint64_t e, const BasePoly& m) {
  BasePoly result{1};
  BasePoly base = poly_mod(F, x, m);
  while (e) {
    if (e & 1) result = poly_mod(F, poly_mul(F, result, base), m);
    e >>= 1;
    if (e) base = poly_mod(F, poly_mul(F, base, base), m);
  }
  return poly_mod(F, result, m);
}

BasePoly poly_sub(CountingBase& F, BasePoly x, const BasePoly& y) {
  if (x.size() < y.size()) x.resize(y.size(), 0);
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = F.sub(x[i], y[i]);
  trim(x);
  return x;
}

BasePoly poly_gcd(CountingBase& F, BasePoly x, BasePoly y) {
  trim(x);
  trim(y);
  while (!y.empty()) {
    BasePoly r = poly_mod(F, x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return x;
}

}  // namespace

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint32_t d = 2; std::uint64_t{d} * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// BaseField

std::shared_ptr<BaseField> BaseField::make_unchecked(std::uint32_t p, std::vector<Digit> modulus) {
  auto f = std::shared_ptr<BaseField>(new BaseField());
  f->p_ = p;
  f->a_ = static_cast<unsigned>(modulus.size() - 1);
  std::uint64_t q = 1;
  for (unsigned i = 0; i < f->a_; ++i) {
    q *= p;
    if (q > kMaxGroundOrder) {
      throw ParamError("ground field order p^a exceeds " + std::to_string(kMaxGroundOrder));
    }
  }
  f->q_ = static_cast<std::uint32_t>(q);
  f->modulus_ = std::move(modulus);
  f->build_tables();
  f->build_conjugate_system();
  return f;
}

std::shared_ptr<const BaseField> BaseField::prime(std::uint32_t p) {
  if (!is_prime(p)) throw ParamError("characteristic " + std::to_string(p) + " is not prime");
  return make_unchecked(p, {0, 1});
}

std::shared_ptr<const BaseField> BaseField::canonical(std::uint32_t p, unsigned a) {
  if (a == 0) throw ParamError("field degree must be at least 1");
  if (a == 1) return prime(p);
  auto fp = prime(p);
  BasePoly v = find_irreducible(*fp, a);
  return make_unchecked(p, std::vector<Digit>(v.begin(), v.end()));
}

std::shared_ptr<const BaseField> BaseField::with_modulus(std::uint32_t p, std::vector<Digit> modulus) {
  if (!is_prime(p)) throw ParamError("characteristic " + std::to_string(p) + " is not prime");
  if (modulus.size() < 2) throw ParamError("modulus must have degree at least 1");
  for (Digit d : modulus) {
    if (d >= p) throw ParamError("modulus coefficient " + std::to_string(d) + " is not below p");
  }
  if (modulus.back() != 1) throw ParamError("modulus is not monic");
  auto fp = prime(p);
  BasePoly v(modulus.begin(), modulus.end());
  const auto cert = certify_irreducible(*fp, v);
  if (!cert.irreducible) throw ParamError("modulus failed irreducibility certificate: " + cert.failure);
  return make_unchecked(p, std::move(modulus));
}

void BaseField::build_tables() {
  const std::uint32_t q = q_;
  neg_.resize(q);
  for (std::uint32_t x = 0; x < q; ++x) {
    auto d = digits(static_cast<Code>(x));
    for (auto& v : d) v = (p_ - v) % p_;
    neg_[x] = from_digits(d);
  }
  if (p_ != 2 && q <= kAddTableLimit) {
    add_table_.resize(std::size_t{q} * q);
    for (std::uint32_t x = 0; x < q; ++x) {
      const auto dx = digits(static_cast<Code>(x));
      for (std::uint32_t y = 0; y < q; ++y) {
        auto dy = digits(static_cast<Code>(y));
        for (unsigned i = 0; i < a_; ++i) dy[i] = (dy[i] + dx[i]) % p_;
        add_table_[std::size_t{x} * q + y] = from_digits(dy);
      }
    }
  }

  // Log/antilog tables from a primitive element found by order search.
  const std::uint32_t group = q - 1;
  exp_.assign(2 * std::size_t{q}, 0);
  log_.assign(q, 0);
  for (std::uint32_t g = 1; g < q; ++g) {
    const auto gd = digits(static_cast<Code>(g));
    std::vector<Digit> cur(a_, 0);
    cur[0] = 1;
    std::uint32_t order = 0;
    std::vector<Code> powers;
    powers.reserve(group);
    do {
      powers.push_back(from_digits(cur));
      cur = a_ == 1 ? std::vector<Digit>{static_cast<Digit>(std::uint64_t{cur[0]} * gd[0] % p_)}
                    : mulmod_digits(cur, gd, modulus_, p_);
      ++order;
    } while (!(cur[0] == 1 && std::all_of(cur.begin() + 1, cur.end(), [](Digit d) { return d == 0; })) &&
             order <= group);
    if (order != group) continue;
    for (std::uint32_t i = 0; i < group; ++i) {
      exp_[i] = powers[i];
      exp_[i + group] = powers[i];
      log_[powers[i]] = i;
    }
    exp_[2 * group] = powers[0];
    return;
  }
  throw InvariantError("no primitive element found; modulus is not irreducible");
}

void BaseField::build_conjugate_system() {
  if (a_ >= 2) {
    y0_ = static_cast<Code>(p_);
  } else {
    y0_ = static_cast<Code>((p_ - modulus_[0]) % p_);
  }
  // A[k][j] = (Y0^{p^k})^j.
  const unsigned a = a_;
  std::vector<std::vector<Code>> m(a, std::vector<Code>(2 * a, 0));
  Code conj = y0_;
  for (unsigned k = 0; k < a; ++k) {
    Code pw = 1;
    for (unsigned j = 0; j < a; ++j) {
      m[k][j] = pw;
      pw = mul(pw, conj);
    }
    m[k][a + k] = 1;
    conj = pow(conj, p_);
  }
  for (unsigned col = 0; col < a; ++col) {
    unsigned sel = col;
    while (sel < a && m[sel][col] == 0) ++sel;
    if (sel == a) throw InvariantError("conjugate Vandermonde system is singular");
    std::swap(m[sel], m[col]);
    const Code s = inv(m[col][col]);
    for (auto& v : m[col]) v = mul(v, s);
    for (unsigned r = 0; r < a; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Code f = m[r][col];
      for (unsigned c = 0; c < 2 * a; ++c) m[r][c] = sub(m[r][c], mul(f, m[col][c]));
    }
  }
  conj_inv_.assign(a, std::vector<Code>(a));
  for (unsigned r = 0; r < a; ++r) {
    for (unsigned c = 0; c < a; ++c) conj_inv_[r][c] = m[r][a + c];
  }
  const std::uint64_t bits = std::bit_width(p_);
  const std::uint64_t pow_muls = (bits - 1) + (std::popcount(p_) - 1);
  extraction_cost_.muls = (a - 1) * pow_muls + std::uint64_t{a} * a;
  extraction_cost_.adds = std::uint64_t{a} * (a - 1);
}

Code BaseField::add(Code x, Code y) const {
  if (p_ == 2) return static_cast<Code>(x ^ y);
  if (!add_table_.empty()) return add_table_[std::size_t{x} * q_ + y];
  std::uint32_t out = 0, scale = 1, xx = x, yy = y;
  for (unsigned i = 0; i < a_; ++i) {
    out += ((xx % p_ + yy % p_) % p_) * scale;
    xx /= p_;
    yy /= p_;
    scale *= p_;
  }
  return static_cast<Code>(out);
}

Code BaseField::inv(Code x) const {
  if (x == 0) throw InvariantError("inverse of zero");
  return exp_[(q_ - 1) - log_[x]];
}

Code BaseField::pow(Code x, std::uint64_t e) const {
  if (e == 0) return 1;
  if (x == 0) return 0;
  const std::uint64_t group = q_ - 1;
  return exp_[(std::uint64_t{log_[x]} * (e % group)) % group];
}

std::vector<Digit> BaseField::digits(Code x) const {
  std::vector<Digit> d(a_);
  std::uint32_t v = x;
  for (unsigned i = 0; i < a_; ++i) {
    d[i] = v % p_;
    v /= p_;
  }
  return d;
}

Code BaseField::from_digits(std::span<const Digit> d) const {
  std::uint32_t v = 0;
  for (std::size_t i = d.size(); i-- > 0;) v = v * p_ + d[i];
  return static_cast<Code>(v);
}

// ---------------------------------------------------------------------------
// Irreducibility

IrreducibilityCertificate certify_irreducible(const BaseField& field, const BasePoly& v_in) {
  BasePoly v = v_in;
  trim(v);
  if (v.size() < 2) return {false, "degree must be at least 1"};
  if (v.back() != 1) return {false, "not monic"};
  const int n = deg(v);
  if (n == 1) return {true, {}};
  CountingBase F(field);
  const BasePoly x{0, 1};
  BasePoly xpow = poly_mod(F, x, v);
  const BasePoly x_mod = xpow;
  for (int k = 1; k <= n; ++k) {
    xpow = poly_powmod(F, xpow, field.order(), v);
    if (2 * k <= n) {
      BasePoly g = poly_gcd(F, v, poly_sub(F, xpow, x_mod));
      if (deg(g) != 0) {
        return {false, "gcd(v, X^(q^" + std::to_string(k) + ") - X) != 1"};
      }
    }
  }
  if (xpow != x_mod) return {false, "X^(q^" + std::to_string(n) + ") != X mod v"};
  return {true, {}};
}

BasePoly find_irreducible(const BaseField& field, unsigned degree) {
  if (degree == 0) throw ParamError("irreducible degree must be at least 1");
  const std::uint64_t q = field.order();
  BasePoly cand(degree + 1, 0);
  cand[degree] = 1;
  for (;;) {
    if (certify_irreducible(field, cand).irreducible) return cand;
    // Next candidate: increment the base-q counter, constant term fastest.
    unsigned i = 0;
    while (i < degree) {
      if (++cand[i] < q) break;
      cand[i] = 0;
      ++i;
    }
    if (i == degree) throw InvariantError("no irreducible polynomial found");
  }
}

// ---------------------------------------------------------------------------
// ExtField

std::size_t ElemHash::operator()(const Elem& x) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (Code c : x.c) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h);
}

ExtField ExtField::build(std::shared_ptr<const BaseField> base, unsigned degree) {
  if (degree == 0 || degree > kMaxExtDegree) {
    throw ParamError("extension degree " + std::to_string(degree) + " outside [1, " +
                     std::to_string(kMaxExtDegree) + "]");
  }
  BasePoly v = find_irreducible(*base, degree);
  return ExtField(std::move(base), std::move(v));
}

ExtField::ExtField(std::shared_ptr<const BaseField> base, BasePoly modulus)
    : base_(std::move(base)), modulus_(std::move(modulus)) {
  if (modulus_.size() < 2 || modulus_.size() - 1 > kMaxExtDegree) {
    throw ParamError("extension modulus degree outside [1, " + std::to_string(kMaxExtDegree) + "]");
  }
  for (Code c : modulus_) {
    if (c >= base_->order()) throw ParamError("extension modulus coefficient out of range");
  }
  b_ = static_cast<unsigned>(modulus_.size() - 1);
  if (b_ > 1) {
    // Moduli found by find_irreducible are certified already; recertifying
    // user-supplied ones is cheap at desk scale.
    CounterScope quiet(nullptr);
    const auto cert = certify_irreducible(*base_, modulus_);
    if (!cert.irreducible) throw ParamError("extension modulus failed irreducibility certificate: " + cert.failure);
  } else if (modulus_[1] != 1) {
    throw ParamError("extension modulus is not monic");
  }
  neg_low_.resize(b_);
  for (unsigned j = 0; j < b_; ++j) neg_low_[j] = base_->neg(modulus_[j]);
}

std::uint64_t ExtField::order() const {
  std::uint64_t r = 1;
  const std::uint64_t q = base_->order();
  for (unsigned i = 0; i < b_; ++i) {
    if (r > UINT64_MAX / q) throw ParamError("field order does not fit in 64 bits");
    r *= q;
  }
  return r;
}

Elem ExtField::y1() const {
  if (b_ >= 2) {
    Elem e;
    e.c[1] = 1;
    return e;
  }
  return embed(neg_low_[0]);
}

Elem ExtField::add(const Elem& x, const Elem& y) const {
  const BaseField& F = *base_;
  Elem r;
  for (unsigned i = 0; i < b_; ++i) r.c[i] = F.add(x.c[i], y.c[i]);
  charge(b_, 0);
  return r;
}

Elem ExtField::sub(const Elem& x, const Elem& y) const {
  const BaseField& F = *base_;
  Elem r;
  for (unsigned i = 0; i < b_; ++i) r.c[i] = F.sub(x.c[i], y.c[i]);
  charge(b_, 0);
  return r;
}

Elem ExtField::neg(const Elem& x) const {
  const BaseField& F = *base_;
  Elem r;
  for (unsigned i = 0; i < b_; ++i) r.c[i] = F.neg(x.c[i]);
  charge(b_, 0);
  return r;
}

Elem ExtField::mul(const Elem& x, const Elem& y) const {
  const BaseField& F = *base_;
  const unsigned b = b_;
  if (b == 1) {
    charge(0, 1);
    return embed(F.mul(x.c[0], y.c[0]));
  }
  // Schoolbook product and reduction; the charged cost is the full schoolbook
  // count regardless of zero skipping.
  std::array<Code, 2 * kMaxExtDegree> prod{};
  for (unsigned i = 0; i < b; ++i) {
    const Code xi = x.c[i];
    if (!xi) continue;
    for (unsigned j = 0; j < b; ++j) {
      if (!y.c[j]) continue;
      prod[i + j] = F.add(prod[i + j], F.mul(xi, y.c[j]));
    }
  }
  for (unsigned k = 2 * b - 2; k >= b; --k) {
    const Code c = prod[k];
    if (!c) continue;
    for (unsigned j = 0; j < b; ++j) {
      if (neg_low_[j]) prod[k - b + j] = F.add(prod[k - b + j], F.mul(c, neg_low_[j]));
    }
  }
  Elem r;
  std::copy_n(prod.begin(), b, r.c.begin());
  const std::uint64_t bb = b;
  charge((bb - 1) * (bb - 1) + bb * (bb - 1), bb * bb + bb * (bb - 1));
  return r;
}

Elem ExtField::inv(const Elem& x) const {
  if (is_zero(x)) throw InvariantError("inverse of zero");
  if (b_ == 1) {
    charge(0, 0, 1);
    return embed(base_->inv(x.c[0]));
  }
  // Extended Euclid on (modulus, x) tracking the cofactor of x.
  CountingBase F(*base_);
  BasePoly r0 = modulus_;
  BasePoly r1(x.c.begin(), x.c.begin() + b_);
  trim(r1);
  BasePoly s0{}, s1{1};
  while (deg(r1) > 0) {
    BasePoly quot(deg(r0) - deg(r1) + 1, 0);
    BasePoly rem = r0;
    const Code lead_inv = F.inv(r1.back());
    while (deg(rem) >= deg(r1)) {
      const int shift = deg(rem) - deg(r1);
      const Code c = F.mul(rem.back(), lead_inv);
      quot[shift] = c;
      for (int j = 0; j <= deg(r1); ++j) rem[shift + j] = F.sub(rem[shift + j], F.mul(c, r1[j]));
      trim(rem);
    }
    trim(quot);
    BasePoly s2 = poly_sub(F, s0, poly_mul(F, quot, s1));
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  const Code c = F.inv(r1[0]);
  Elem out;
  for (std::size_t i = 0; i < s1.size() && i < b_; ++i) out.c[i] = F.mul(s1[i], c);
  return out;
}

Elem ExtField::pow(const Elem& x, std::uint64_t e) const {
  Elem result = one();
  Elem base = x;
  while (e) {
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return result;
}

Elem ExtField::scale(const Elem& x, Code c) const {
  if (c == 0) return zero();
  if (c == 1) return x;
  const BaseField& F = *base_;
  Elem r;
  for (unsigned i = 0; i < b_; ++i) r.c[i] = F.mul(x.c[i], c);
  charge(0, b_);
  return r;
}

std::vector<Digit> ExtField::prime_digits(const Elem& x) const {
  const unsigned a = base_->degree();
  std::vector<Digit> out(std::size_t{a} * b_);
  for (unsigned j = 0; j < b_; ++j) {
    std::uint32_t v = x.c[j];
    for (unsigned k = 0; k < a; ++k) {
      out[j * a + k] = v % base_->characteristic();
      v /= base_->characteristic();
    }
  }
  return out;
}

Elem ExtField::from_prime_digits(std::span<const Digit> digits) const {
  const unsigned a = base_->degree();
  Elem r;
  for (unsigned j = 0; j < b_; ++j) r.c[j] = base_->from_digits(digits.subspan(j * a, a));
  return r;
}

bool ExtField::canonical_less(const Elem& x, const Elem& y) const {
  for (unsigned j = b_; j-- > 0;) {
    if (x.c[j] != y.c[j]) return x.c[j] < y.c[j];
  }
  return false;
}

std::uint64_t ExtField::canonical_index(const Elem& x) const {
  (void)order();
  std::uint64_t v = 0;
  for (unsigned j = b_; j-- > 0;) v = v * base_->order() + x.c[j];
  return v;
}

Elem ExtField::from_canonical_index(std::uint64_t index) const {
  Elem r;
  for (unsigned j = 0; j < b_; ++j) {
    r.c[j] = static_cast<Code>(index % base_->order());
    index /= base_->order();
  }
  return r;
}

std::vector<Elem> ExtField::elements() const {
  const std::uint64_t n = order();
  if (n > (1ull << 24)) throw ParamError("field too large to enumerate");
  std::vector<Elem> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(from_canonical_index(i));
  return out;
}

Elem ExtField::random(std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::uint32_t> dist(0, base_->order() - 1);
  Elem r;
  for (unsigned j = 0; j < b_; ++j) r.c[j] = static_cast<Code>(dist(rng));
  return r;
}

bool ExtField::is_valid(const Elem& x) const {
  for (unsigned j = 0; j < kMaxExtDegree; ++j) {
    if (j >= b_ && x.c[j] != 0) return false;
    if (x.c[j] >= base_->order()) return false;
  }
  return true;
}

std::string ExtField::to_string(const Elem& x) const {
  std::ostringstream os;
  os << '[';
  const auto d = prime_digits(x);
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Tower operations

std::vector<Elem> frobenius_conjugates(const ExtField& field, const Elem& x) {
  const unsigned k = field.absolute_degree();
  std::vector<Elem> out;
  out.reserve(k);
  Elem cur = x;
  for (unsigned i = 0; i < k; ++i) {
    out.push_back(cur);
    cur = field.pow(cur, field.characteristic());
  }
  return out;
}

std::vector<Digit> extract_ground_coeffs(const BaseField& field, Code x, bool charge_cost) {
  if (charge_cost) {
    const auto& c = field.extraction_cost();
    charge(c.adds, c.muls, c.invs);
  }
  return field.digits(x);
}

std::vector<Digit> extract_ground_coeffs_by_conjugates(const BaseField& field, Code x) {
  const unsigned a = field.degree();
  const std::uint32_t p = field.characteristic();
  std::vector<Code> conj(a);
  Code cur = x;
  for (unsigned k = 0; k < a; ++k) {
    conj[k] = cur;
    cur = field.pow(cur, p);
  }
  const auto& inv = field.conjugate_inverse();
  std::vector<Digit> out(a);
  for (unsigned j = 0; j < a; ++j) {
    Code acc = 0;
    for (unsigned k = 0; k < a; ++k) acc = field.add(acc, field.mul(inv[j][k], conj[k]));
    if (acc >= p) throw InvariantError("conjugate route produced a coefficient outside F_p");
    out[j] = acc;
  }
  const auto& c = field.extraction_cost();
  charge(c.adds, c.muls, c.invs);
  return out;
}

std::vector<Elem> enumerate_subfield(const ExtField& ext, unsigned k) {
  const unsigned abs = ext.absolute_degree();
  const std::uint32_t p = ext.characteristic();
  if (k == 0 || abs % k != 0) {
    throw ParamError("subfield degree " + std::to_string(k) + " does not divide " + std::to_string(abs));
  }
  detail::FpMatrix map(abs, abs, p);
  std::vector<Digit> unit(abs, 0);
  for (unsigned r = 0; r < abs; ++r) {
    std::fill(unit.begin(), unit.end(), 0);
    unit[r] = 1;
    const Elem x = ext.from_prime_digits(unit);
    Elem y = x;
    for (unsigned i = 0; i < k; ++i) y = ext.pow(y, p);
    const auto col = ext.prime_digits(ext.sub(y, x));
    for (unsigned i = 0; i < abs; ++i) map.at(i, r) = col[i];
  }
  const auto basis = map.nullspace();
  if (basis.size() != k) {
    throw InvariantError("Frobenius kernel has dimension " + std::to_string(basis.size()) + ", expected " +
                         std::to_string(k));
  }
  std::uint64_t count = 1;
  for (unsigned i = 0; i < k; ++i) count *= p;
  std::vector<Elem> out;
  out.reserve(count);
  std::vector<Digit> coords(k, 0), v(abs);
  for (std::uint64_t t = 0; t < count; ++t) {
    std::uint64_t rest = t;
    for (unsigned i = 0; i < k; ++i) {
      coords[i] = rest % p;
      rest /= p;
    }
    for (unsigned i = 0; i < abs; ++i) {
      std::uint64_t s = 0;
      for (unsigned j = 0; j < k; ++j) s += std::uint64_t{coords[j]} * basis[j][i];
      v[i] = static_cast<Digit>(s % p);
    }
    out.push_back(ext.from_prime_digits(v));
  }
  std::sort(out.begin(), out.end(), [&](const Elem& x, const Elem& y) { return ext.canonical_less(x, y); });
  return out;
}

Elem subfield_basis_element(const ExtField& ext, unsigned k, std::span<const Elem> subfield) {
  const unsigned abs = ext.absolute_degree();
  CounterScope quiet(nullptr);
  for (const Elem& x : subfield) {
    if (ext.is_zero(x)) continue;
    detail::FpMatrix m(abs, k, ext.characteristic());
    Elem pw = ext.one();
    for (unsigned j = 0; j < k; ++j) {
      const auto d = ext.prime_digits(pw);
      for (unsigned i = 0; i < abs; ++i) m.at(i, j) = d[i];
      pw = ext.mul(pw, x);
    }
    if (m.rank() == k) return x;
  }
  throw InvariantError("no element generates a power basis of the subfield");
}

SubfieldBasis::SubfieldBasis(const ExtField& ext, const Elem& beta, unsigned k)
    : ext_(&ext), beta_(beta), k_(k) {
  const unsigned abs = ext.absolute_degree();
  const std::uint32_t p = ext.characteristic();
  powers_.reserve(k);
  Elem pw = ext.one();
  for (unsigned j = 0; j < k; ++j) {
    powers_.push_back(pw);
    pw = ext.mul(pw, beta);
  }
  // Row-reduce [B | I]; the right block is then P with P B = [I_k; 0].
  detail::FpMatrix aug(abs, k + abs, p);
  for (unsigned j = 0; j < k; ++j) {
    const auto d = ext.prime_digits(powers_[j]);
    for (unsigned i = 0; i < abs; ++i) aug.at(i, j) = d[i];
  }
  for (unsigned i = 0; i < abs; ++i) aug.at(i, k + i) = 1;
  const auto pivots = aug.rref();
  if (pivots.size() < k || pivots[k - 1] != k - 1) {
    throw InvariantError("powers of beta are linearly dependent over F_p");
  }
  reducer_.assign(abs, std::vector<Digit>(abs));
  for (unsigned r = 0; r < abs; ++r) {
    for (unsigned c = 0; c < abs; ++c) reducer_[r][c] = aug.at(r, k + c);
  }
}

std::vector<Digit> SubfieldBasis::decompose(const Elem& x) const {
  const unsigned abs = ext_->absolute_degree();
  const std::uint32_t p = ext_->characteristic();
  const auto d = ext_->prime_digits(x);
  std::vector<Digit> out(k_);
  for (unsigned r = 0; r < abs; ++r) {
    std::uint64_t s = 0;
    for (unsigned c = 0; c < abs; ++c) s += std::uint64_t{reducer_[r][c]} * d[c];
    s %= p;
    if (r < k_) {
      out[r] = static_cast<Digit>(s);
    } else if (s != 0) {
      throw MembershipError("element " + ext_->to_string(x) + " is not in the span of the subfield basis");
    }
  }
  charge(std::uint64_t{abs} * abs, std::uint64_t{abs} * abs);
  return out;
}

Elem SubfieldBasis::recompose(std::span<const Digit> c) const {
  Elem acc = ext_->zero();
  for (unsigned j = 0; j < k_ && j < c.size(); ++j) {
    acc = ext_->add(acc, ext_->scale(powers_[j], static_cast<Code>(c[j])));
  }
  return acc;
}

std::vector<Digit> decompose_over_basis(const ExtField& ext, const Elem& x, const Elem& beta, unsigned k) {
  return SubfieldBasis(ext, beta, k).decompose(x);
}

Elem project_to_subfield(const ExtField& ext, const Elem& x) {
  for (unsigned j = 1; j < kMaxExtDegree; ++j) {
    if (x.c[j] != 0) {
      throw MembershipError("element " + ext.to_string(x) + " does not lie in the embedded ground field");
    }
  }
  return x;
}

}  // namespace mmeval::ff
