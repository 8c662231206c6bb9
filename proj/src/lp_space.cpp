#include "holomet/lp_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "holomet/errors.hpp"

namespace holomet {

// ---------------------------------------------------------------------------
// Exponent

Exponent Exponent::of(double p) {
  if (!std::isfinite(p)) {
    if (p > 0) return infinity();
    throw ContractError("exponent must be a number >= 1");
  }
  if (!(p >= 1.0)) {
    std::ostringstream os;
    os << "exponent must be >= 1, got " << p;
    throw ContractError(os.str());
  }
  return Exponent(p, false);
}

double Exponent::value() const {
  if (infinite_) throw ContractError("exponent is infinite");
  return value_;
}

Exponent Exponent::conjugate() const {
  if (infinite_) return of(1.0);
  if (value_ == 1.0) return infinity();
  return of(value_ / (value_ - 1.0));
}

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << value_;
  return os.str();
}

// ---------------------------------------------------------------------------
// SpaceSignature

SpaceSignature SpaceSignature::lp(std::size_t n, Exponent p) {
  if (n == 0) throw ContractError("space dimension must be >= 1");
  return SpaceSignature(LpSignature{n, p});
}

SpaceSignature SpaceSignature::direct_sum(Exponent p1, std::size_t n1, Exponent p2, std::size_t n2, Exponent r) {
  if (n1 == 0 || n2 == 0) throw ContractError("direct sum block dimensions must be >= 1");
  if (p1.is_infinite() || p2.is_infinite() || r.is_infinite()) {
    throw ContractError("infinite exponents are only allowed for plain l^p spaces");
  }
  return SpaceSignature(DirectSumSignature{p1, n1, p2, n2, r});
}

const LpSignature& SpaceSignature::as_lp() const {
  if (!is_lp()) throw ContractError("expected an l^p signature, got " + describe());
  return std::get<LpSignature>(kind_);
}

const DirectSumSignature& SpaceSignature::as_direct_sum() const {
  if (is_lp()) throw ContractError("expected a direct-sum signature, got " + describe());
  return std::get<DirectSumSignature>(kind_);
}

std::size_t SpaceSignature::dimension() const noexcept {
  if (const auto* lp = std::get_if<LpSignature>(&kind_)) return lp->n;
  const auto& ds = std::get<DirectSumSignature>(kind_);
  return ds.n1 + ds.n2;
}

SpaceSignature SpaceSignature::dual() const {
  if (const auto* lp = std::get_if<LpSignature>(&kind_)) return SpaceSignature(LpSignature{lp->n, lp->p.conjugate()});
  const auto& ds = std::get<DirectSumSignature>(kind_);
  // Conjugates may be infinite here; the dual is only used for norms.
  return SpaceSignature(DirectSumSignature{ds.p1.conjugate(), ds.n1, ds.p2.conjugate(), ds.n2, ds.r.conjugate()});
}

SpaceSignature SpaceSignature::with_dimension(std::size_t m) const { return lp(m, as_lp().p); }

std::string SpaceSignature::describe() const {
  std::ostringstream os;
  if (const auto* lp = std::get_if<LpSignature>(&kind_)) {
    os << "l^" << lp->p.to_string() << "_" << lp->n;
  } else {
    const auto& ds = std::get<DirectSumSignature>(kind_);
    os << "l^" << ds.p1.to_string() << "_" << ds.n1 << " (+)_" << ds.r.to_string() << " l^" << ds.p2.to_string() << "_"
       << ds.n2;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Vectors

namespace {

void require_size(const SpaceSignature& s, std::size_t size, const char* what) {
  if (s.dimension() != size) {
    std::ostringstream os;
    os << what << ": " << size << " entries for space " << s.describe();
    throw ContractError(os.str());
  }
}

void require_same_space(const SpaceSignature& a, const SpaceSignature& b, const char* what) {
  if (!(a == b)) throw ContractError(std::string(what) + ": space mismatch " + a.describe() + " vs " + b.describe());
}

double combine(double a, double b, const Exponent& r) {
  if (r.is_infinite()) return std::max(a, b);
  const double rv = r.value();
  const double m = std::max(a, b);
  if (m == 0.0) return 0.0;
  return m * std::pow(std::pow(a / m, rv) + std::pow(b / m, rv), 1.0 / rv);
}

double norm_in(const SpaceSignature& s, std::span<const cplx> e) {
  if (s.is_lp()) return lp_norm(e, s.as_lp().p);
  const auto& ds = s.as_direct_sum();
  return combine(lp_norm(e.subspan(0, ds.n1), ds.p1), lp_norm(e.subspan(ds.n1, ds.n2), ds.p2), ds.r);
}

// l^p supporting functional of a unit vector (finite p).
void lp_support(std::span<const cplx> z, double p, double scale, std::span<cplx> out) {
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double m = std::abs(z[j]);
    out[j] = m == 0.0 ? cplx{} : scale * std::pow(m, p - 2.0) * std::conj(z[j]);
  }
}

}  // namespace

ComplexVector::ComplexVector(SpaceSignature s, std::vector<cplx> e) : space(std::move(s)), entries(std::move(e)) {
  require_size(space, entries.size(), "ComplexVector");
}

ComplexVector::ComplexVector(SpaceSignature s) : space(std::move(s)), entries(space.dimension(), cplx{}) {}

bool ComplexVector::is_zero() const noexcept {
  return std::all_of(entries.begin(), entries.end(), [](cplx z) { return z == cplx{}; });
}

ComplexVector operator+(const ComplexVector& a, const ComplexVector& b) {
  require_same_space(a.space, b.space, "vector addition");
  ComplexVector out = a;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += b[j];
  return out;
}

ComplexVector operator-(const ComplexVector& a, const ComplexVector& b) {
  require_same_space(a.space, b.space, "vector subtraction");
  ComplexVector out = a;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] -= b[j];
  return out;
}

ComplexVector operator*(cplx s, const ComplexVector& a) {
  ComplexVector out = a;
  for (auto& z : out.entries) z *= s;
  return out;
}

DualFunctional::DualFunctional(SpaceSignature s, std::vector<cplx> e) : space(std::move(s)), entries(std::move(e)) {
  require_size(space, entries.size(), "DualFunctional");
}

double lp_norm(std::span<const cplx> z, const Exponent& p) {
  double m = 0.0;
  for (cplx v : z) m = std::max(m, std::abs(v));
  if (p.is_infinite() || m == 0.0) return m;
  const double pv = p.value();
  double acc = 0.0;
  if (pv == 1.0) {
    for (cplx v : z) acc += std::abs(v);
    return acc;
  }
  for (cplx v : z) acc += std::pow(std::abs(v) / m, pv);
  return m * std::pow(acc, 1.0 / pv);
}

double norm(const ComplexVector& x) { return norm_in(x.space, x.entries); }

double dual_norm(const DualFunctional& f) { return norm_in(f.space.dual(), f.entries); }

cplx pairing(const ComplexVector& x, const DualFunctional& f) {
  require_same_space(x.space, f.space, "pairing");
  cplx acc{};
  for (std::size_t j = 0; j < x.size(); ++j) acc += x[j] * f.entries[j];
  return acc;
}

DualFunctional support_functional(const ComplexVector& x) {
  const double nx = norm(x);
  if (!(std::abs(nx - 1.0) <= kUnitTolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "support_functional: input norm " << nx << " is not 1";
    throw ContractError(os.str());
  }
  const ComplexVector u = (1.0 / nx) * x;
  DualFunctional out(x.space, std::vector<cplx>(x.size()));
  if (x.space.is_lp()) {
    const auto& lp = x.space.as_lp();
    if (lp.p.is_infinite()) throw UnsupportedError("support_functional: p = inf has no functional formula here");
    lp_support(u.entries, lp.p.value(), 1.0, out.entries);
    return out;
  }
  const auto& ds = x.space.as_direct_sum();
  const std::span<const cplx> all(u.entries);
  const std::span<cplx> dst(out.entries);
  const auto block = [&](std::span<const cplx> z, const Exponent& p, std::span<cplx> o) {
    const double nz = lp_norm(z, p);
    if (nz == 0.0) return;
    std::vector<cplx> unit(z.begin(), z.end());
    for (auto& v : unit) v /= nz;
    lp_support(unit, p.value(), std::pow(nz, ds.r.value() - 1.0), o);
  };
  block(all.subspan(0, ds.n1), ds.p1, dst.subspan(0, ds.n1));
  block(all.subspan(ds.n1, ds.n2), ds.p2, dst.subspan(ds.n1, ds.n2));
  return out;
}

ComplexVector project_head(const ComplexVector& x, std::size_t m) {
  if (m > x.size()) {
    std::ostringstream os;
    os << "project_head: " << m << " exceeds dimension " << x.size();
    throw ContractError(os.str());
  }
  ComplexVector out = x;
  std::fill(out.entries.begin() + static_cast<std::ptrdiff_t>(m), out.entries.end(), cplx{});
  return out;
}

}  // namespace holomet
