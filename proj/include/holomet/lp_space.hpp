#pragma once

// Finite-dimensional complex l^p spaces, l^r direct sums of two of them,
// the bilinear dual pairing and supporting functionals at unit vectors.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace holomet {

using cplx = std::complex<double>;

/// Norm exponent p in [1, inf]; infinity is a flag, not a large number.
class Exponent {
 public:
  /// ContractError unless p >= 1 and finite.
  static Exponent of(double p);
  static Exponent infinity() { return Exponent(0.0, true); }

  bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; ContractError for infinity.
  double value() const;
  /// Conjugate exponent q with 1/p + 1/q = 1.
  Exponent conjugate() const;

  std::string to_string() const;
  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Exponent(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

struct LpSignature {
  std::size_t n = 1;
  Exponent p = Exponent::of(2.0);
  friend bool operator==(const LpSignature&, const LpSignature&) = default;
};

/// l^{p1}_{n1} (+)_r l^{p2}_{n2}, normed by (|y|_{p1}^r + |z|_{p2}^r)^{1/r}.
struct DirectSumSignature {
  Exponent p1 = Exponent::of(2.0);
  std::size_t n1 = 1;
  Exponent p2 = Exponent::of(2.0);
  std::size_t n2 = 1;
  Exponent r = Exponent::of(2.0);
  friend bool operator==(const DirectSumSignature&, const DirectSumSignature&) = default;
};

class SpaceSignature {
 public:
  static SpaceSignature lp(std::size_t n, Exponent p);
  static SpaceSignature lp(std::size_t n, double p) { return lp(n, Exponent::of(p)); }
  static SpaceSignature direct_sum(Exponent p1, std::size_t n1, Exponent p2, std::size_t n2, Exponent r);

  bool is_lp() const noexcept { return std::holds_alternative<LpSignature>(kind_); }
  bool is_direct_sum() const noexcept { return !is_lp(); }
  const LpSignature& as_lp() const;
  const DirectSumSignature& as_direct_sum() const;

  std::size_t dimension() const noexcept;
  /// Same kind of space with the dual exponents (the space the DualFunctional entries are measured in).
  SpaceSignature dual() const;
  /// Same family restricted to dimension m (Lp only).
  SpaceSignature with_dimension(std::size_t m) const;

  std::string describe() const;
  friend bool operator==(const SpaceSignature&, const SpaceSignature&) = default;

 private:
  explicit SpaceSignature(std::variant<LpSignature, DirectSumSignature> k) : kind_(std::move(k)) {}
  std::variant<LpSignature, DirectSumSignature> kind_;
};

struct ComplexVector {
  SpaceSignature space = SpaceSignature::lp(1, 2.0);
  std::vector<cplx> entries;

  ComplexVector() = default;
  ComplexVector(SpaceSignature s, std::vector<cplx> e);
  /// Zero vector of the given space.
  explicit ComplexVector(SpaceSignature s);

  std::size_t size() const noexcept { return entries.size(); }
  cplx operator[](std::size_t i) const { return entries[i]; }
  cplx& operator[](std::size_t i) { return entries[i]; }
  bool is_zero() const noexcept;
};

ComplexVector operator+(const ComplexVector& a, const ComplexVector& b);
ComplexVector operator-(const ComplexVector& a, const ComplexVector& b);
ComplexVector operator*(cplx s, const ComplexVector& a);

/// An element of the dual acting bilinearly: <x, f> = sum_j x_j f_j (no conjugation).
struct DualFunctional {
  SpaceSignature space = SpaceSignature::lp(1, 2.0);  // the predual space
  std::vector<cplx> entries;

  DualFunctional() = default;
  DualFunctional(SpaceSignature s, std::vector<cplx> e);
  std::size_t size() const noexcept { return entries.size(); }
};

/// (sum |z_j|^p)^{1/p}, or max |z_j| for p = inf.
double lp_norm(std::span<const cplx> z, const Exponent& p);

double norm(const ComplexVector& x);
/// Norm of f as an element of the dual space.
double dual_norm(const DualFunctional& f);

/// ContractError on dimension or space mismatch.
cplx pairing(const ComplexVector& x, const DualFunctional& f);

/// Inputs with |norm - 1| above this are rejected by support_functional.
inline constexpr double kUnitTolerance = 1e-10;

/// N_x with <x, N_x> = 1 and Re <y, N_x> < 1 on the open ball.
/// l^p: N_j = |x_j|^{p-2} conj(x_j) (0 at zero entries).
/// Direct sum: (|y|^{r-1} N_{y/|y|}, |z|^{r-1} N_{z/|z|}).
DualFunctional support_functional(const ComplexVector& x);

/// (x_1, ..., x_m, 0, ..., 0) in the same space.
ComplexVector project_head(const ComplexVector& x, std::size_t m);

}  // namespace holomet
