#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hens {

/// Exponent vector of a monomial. Trailing zero exponents are trimmed, so two
/// equal monomials always compare equal regardless of how they were built.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<std::uint32_t> exps) : exps_(std::move(exps)) { trim(); }

  static Monomial variable(std::size_t index, std::uint32_t power = 1) {
    std::vector<std::uint32_t> e(index + 1, 0);
    e[index] = power;
    return Monomial(std::move(e));
  }

  std::uint32_t exponent(std::size_t var) const { return var < exps_.size() ? exps_[var] : 0; }
  std::size_t width() const { return exps_.size(); }
  const std::vector<std::uint32_t>& exponents() const { return exps_; }

  std::uint32_t degree() const {
    std::uint32_t d = 0;
    for (auto e : exps_) d += e;
    return d;
  }

  Monomial operator*(const Monomial& o) const {
    std::vector<std::uint32_t> e(std::max(exps_.size(), o.exps_.size()), 0);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = exponent(i) + o.exponent(i);
    return Monomial(std::move(e));
  }

  /// Graded lexicographic order: total degree first, then exponents.
  friend bool operator<(const Monomial& a, const Monomial& b) {
    auto da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    std::size_t w = std::max(a.width(), b.width());
    for (std::size_t i = 0; i < w; ++i) {
      if (a.exponent(i) != b.exponent(i)) return a.exponent(i) < b.exponent(i);
    }
    return false;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }

 private:
  void trim() {
    while (!exps_.empty() && exps_.back() == 0) exps_.pop_back();
  }
  std::vector<std::uint32_t> exps_;
};

/// Sparse multivariate polynomial with coefficients in `T`.
template <class T = double>
class Polynomial {
 public:
  using Terms = std::map<Monomial, T>;

  Polynomial() = default;
  Polynomial(T constant) {  // NOLINT(google-explicit-constructor)
    if (constant != T(0)) terms_[Monomial{}] = constant;
  }

  static Polynomial variable(std::size_t index) {
    Polynomial p;
    p.terms_[Monomial::variable(index)] = T(1);
    return p;
  }

  static Polynomial monomial(const Monomial& m, T coefficient) {
    Polynomial p;
    if (coefficient != T(0)) p.terms_[m] = coefficient;
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::uint32_t total_degree() const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  /// Number of variables actually referenced (1 + highest index).
  std::size_t width() const {
    std::size_t w = 0;
    for (const auto& [m, c] : terms_) w = std::max(w, m.width());
    return w;
  }

  T coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? T(0) : it->second;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(T s) {
    if (s == T(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= T(-1); }
  friend Polynomial operator*(Polynomial a, T s) { return a *= s; }
  friend Polynomial operator*(T s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  /// Partial derivative with respect to variable `var`.
  Polynomial derivative(std::size_t var) const {
    Polynomial out;
    for (const auto& [m, c] : terms_) {
      auto e = m.exponent(var);
      if (e == 0) continue;
      std::vector<std::uint32_t> exps = m.exponents();
      exps[var] -= 1;
      out.add_term(Monomial(std::move(exps)), c * T(e));
    }
    return out;
  }

  template <class V>
  V evaluate(std::span<const V> values) const {
    if (values.size() < width()) throw std::invalid_argument("polynomial evaluation: too few values");
    V acc = V(0);
    for (const auto& [m, c] : terms_) {
      V term = V(c);
      const auto& e = m.exponents();
      for (std::size_t i = 0; i < e.size(); ++i)
        for (std::uint32_t k = 0; k < e[i]; ++k) term *= values[i];
      acc += term;
    }
    return acc;
  }

  double evaluate(const std::vector<double>& values) const {
    return evaluate<double>(std::span<const double>(values));
  }

  /// Drops coefficients with |c| <= tol.
  Polynomial pruned(double tol) const {
    Polynomial out;
    for (const auto& [m, c] : terms_)
      if (std::abs(c) > tol) out.terms_[m] = c;
    return out;
  }

  /// Rescaled so that the leading (highest graded-lex) coefficient is +1 in sign;
  /// magnitude is divided out only when `unit` is set.
  Polynomial normalized(bool unit = false) const {
    if (terms_.empty()) return *this;
    T lead = terms_.rbegin()->second;
    T s = unit ? T(1) / lead : (lead < T(0) ? T(-1) : T(1));
    return *this * s;
  }

  std::string to_string(const std::vector<std::string>& names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      T mag = c < T(0) ? -c : c;
      if (first) {
        if (c < T(0)) os << "-";
      } else {
        os << (c < T(0) ? " - " : " + ");
      }
      first = false;
      bool has_var = m.degree() > 0;
      if (!has_var || mag != T(1)) {
        os << mag;
        if (has_var) os << "*";
      }
      bool first_var = true;
      for (std::size_t i = 0; i < m.width(); ++i) {
        auto e = m.exponent(i);
        if (e == 0) continue;
        if (!first_var) os << "*";
        first_var = false;
        os << (i < names.size() ? names[i] : "x" + std::to_string(i));
        if (e > 1) os << "^" << e;
      }
    }
    return os.str();
  }

 private:
  void add_term(const Monomial& m, T c) {
    if (c == T(0)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == T(0)) terms_.erase(it);
    }
  }

  Terms terms_;
};

using Poly = Polynomial<double>;

}  // namespace hens
