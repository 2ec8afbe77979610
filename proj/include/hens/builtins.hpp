#pragma once

// Built-in algebras: Heisenberg, abelian, the surface families and the contact
// normal forms. Basis order is the grade order: D0 first, then V1, V2, ...

#include "hens/algebra.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hens {

inline GradedAlgebra heisenberg1() {
  return GradedAlgebra("heisenberg1", {{"V1", 2}, {"V2", 1}}, {{0, 1, 2, 1.0}}, Mat::Identity(2, 2));
}

/// Heisenberg algebra extended by a rotation generator X0 acting on D:
/// [X0,X1] = X2, [X0,X2] = -X1, [X1,X2] = X3.
inline GradedAlgebra heisenberg_so2() {
  Mat q(2, 2);
  q << 0, -1, 1, 0;
  return GradedAlgebra("heisenberg_so2", {{"D0", 1}, {"V1", 2}, {"V2", 1}},
                       {{0, 1, 2, 1.0}, {0, 2, 1, -1.0}, {1, 2, 3, 1.0}}, Mat::Identity(2, 2), {q});
}

inline GradedAlgebra abelian(int n) {
  if (n <= 0) throw DimensionError("abelian: dimension must be positive");
  return GradedAlgebra("abelian(" + std::to_string(n) + ")", {{"V1", n}}, {}, Mat::Identity(n, n));
}

/// Step-3 filiform algebra: [e1,e2] = e3, [e1,e3] = e4.
inline GradedAlgebra filiform4() {
  return GradedAlgebra("filiform4", {{"V1", 2}, {"V2", 1}, {"V3", 1}}, {{0, 1, 2, 1.0}, {0, 2, 3, 1.0}},
                       Mat::Identity(2, 2));
}

/// Three-dimensional surface family with isotropy X0:
/// [X0,X1] = a X2, [X0,X2] = -a X1, [X1,X2] = b X0 + c X1 + d X2.
/// Only c = d = 0 gives a Lie algebra when a != 0.
inline GradedAlgebra so3_surface(double a, double b, double c = 0.0, double d = 0.0) {
  Mat q(2, 2);
  q << 0, -a, a, 0;
  std::vector<Mat> rep;
  if (a != 0.0) rep.push_back(q);
  std::ostringstream name;
  name << "so3_surface(" << a << "," << b;
  if (c != 0.0 || d != 0.0) name << "," << c << "," << d;
  name << ")";
  GradedAlgebra alg(name.str(), {{"D0", 1}, {"V1", 2}},
                    {{0, 1, 2, a}, {0, 2, 1, -a}, {1, 2, 0, b}, {1, 2, 1, c}, {1, 2, 2, d}},
                    Mat::Identity(2, 2), rep);
  return alg.with_label("curvature", std::abs(a * b));
}

/// Two-dimensional family [X1,X2] = a X1 + b X2.
inline GradedAlgebra neg_surface(double a, double b) {
  std::ostringstream name;
  name << "neg_surface(" << a << "," << b << ")";
  GradedAlgebra alg(name.str(), {{"V1", 2}}, {{0, 1, 0, a}, {0, 1, 1, b}}, Mat::Identity(2, 2));
  return alg.with_label("curvature", -std::sqrt(a * a + b * b));
}

/// Contact normal form on span{X1,X2,X3} (indices 0,1,2):
/// [X1,X2] = X3,
/// [X2,X3] = rho cos^2 phi X1 + rho sin phi cos phi X2 + gamma cos phi X3,
/// [X3,X1] = rho sin phi cos phi X1 + rho sin^2 phi X2 + gamma sin phi X3.
inline GradedAlgebra contact3(double rho, double phi, double gamma) {
  const double c = std::cos(phi), s = std::sin(phi);
  std::ostringstream name;
  name.precision(17);
  name << "contact3(" << rho << "," << phi << "," << gamma << ")";
  return GradedAlgebra(name.str(), {{"V1", 2}, {"V2", 1}},
                       {{0, 1, 2, 1.0},
                        {1, 2, 0, rho * c * c},
                        {1, 2, 1, rho * s * c},
                        {1, 2, 2, gamma * c},
                        {2, 0, 0, rho * s * c},
                        {2, 0, 1, rho * s * s},
                        {2, 0, 2, gamma * s}},
                       Mat::Identity(2, 2))
      .with_label("rho", rho)
      .with_label("phi", phi)
      .with_label("gamma", gamma);
}

/// Four-dimensional contact family on span{X0,X1,X2,X3}, X0 spanning D0:
/// [X0,X1] = a X2, [X0,X2] = -a X1, [X0,X3] = 0, [X1,X2] = b12 X0 + e12 X3,
/// [X1,X3] = d X2, [X2,X3] = -d X1, metric diag(lambda1, lambda2) on D.
inline GradedAlgebra contact4(double lambda1, double lambda2, double b12, double d, double e12, double a = 1.0) {
  Mat q(2, 2);
  q << 0, -a, a, 0;
  Mat g = Mat::Zero(2, 2);
  g(0, 0) = lambda1;
  g(1, 1) = lambda2;
  std::ostringstream name;
  name.precision(17);
  name << "contact4(" << lambda1 << "," << lambda2 << "," << b12 << "," << d << "," << e12;
  if (a != 1.0) name << "," << a;
  name << ")";
  std::vector<Mat> rep;
  if (a != 0.0) rep.push_back(q);
  return GradedAlgebra(name.str(), {{"D0", 1}, {"V1", 2}, {"V2", 1}},
                       {{0, 1, 2, a},
                        {0, 2, 1, -a},
                        {1, 2, 0, b12},
                        {1, 2, 3, e12},
                        {1, 3, 2, d},
                        {2, 3, 1, -d}},
                       g, rep)
      .with_label("lambda1", lambda1)
      .with_label("lambda2", lambda2)
      .with_label("b12", b12)
      .with_label("d", d)
      .with_label("e12", e12)
      .with_note("b12 does not enter the invariants (d*e12/lambda1, lambda2/lambda1); "
                 "it drops out once the metric is factored by the isotropy action");
}

/// Parses "name" or "name(a,b,...)"; empty if `spec` is not a built-in name.
inline std::optional<GradedAlgebra> parse_builtin(const std::string& spec) {
  std::string name = spec;
  std::vector<double> args;
  auto open = spec.find('(');
  if (open != std::string::npos) {
    if (spec.back() != ')') throw DomainError("malformed built-in spec '" + spec + "'");
    name = spec.substr(0, open);
    std::string inner = spec.substr(open + 1, spec.size() - open - 2);
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(tok, &used));
        while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw DomainError("malformed built-in argument '" + tok + "' in '" + spec + "'");
      }
    }
  }
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw DomainError("built-in '" + name + "' takes " + std::to_string(lo) +
                        (lo == hi ? "" : "-" + std::to_string(hi)) + " arguments");
    }
  };
  auto arg = [&](std::size_t i, double dflt) { return i < args.size() ? args[i] : dflt; };
  if (name == "heisenberg1") {
    need(0, 0);
    return heisenberg1();
  } else if (name == "heisenberg_so2") {
    need(0, 0);
    return heisenberg_so2();
  } else if (name == "filiform4") {
    need(0, 0);
    return filiform4();
  } else if (name == "abelian") {
    need(1, 1);
    return abelian(static_cast<int>(args[0]));
  } else if (name == "so3_surface") {
    need(2, 4);
    return so3_surface(args[0], args[1], arg(2, 0.0), arg(3, 0.0));
  } else if (name == "neg_surface") {
    need(2, 2);
    return neg_surface(args[0], args[1]);
  } else if (name == "contact3") {
    need(3, 3);
    return contact3(args[0], args[1], args[2]);
  } else if (name == "contact4") {
    need(5, 6);
    return contact4(args[0], args[1], args[2], args[3], args[4], arg(5, 1.0));
  }
  return std::nullopt;
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "heisenberg1",       "heisenberg_so2",          "filiform4",
      "abelian(n)",        "so3_surface(a,b[,c,d])", "neg_surface(a,b)",
      "contact3(rho,phi,gamma)", "contact4(lambda1,lambda2,b12,d,e12[,a])"};
  return names;
}

}  // namespace hens
