#include "sectorsym/nonlinearity.hpp"

#include <cmath>

#include "sectorsym/errors.hpp"

namespace sectorsym {

namespace {

constexpr double kExpSafe = 700.0;  // exp argument magnitude limit

void check_exp_range(double s, const char* where) {
  if (std::abs(s) > kExpSafe)
    throw Overflow(std::string(where) + ": |s| = " + std::to_string(std::abs(s)) +
                   " exceeds the exponential-safe range 700");
}

}  // namespace

std::string to_string(NonlinKind k) {
  switch (k) {
    case NonlinKind::LaneEmden: return "LaneEmden";
    case NonlinKind::Henon: return "Henon";
    case NonlinKind::Gelfand: return "Gelfand";
    case NonlinKind::SinhPoisson: return "SinhPoisson";
  }
  return "?";
}

NonlinKind nonlin_kind_from_string(const std::string& s) {
  if (s == "LaneEmden") return NonlinKind::LaneEmden;
  if (s == "Henon") return NonlinKind::Henon;
  if (s == "Gelfand") return NonlinKind::Gelfand;
  if (s == "SinhPoisson") return NonlinKind::SinhPoisson;
  throw ConfigError("nonlinearity.kind: unknown kind \"" + s +
                    "\" (expected LaneEmden, Henon, Gelfand, or SinhPoisson)");
}

void Nonlinearity::validate() const {
  if (kind == NonlinKind::LaneEmden || kind == NonlinKind::Henon) {
    if (!(p > 1.0)) throw ConfigError("nonlinearity.p: must be > 1");
  }
  if (!(alpha >= 0.0)) throw ConfigError("nonlinearity.alpha: must be >= 0");
  if (kind == NonlinKind::Gelfand && !(lambda > 0.0))
    throw ConfigError("nonlinearity.lambda: must be > 0");
  if (kind == NonlinKind::SinhPoisson && !(eps > 0.0))
    throw ConfigError("nonlinearity.eps: must be > 0");
}

double Nonlinearity::f(double r, double s) const {
  switch (kind) {
    case NonlinKind::LaneEmden:
      return std::pow(std::abs(s), p - 1.0) * s;
    case NonlinKind::Henon:
      return std::pow(r, alpha) * std::pow(std::abs(s), p - 1.0) * s;
    case NonlinKind::Gelfand:
      check_exp_range(s, "eval_f");
      return lambda * std::pow(r, alpha) * std::exp(s);
    case NonlinKind::SinhPoisson:
      check_exp_range(s, "eval_f");
      return eps * std::pow(r, alpha) * (std::exp(s) - std::exp(-s));
  }
  return 0.0;
}

double Nonlinearity::fp(double r, double s) const {
  switch (kind) {
    case NonlinKind::LaneEmden:
      return p * std::pow(std::abs(s), p - 1.0);
    case NonlinKind::Henon:
      return std::pow(r, alpha) * p * std::pow(std::abs(s), p - 1.0);
    case NonlinKind::Gelfand:
      check_exp_range(s, "eval_fp");
      return lambda * std::pow(r, alpha) * std::exp(s);
    case NonlinKind::SinhPoisson:
      check_exp_range(s, "eval_fp");
      return eps * std::pow(r, alpha) * (std::exp(s) + std::exp(-s));
  }
  return 0.0;
}

double Nonlinearity::F(double r, double s) const {
  switch (kind) {
    case NonlinKind::LaneEmden:
      return std::pow(std::abs(s), p + 1.0) / (p + 1.0);
    case NonlinKind::Henon:
      return std::pow(r, alpha) * std::pow(std::abs(s), p + 1.0) / (p + 1.0);
    case NonlinKind::Gelfand:
      check_exp_range(s, "eval_F");
      return lambda * std::pow(r, alpha) * (std::exp(s) - 1.0);
    case NonlinKind::SinhPoisson:
      check_exp_range(s, "eval_F");
      return eps * std::pow(r, alpha) * (std::exp(s) + std::exp(-s) - 2.0);
  }
  return 0.0;
}

bool Nonlinearity::f_convex() const {
  // Convexity of f(r, .) used for positive-solution arguments: the
  // exponential kind is convex everywhere, the odd kinds only on s >= 0.
  return true;
}

bool Nonlinearity::fp_convex() const {
  switch (kind) {
    case NonlinKind::LaneEmden:
    case NonlinKind::Henon:
      return p >= 2.0;
    case NonlinKind::Gelfand:
    case NonlinKind::SinhPoisson:
      return true;
  }
  return false;
}

Nonlinearity make_lane_emden(double p) {
  Nonlinearity nl;
  nl.kind = NonlinKind::LaneEmden;
  nl.p = p;
  nl.validate();
  return nl;
}

Nonlinearity make_henon(double p, double alpha) {
  Nonlinearity nl;
  nl.kind = NonlinKind::Henon;
  nl.p = p;
  nl.alpha = alpha;
  nl.validate();
  return nl;
}

Nonlinearity make_gelfand(double lambda, double alpha) {
  Nonlinearity nl;
  nl.kind = NonlinKind::Gelfand;
  nl.lambda = lambda;
  nl.alpha = alpha;
  nl.validate();
  return nl;
}

Nonlinearity make_sinh_poisson(double eps, double alpha) {
  Nonlinearity nl;
  nl.kind = NonlinKind::SinhPoisson;
  nl.eps = eps;
  nl.alpha = alpha;
  nl.validate();
  return nl;
}

namespace {

template <typename Fn>
Field map_field(const PolarGrid& g, const Field& u, Fn&& fn) {
  if (u.n_r != g.n_r || u.n_theta != g.n_theta)
    throw MaskMismatch("nonlinearity evaluation: field shape mismatch");
  Field out(g);
  for (int i = 0; i < g.n_r; ++i) {
    const double r = g.r[i];
    for (int j = 0; j < g.n_theta; ++j) out.at(i, j) = fn(r, u.at(i, j));
  }
  return out;
}

}  // namespace

Field eval_f(const PolarGrid& g, const Nonlinearity& nl, const Field& u) {
  return map_field(g, u, [&](double r, double s) { return nl.f(r, s); });
}

Field eval_fp(const PolarGrid& g, const Nonlinearity& nl, const Field& u) {
  return map_field(g, u, [&](double r, double s) { return nl.fp(r, s); });
}

Field eval_F(const PolarGrid& g, const Nonlinearity& nl, const Field& u) {
  return map_field(g, u, [&](double r, double s) { return nl.F(r, s); });
}

namespace {

// 16-point Gauss-Legendre abscissae (positive half) and weights on [-1, 1].
constexpr int kGlPairs = 8;
constexpr double kGlX[kGlPairs] = {
    0.09501250983763744, 0.28160355077925891, 0.45801677765722739,
    0.61787624440264375, 0.75540440835500303, 0.86563120238783174,
    0.94457502307323258, 0.98940093499164993};
constexpr double kGlW[kGlPairs] = {
    0.18945061045506850, 0.18260341504492359, 0.16915651939500254,
    0.14959598881657673, 0.12462897125553387, 0.09515851168249278,
    0.06225352393864789, 0.02715245941175409};

}  // namespace

std::pair<Field, Field> comparison_potentials(const PolarGrid& g,
                                              const Nonlinearity& nl,
                                              const Field& u, const Direction& e) {
  if (u.n_r != g.n_r || u.n_theta != g.n_theta)
    throw MaskMismatch("comparison_potentials: field shape mismatch");
  Field ve(g), ves(g);
  for (int n = 0; n < g.size(); ++n) {
    const int i = g.ring_of(n);
    const double r = g.r[i];
    const double a = u.v[n];
    const double b = u.v[reflect_node(g, e, n)];

    // Every expression below is bitwise unchanged under swapping a and b,
    // so the potentials are exactly reflection symmetric.
    ves.v[n] = 0.5 * (nl.fp(r, a) + nl.fp(r, b));

    const double gap = std::abs(b - a);
    if (gap > 1e-4 * (1.0 + std::abs(a) + std::abs(b))) {
      ve.v[n] = (nl.f(r, b) - nl.f(r, a)) / (b - a);
    } else {
      // Average of f' over the segment by paired Gauss quadrature.
      double acc = 0.0;
      for (int q = 0; q < kGlPairs; ++q) {
        const double c0 = 0.5 * (1.0 - kGlX[q]);
        const double c1 = 0.5 * (1.0 + kGlX[q]);
        const double term = nl.fp(r, c0 * a + c1 * b) + nl.fp(r, c1 * a + c0 * b);
        acc += 0.5 * kGlW[q] * term;
      }
      ve.v[n] = acc;
    }
  }
  return {std::move(ve), std::move(ves)};
}

}  // namespace sectorsym
