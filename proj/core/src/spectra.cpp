#include "sectorsym/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sectorsym/errors.hpp"

namespace sectorsym {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr int kDenseLimit = 2000;   // dense solve below this many unknowns
constexpr int kBatch = 8;           // max eigenvalues extracted per slice
constexpr int kLanczosSteps = 220;  // Krylov budget per restart
constexpr int kRestarts = 6;        // deflated restarts per slice
constexpr double kResidTol = 1e-8;  // |A v - lambda M v| / |M v|

struct EigPair {
  double lambda;
  Vec v;  // M-normalized
};

double pencil_scale(const SpMat& A, const Vec& M) {
  double s = 1.0;
  for (int i = 0; i < A.rows(); ++i) s = std::max(s, std::abs(A.coeff(i, i)) / M[i]);
  return s;
}

// Gershgorin bounds for diag(M)^{-1/2} A diag(M)^{-1/2}.
std::pair<double, double> gershgorin(const SpMat& A, const Vec& M) {
  const int n = A.rows();
  Vec diag = Vec::Zero(n), radius = Vec::Zero(n);
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMat::InnerIterator it(A, c); it; ++it) {
      const double v = it.value() / std::sqrt(M[it.row()] * M[it.col()]);
      if (it.row() == it.col())
        diag[it.row()] = v;
      else
        radius[it.row()] += std::abs(v);
    }
  return {(diag - radius).minCoeff(), (diag + radius).maxCoeff()};
}

SpMat shifted(const SpMat& A, const Vec& M, double tau) {
  SpMat S = A;
  for (int i = 0; i < S.rows(); ++i) S.coeffRef(i, i) -= tau * M[i];
  return S;
}

bool factor_ok(const Eigen::SimplicialLDLT<SpMat>& ldlt) {
  if (ldlt.info() != Eigen::Success) return false;
  const auto& d = ldlt.vectorD();
  for (int i = 0; i < d.size(); ++i)
    if (!std::isfinite(d[i]) || std::abs(d[i]) < 1e-300) return false;
  return true;
}

// Exact count of pencil eigenvalues below tau via factorization inertia,
// nudging tau when a pivot lands on an eigenvalue.
int inertia_below(const SpMat& A, const Vec& M, double tau, double scale) {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  double delta = 1e-12 * std::max(std::abs(tau), scale);
  for (int attempt = 0; attempt < 7; ++attempt) {
    const double t = attempt == 0 ? tau : (attempt % 2 == 1 ? tau + delta : tau - delta);
    ldlt.compute(shifted(A, M, t));
    if (factor_ok(ldlt)) {
      int neg = 0;
      const auto& d = ldlt.vectorD();
      for (int i = 0; i < d.size(); ++i)
        if (d[i] < 0.0) ++neg;
      return neg;
    }
    if (attempt % 2 == 0) delta *= 100.0;
  }
  throw ConvergenceFailure("inertia count: factorization failed near tau = " +
                               std::to_string(tau),
                           std::numeric_limits<double>::quiet_NaN());
}

// ----- dense path ---------------------------------------------------------

std::vector<EigPair> dense_smallest(const SpMat& A, const Vec& M, int m) {
  const int n = A.rows();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  const Vec isq = M.cwiseSqrt().cwiseInverse();
  for (int c = 0; c < A.outerSize(); ++c)
    for (SpMat::InnerIterator it(A, c); it; ++it)
      C(it.row(), it.col()) = it.value() * isq[it.row()] * isq[it.col()];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("dense eigensolver failed",
                             std::numeric_limits<double>::quiet_NaN());
  std::vector<EigPair> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i)
    out.push_back({es.eigenvalues()[i], isq.cwiseProduct(es.eigenvectors().col(i))});
  return out;
}

// ----- shift-invert Lanczos on a spectral slice ---------------------------

// Deterministic, platform-independent pseudo-random start vector.
Vec seeded_vector(int n, std::uint64_t seed) {
  std::uint64_t s = seed ^ 0x9e3779b97f4a7c15ULL;
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    // splitmix64 step
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    v[i] = static_cast<double>(z) * 0x1.0p-63 - 1.0;  // in [-1, 1)
  }
  return v;
}

class SliceSolver {
 public:
  SliceSolver(const SpMat& A, const Vec& M)
      : A_(A), M_(M), n_(static_cast<int>(M.size())), scale_(pencil_scale(A, M)) {}

  // The m smallest pencil eigenvalues, ascending.
  std::vector<EigPair> smallest(int m) {
    std::vector<EigPair> out;
    if (m <= 0) return out;
    auto [glo, ghi] = gershgorin(A_, M_);
    const double width = std::max(ghi - glo, 1e-9 * scale_);
    double lo = glo - 1e-6 * width;
    double hi = ghi + 1e-6 * width;

    // Tighten hi onto the m-th eigenvalue so slices stay small.  Stop as
    // soon as the excess count fits one extraction batch: each factorization
    // costs as much as many Lanczos steps.
    double a = lo, b = hi;
    int cb = n_;
    for (int iter = 0;
         iter < 80 && (b - a) > 1e-10 * width && cb > std::min(m + 4, kBatch);
         ++iter) {
      const double mid = 0.5 * (a + b);
      const int c = count_below(mid);
      if (c >= m) {
        b = mid;
        cb = c;
      } else {
        a = mid;
      }
    }
    solve_slice(lo, b, 0, cb, 0, out);
    std::sort(out.begin(), out.end(),
              [](const EigPair& x, const EigPair& y) { return x.lambda < y.lambda; });
    if (static_cast<int>(out.size()) < m)
      throw ConvergenceFailure("eigensolver: slice extraction incomplete",
                               std::numeric_limits<double>::quiet_NaN());
    out.resize(m);
    return out;
  }

  int count_below(double tau) { return inertia_below(A_, M_, tau, scale_); }

 private:
  void solve_slice(double a, double b, int ca, int cb, int depth,
                   std::vector<EigPair>& out) {
    const int want = cb - ca;
    if (want <= 0) return;
    if (depth > 48)
      throw ConvergenceFailure("eigensolver: slice recursion too deep",
                               std::numeric_limits<double>::quiet_NaN());
    const bool tight = (b - a) <= 1e-12 * std::max(1.0, std::abs(b));
    if (want <= kBatch || tight) {
      if (extract(a, b, want, tight ? 3 * kRestarts : kRestarts, out)) return;
      if (tight)
        throw ConvergenceFailure(
            "eigensolver: cluster of " + std::to_string(want) +
                " eigenvalues near " + std::to_string(b) + " did not converge",
            best_resid_);
    }
    const double mid = 0.5 * (a + b);
    const int cm = count_below(mid);
    solve_slice(a, mid, ca, cm, depth + 1, out);
    solve_slice(mid, b, cm, cb, depth + 1, out);
  }

  double m_dot(const Vec& x, const Vec& y) const {
    return x.dot(M_.cwiseProduct(y));
  }

  // Extract the `want` eigenvalues lying in (a, b]; false = caller splits.
  bool extract(double a, double b, int want, int restarts,
               std::vector<EigPair>& out) {
    const double sigma =
        a - 0.05 * std::max(b - a, 1e-10 * std::max(1.0, std::abs(a)));
    Eigen::SimplicialLDLT<SpMat> ldlt;
    {
      double s = sigma;
      double delta = 1e-12 * std::max(std::abs(sigma), scale_);
      bool ok = false;
      for (int attempt = 0; attempt < 7 && !ok; ++attempt) {
        ldlt.compute(shifted(A_, M_, s));
        ok = factor_ok(ldlt);
        if (!ok) {
          s = attempt % 2 == 0 ? sigma - delta : sigma + delta;
          delta *= 100.0;
        }
      }
      if (!ok) return false;
    }

    const double slack = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
    std::vector<EigPair> found;  // deflation set, window or not
    auto in_window = [&](double lam) { return lam > a - slack && lam <= b + slack; };
    auto window_count = [&]() {
      int c = 0;
      for (const auto& p : found)
        if (in_window(p.lambda)) ++c;
      return c;
    };

    for (int restart = 0; restart < restarts; ++restart) {
      if (window_count() >= want) break;
      const std::size_t found_before = found.size();

      Vec q = seeded_vector(n_, 0x5ec70253u + 1000003u * restart + n_);
      for (const auto& p : found) q -= m_dot(q, p.v) * p.v;
      double qn = std::sqrt(m_dot(q, q));
      if (!(qn > 1e-14)) continue;
      q /= qn;

      std::vector<Vec> basis{q};
      std::vector<double> alpha, beta;
      for (int step = 0; step < kLanczosSteps; ++step) {
        Vec w = ldlt.solve(M_.cwiseProduct(basis.back()));
        const double al = m_dot(w, basis.back());
        alpha.push_back(al);
        w -= al * basis.back();
        if (step > 0) w -= beta.back() * basis[basis.size() - 2];
        for (int pass = 0; pass < 2; ++pass) {
          for (const auto& qb : basis) w -= m_dot(w, qb) * qb;
          for (const auto& p : found) w -= m_dot(w, p.v) * p.v;
        }
        const double bnorm = std::sqrt(std::max(m_dot(w, w), 0.0));
        const bool last = step == kLanczosSteps - 1 || bnorm < 1e-13;
        if (step % 8 == 7 || last) {
          harvest(basis, alpha, beta, bnorm, sigma, found);
          if (window_count() >= want) break;
        }
        if (bnorm < 1e-13) break;  // invariant subspace exhausted
        beta.push_back(bnorm);
        basis.push_back(w / bnorm);
      }
      if (window_count() >= want) break;
      if (found.size() == found_before) break;  // no progress; splitting helps more
    }

    if (window_count() < want) return false;
    int copied = 0;
    for (auto& p : found)
      if (in_window(p.lambda) && copied < want) {
        out.push_back(std::move(p));
        ++copied;
      }
    return true;
  }

  // Converged Ritz pairs of the current tridiagonal, folded back to the
  // pencil, deflation-orthogonalized and residual-verified.  All converged
  // pairs are kept for deflation, in-window or not.
  void harvest(const std::vector<Vec>& basis, const std::vector<double>& alpha,
               const std::vector<double>& beta, double next_beta, double sigma,
               std::vector<EigPair>& found) {
    const int s = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(s, s);
    for (int i = 0; i < s; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < s) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double tscale = std::max({std::abs(es.eigenvalues()[0]),
                                    std::abs(es.eigenvalues()[s - 1]), 1.0});
    for (int i = s - 1; i >= 0; --i) {  // largest theta = closest to sigma first
      const double theta = es.eigenvalues()[i];
      if (theta <= 1e-14 * tscale) break;  // below sigma or noise
      // Classical Lanczos estimate: |T s - theta s| = next_beta * |s_last|.
      const double ritz_est = next_beta * std::abs(es.eigenvectors()(s - 1, i));
      if (ritz_est > 1e-9 * tscale) continue;  // cheap filter
      const double lam = sigma + 1.0 / theta;
      Vec x = Vec::Zero(n_);
      for (int jj = 0; jj < s; ++jj) x += es.eigenvectors()(jj, i) * basis[jj];
      for (const auto& p : found) x -= m_dot(x, p.v) * p.v;
      const double xn = std::sqrt(m_dot(x, x));
      if (!(xn > 1e-8)) continue;  // duplicate of a deflated pair
      x /= xn;
      const Vec Mx = M_.cwiseProduct(x);
      const double resid = (A_ * x - lam * Mx).norm() / Mx.norm();
      best_resid_ = std::min(best_resid_, resid);
      if (resid < kResidTol) found.push_back({lam, std::move(x)});
    }
  }

  const SpMat& A_;
  const Vec& M_;
  int n_;
  double scale_;
  double best_resid_ = std::numeric_limits<double>::infinity();
};

std::vector<EigPair> smallest_pairs(const SpMat& A, const Vec& M, int m) {
  const int n = static_cast<int>(M.size());
  m = std::min(m, n);
  if (m <= 0) return {};
  if (n <= kDenseLimit) return dense_smallest(A, M, m);
  SliceSolver solver(A, M);
  return solver.smallest(m);
}

// Orthonormalize (in the M inner product) within clusters of nearly equal
// eigenvalues; distinct eigenvalues are already orthogonal to residual level.
void orthonormalize_clusters(std::vector<EigPair>& pairs, const Vec& M) {
  const auto mdot = [&](const Vec& x, const Vec& y) {
    return x.dot(M.cwiseProduct(y));
  };
  double scale = 1.0;
  for (const auto& p : pairs) scale = std::max(scale, std::abs(p.lambda));
  std::size_t lo = 0;
  while (lo < pairs.size()) {
    std::size_t hi = lo + 1;
    while (hi < pairs.size() &&
           pairs[hi].lambda - pairs[hi - 1].lambda < 1e-7 * scale)
      ++hi;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = lo; j < i; ++j)
        pairs[i].v -= mdot(pairs[i].v, pairs[j].v) * pairs[j].v;
      pairs[i].v /= std::sqrt(mdot(pairs[i].v, pairs[i].v));
    }
    lo = hi;
  }
}

// ----- folding onto one angular wedge (k-invariant subspace) --------------

struct Folded {
  SpMat A;
  Vec M;
  int p = 0;  // spokes per wedge
};

Folded fold_k(const PolarGrid& g, const OperatorMatrix& op, int k) {
  if (k < 1 || g.n_theta % k != 0)
    throw IncompatibleSymmetry("k-invariant fold: n_theta=" +
                               std::to_string(g.n_theta) +
                               " not divisible by k=" + std::to_string(k));
  Folded f;
  f.p = g.n_theta / k;
  const int nred = g.n_r * f.p;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nred) * 5);
  for (int c = 0; c < op.A.outerSize(); ++c)
    for (SpMat::InnerIterator it(op.A, c); it; ++it) {
      const int row = static_cast<int>(it.row());
      const int i1 = g.ring_of(row), j1 = g.spoke_of(row);
      if (j1 >= f.p) continue;
      const int col = static_cast<int>(it.col());
      const int i2 = g.ring_of(col), j2 = g.spoke_of(col) % f.p;
      trips.emplace_back(i1 * f.p + j1, i2 * f.p + j2, it.value());
    }
  f.A.resize(nred, nred);
  f.A.setFromTriplets(trips.begin(), trips.end());
  f.A.makeCompressed();
  f.M.resize(nred);
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < f.p; ++j) f.M[i * f.p + j] = g.weight(i);
  return f;
}

Field lift_from_wedge(const PolarGrid& g, const Vec& v, int p, int k) {
  Field out(g);
  const double s = 1.0 / std::sqrt(static_cast<double>(k));
  for (int i = 0; i < g.n_r; ++i)
    for (int j = 0; j < g.n_theta; ++j) out.at(i, j) = s * v[i * p + j % p];
  return out;
}

void fix_sign(Field& f) {
  int arg = 0;
  double best = -1.0;
  for (int n = 0; n < f.size(); ++n) {
    const double a = std::abs(f.v[n]);
    if (a > best) {
      best = a;
      arg = n;
    }
  }
  if (f.v[arg] < 0.0) f.v = -f.v;
}

}  // namespace

std::string to_string(const Subspace& s) {
  switch (s.kind) {
    case Subspace::Kind::Full: return "Full";
    case Subspace::Kind::KInvariant: return "KInvariant(" + std::to_string(s.k) + ")";
    case Subspace::Kind::Sector: return "Sector";
  }
  return "?";
}

int eigenvalue_count_below(const OperatorMatrix& op, double tau) {
  return inertia_below(op.A, op.mass, tau, pencil_scale(op.A, op.mass));
}

SpectrumResult smallest_eigs(const PolarGrid& g, const OperatorMatrix& op, int m,
                             const Subspace& sub) {
  SpectrumResult res;
  res.subspace = sub;

  std::vector<EigPair> pairs;
  if (sub.kind == Subspace::Kind::KInvariant && sub.k > 1) {
    if (!op.mask.whole_domain)
      throw MaskMismatch("smallest_eigs: k-invariant subspace needs a whole-domain operator");
    Folded f = fold_k(g, op, sub.k);
    pairs = smallest_pairs(f.A, f.M, m);
    orthonormalize_clusters(pairs, f.M);
    for (auto& p : pairs) {
      res.eigenvalues.push_back(p.lambda);
      Field lifted = lift_from_wedge(g, p.v, f.p, sub.k);
      fix_sign(lifted);
      res.eigenfields.push_back(std::move(lifted));
    }
  } else {
    if (sub.kind != Subspace::Kind::Sector && !op.mask.whole_domain)
      throw MaskMismatch("smallest_eigs: Full subspace needs a whole-domain operator");
    pairs = smallest_pairs(op.A, op.mass, m);
    orthonormalize_clusters(pairs, op.mass);
    for (auto& p : pairs) {
      res.eigenvalues.push_back(p.lambda);
      Field f(op.mask.n_r, op.mask.n_theta);
      for (int a = 0; a < op.n(); ++a) f.v[op.mask.nodes[a]] = p.v[a];
      fix_sign(f);
      res.eigenfields.push_back(std::move(f));
    }
  }

  double lam_scale = 1.0;
  for (double lam : res.eigenvalues) lam_scale = std::max(lam_scale, std::abs(lam));
  res.zero_tol = 1e-3 * lam_scale;
  return res;
}

double default_zero_tol(const Field& V) {
  return 1e-3 * std::max(1.0, V.v.lpNorm<Eigen::Infinity>());
}

MorseCount morse_index(const PolarGrid& g, const Field& u, const Nonlinearity& nl,
                       int k, double zero_tol) {
  if (k < 1 || g.n_theta % k != 0)
    throw IncompatibleSymmetry("morse_index: n_theta=" + std::to_string(g.n_theta) +
                               " not divisible by k=" + std::to_string(k));
  if (k > 1) {
    const double defect = k_invariance_defect(g, u, k);
    const double scale = std::max(1.0, u.v.lpNorm<Eigen::Infinity>());
    if (defect > 1e-8 * scale)
      throw NotKInvariant("morse_index: field deviates from k-fold symmetry by " +
                          std::to_string(defect));
  }
  const Field V = eval_fp(g, nl, u);
  MorseCount out;
  out.zero_tol = zero_tol > 0.0 ? zero_tol : default_zero_tol(V);

  const OperatorMatrix op = with_potential(build_laplacian(g, full_mask(g)), V);
  const SpMat* A = &op.A;
  const Vec* M = &op.mass;
  Folded folded;
  if (k > 1) {
    folded = fold_k(g, op, k);
    A = &folded.A;
    M = &folded.M;
  }
  const double scale = pencil_scale(*A, *M);
  const int below_minus = inertia_below(*A, *M, -out.zero_tol, scale);
  const int below_plus = inertia_below(*A, *M, out.zero_tol, scale);
  out.negative = below_minus;
  out.marginal = below_plus - below_minus;
  return out;
}

std::pair<double, Field> sector_lambda1(const PolarGrid& g, const Field& u,
                                        const Nonlinearity& nl,
                                        const SectorSpec& spec) {
  if (spec.part == SectorPart::Double)
    throw ConfigError("sector_lambda1: part must be Plus or Minus");
  const Field V = eval_fp(g, nl, u);
  const NodeMask mask = sector_mask(g, spec);
  const OperatorMatrix op = with_potential(build_laplacian(g, mask), V);
  auto pairs = smallest_pairs(op.A, op.mass, 1);
  Field f(g.n_r, g.n_theta);
  for (int a = 0; a < op.n(); ++a) f.v[mask.nodes[a]] = pairs[0].v[a];
  fix_sign(f);
  return {pairs[0].lambda, std::move(f)};
}

}  // namespace sectorsym
