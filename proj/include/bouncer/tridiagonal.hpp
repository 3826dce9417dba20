#pragma once

// Eigenpairs of a real symmetric tridiagonal matrix: bisection on Sturm
// sequence counts for eigenvalues, inverse iteration for eigenvectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "bouncer/error.hpp"

namespace bouncer::tridiag {

template <typename Real>
struct SymmetricTridiagonal {
  std::vector<Real> diag;
  std::vector<Real> off;  // off[i] couples rows i and i+1

  std::size_t size() const { return diag.size(); }
};

template <typename Real>
Real pivot_floor(const SymmetricTridiagonal<Real>& t) {
  Real emax = 1;
  for (Real e : t.off) emax = std::max(emax, e * e);
  return std::numeric_limits<Real>::min() * emax;
}

/// Number of eigenvalues strictly below `x`.
template <typename Real>
std::size_t sturm_count(const SymmetricTridiagonal<Real>& t, Real x, Real pivmin) {
  const std::size_t n = t.size();
  std::size_t count = 0;
  Real q = t.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

template <typename Real>
std::pair<Real, Real> gershgorin_bounds(const SymmetricTridiagonal<Real>& t) {
  const std::size_t n = t.size();
  Real lo = std::numeric_limits<Real>::max();
  Real hi = std::numeric_limits<Real>::lowest();
  for (std::size_t i = 0; i < n; ++i) {
    Real r = 0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const Real pad = std::numeric_limits<Real>::epsilon() * std::max(std::abs(lo), std::abs(hi)) * 4;
  return {lo - pad, hi + pad};
}

/// k-th smallest eigenvalue (0-based), bisected to a few ulps.
template <typename Real>
Real bisect_eigenvalue(const SymmetricTridiagonal<Real>& t, std::size_t k) {
  require(k < t.size(), ErrorKind::InvalidArgument, "eigenvalue index exceeds matrix order");
  const Real pivmin = pivot_floor(t);
  auto [lo, hi] = gershgorin_bounds(t);
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int it = 0; it < 400; ++it) {
    const Real mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin) break;
    if (sturm_count(t, mid, pivmin) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

namespace detail {

// LU factorization with partial pivoting of (T - shift I), LAPACK gttrf layout.
template <typename Real>
struct ShiftedLU {
  std::vector<Real> dl, d, du, du2;
  std::vector<unsigned char> swapped;

  ShiftedLU(const SymmetricTridiagonal<Real>& t, Real shift, Real tiny) {
    const std::size_t n = t.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    dl = t.off;
    du = t.off;
    du2.assign(n > 2 ? n - 2 : 0, Real(0));
    swapped.assign(n > 0 ? n - 1 : 0, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (std::abs(d[i]) < tiny) d[i] = tiny;
        const Real fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const Real fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const Real temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n > 0 && std::abs(d[n - 1]) < tiny) d[n - 1] = tiny;
  }

  void solve(std::span<Real> b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const Real temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n >= 2 ? n - 2 : 0; i-- > 0;) {
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
  }
};

template <typename Real>
Real norm2(std::span<const Real> v) {
  Real s = 0;
  for (Real x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

/// Unit eigenvector for `eigenvalue`, orthogonalised against `previous`
/// (unit vectors of the same order).
template <typename Real>
std::vector<Real> inverse_iteration(const SymmetricTridiagonal<Real>& t, Real eigenvalue,
                                    std::span<const std::vector<Real>> previous = {},
                                    int iterations = 4) {
  const std::size_t n = t.size();
  Real scale = 0;
  for (Real v : t.diag) scale = std::max(scale, std::abs(v));
  for (Real v : t.off) scale = std::max(scale, std::abs(v));
  const Real tiny = std::numeric_limits<Real>::epsilon() * std::max(scale, Real(1));
  const detail::ShiftedLU<Real> lu(t, eigenvalue, tiny);

  std::vector<Real> x(n);
  // Deterministic start vector with components along every eigenvector.
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = Real(1) + Real(0.25) * std::sin(Real(0.7) * static_cast<Real>(i) + Real(0.3));
  }
  auto orthonormalize = [&] {
    for (const auto& p : previous) {
      Real dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += p[i] * x[i];
      for (std::size_t i = 0; i < n; ++i) x[i] -= dot * p[i];
    }
    const Real nrm = detail::norm2<Real>(x);
    require(nrm > 0 && std::isfinite(nrm), ErrorKind::SolverConsistency,
            "inverse iteration collapsed to a zero vector");
    for (Real& v : x) v /= nrm;
  };
  orthonormalize();
  for (int it = 0; it < iterations; ++it) {
    lu.solve(x);
    orthonormalize();
  }
  return x;
}

}  // namespace bouncer::tridiag
