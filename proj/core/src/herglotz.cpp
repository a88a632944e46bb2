#include "reflectionless/herglotz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "reflectionless/error.hpp"

namespace refl {

namespace {

/// m -> (A m + B) / (C m + D)
struct Mobius {
  cplx A{1.0}, B{0.0}, C{0.0}, D{1.0};
};

Mobius compose(const Mobius& f, const Mobius& g) {
  return {f.A * g.A + f.B * g.C, f.A * g.B + f.B * g.D, f.C * g.A + f.D * g.C,
          f.C * g.B + f.D * g.D};
}

Mobius strip_map(double a, double b, cplx z) { return {0.0, 1.0, -a * a, b - z}; }

/// p-fold stripping map of the background half-line at `cut_site`.
Mobius period_map(const Background& bg, Side side, long cut_site, cplx z) {
  const auto p = static_cast<long>(bg.period());
  Mobius out;
  if (side == Side::Right) {
    const long s = cut_site + 1;
    for (long k = s; k < s + p; ++k) out = compose(out, strip_map(bg.a(k), bg.b(k), z));
  } else {
    const long e = cut_site - 1;
    for (long k = e; k > e - p; --k) out = compose(out, strip_map(bg.a(k - 1), bg.b(k), z));
  }
  return out;
}

/// Roots of C m² + (D - A) m - B = 0, numerically stable form. A vanishing
/// leading coefficient yields one non-finite root.
std::array<cplx, 2> fixed_points(const Mobius& f) {
  const cplx lin = f.D - f.A;
  const cplx root = std::sqrt(lin * lin + 4.0 * f.B * f.C);
  const cplx q = -0.5 * (std::real(std::conj(lin) * root) >= 0.0 ? lin + root : lin - root);
  if (q == cplx(0.0)) return {cplx(0.0), cplx(0.0)};
  return {q / f.C, -f.B / q};
}

cplx herglotz_root(const Mobius& f) {
  const auto roots = fixed_points(f);
  const bool up0 = std::isfinite(roots[0].imag()) && roots[0].imag() > 0.0;
  const bool up1 = std::isfinite(roots[1].imag()) && roots[1].imag() > 0.0;
  if (up0 == up1)
    throw Error(ErrorCode::BranchFailure, "tail quadratic has " + std::string(up0 ? "two" : "no") +
                                              " roots in the upper half-plane");
  return up0 ? roots[0] : roots[1];
}

cplx tail_value_above(const Background& bg, Side side, long cut_site, const BoundaryPoint& point) {
  if (!point.is_real_limit()) return herglotz_root(period_map(bg, side, cut_site, point.z()));

  const double lambda = point.lambda();
  switch (bg.locate(lambda, kEdgeMargin)) {
    case BandLocation::NearEdge:
      throw Error(ErrorCode::BandEdge, "λ = " + std::to_string(lambda) + " is within the edge margin");
    case BandLocation::Interior:
      return herglotz_root(period_map(bg, side, cut_site, cplx(lambda, 0.0)));
    case BandLocation::Gap:
      break;
  }
  // Both roots are real in a gap: take the one continuous with the Herglotz
  // branch just above the axis.
  const cplx probe = herglotz_root(period_map(bg, side, cut_site, cplx(lambda, kProbeEpsilon)));
  const auto roots = fixed_points(period_map(bg, side, cut_site, cplx(lambda, 0.0)));
  double best = std::numeric_limits<double>::infinity();
  double chosen = 0.0;
  for (const cplx& r : roots) {
    if (!std::isfinite(r.real())) continue;
    const double d = std::abs(r.real() - probe);
    if (d < best) {
      best = d;
      chosen = r.real();
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::BranchFailure, "no finite real root in gap");
  return cplx(chosen, 0.0);
}

HerglotzValue finish(cplx above, const BoundaryPoint& point, Side side, long n) {
  if (!point.is_real_limit()) {
    if (!(above.imag() > 0.0))
      throw Error(ErrorCode::BranchFailure, "m-function left the upper half-plane");
  } else if (above.imag() < 0.0) {
    throw Error(ErrorCode::BranchFailure, "boundary value with negative imaginary part");
  }
  const bool below = point.is_real_limit() && point.approach() == BoundaryPoint::Approach::Below;
  return {below ? std::conj(above) : above, point, side, n};
}

/// Generic complex tridiagonal solve (Thomas algorithm, no pivoting).
std::vector<cplx> solve_tridiagonal(std::vector<cplx> diag, const std::vector<double>& off,
                                    std::vector<cplx> rhs) {
  const std::size_t n = diag.size();
  std::vector<cplx> upper(n, cplx(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const cplx w = off[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    if (std::abs(diag[i]) == 0.0) throw Error(ErrorCode::SolverFailure, "singular tridiagonal pivot");
    if (i + 1 < n) upper[i] = off[i] / diag[i];
    rhs[i] /= diag[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper[i] * rhs[i + 1];
  return rhs;
}

}  // namespace

cplx strip(cplx m_next, double a, double b, cplx z) {
  const cplx den = b - z - a * a * m_next;
  if (std::abs(den) < kPoleThreshold)
    throw Error(ErrorCode::PoleHit, "stripping denominator |" + std::to_string(std::abs(den)) + "|");
  return 1.0 / den;
}

HerglotzValue tail_m(const Background& background, Side side, const BoundaryPoint& point,
                     long cut_site) {
  return finish(tail_value_above(background, side, cut_site, point), point, side, cut_site);
}

HerglotzValue m_right(const JacobiSpec& spec, long n, const BoundaryPoint& point) {
  const BoundaryPoint above = point.from_above();
  const cplx z = above.z();
  long start = n + 1;
  if (auto w = spec.window()) start = std::max(start, w->hi + 1);
  cplx m = tail_value_above(spec.background(), Side::Right, start - 1, above);
  for (long s = start - 1; s >= n + 1; --s) m = strip(m, spec.a(s), spec.b(s), z);
  return finish(m, point, Side::Right, n);
}

HerglotzValue m_left(const JacobiSpec& spec, long n, const BoundaryPoint& point) {
  const BoundaryPoint above = point.from_above();
  const cplx z = above.z();
  long end = n - 1;
  if (auto w = spec.window()) end = std::min(end, w->lo - 1);
  cplx m = tail_value_above(spec.background(), Side::Left, end + 1, above);
  for (long e = end + 1; e <= n - 1; ++e) m = strip(m, spec.a(e - 1), spec.b(e), z);
  return finish(m, point, Side::Left, n);
}

HerglotzValue m_function(const JacobiSpec& spec, Side side, long n, const BoundaryPoint& point) {
  return side == Side::Right ? m_right(spec, n, point) : m_left(spec, n, point);
}

cplx m_oracle_truncated(const JacobiSpec& spec, Side side, long n, cplx z, long N) {
  if (!(z.imag() > 0.0)) throw Error(ErrorCode::InvalidArgument, "oracle needs Im z > 0");
  const TruncatedOperator t = truncate(spec, N);
  const long first = side == Side::Right ? n + 1 : -N;
  const long last = side == Side::Right ? N : n - 1;
  if (first < -N || last > N || first > last)
    throw Error(ErrorCode::WindowTooSmall, "cut site outside the truncation");

  const auto len = static_cast<std::size_t>(last - first + 1);
  std::vector<cplx> diag(len);
  std::vector<double> off(len > 0 ? len - 1 : 0);
  for (std::size_t i = 0; i < len; ++i) diag[i] = t.diag[t.index(first + static_cast<long>(i))] - z;
  for (std::size_t i = 0; i + 1 < len; ++i) off[i] = t.offdiag[t.index(first + static_cast<long>(i))];

  std::vector<cplx> rhs(len, cplx(0.0));
  const std::size_t corner = side == Side::Right ? 0 : len - 1;
  rhs[corner] = 1.0;
  return solve_tridiagonal(std::move(diag), off, std::move(rhs))[corner];
}

double ac_density(const HerglotzValue& m) {
  if (!m.point.is_real_limit() || m.point.approach() != BoundaryPoint::Approach::Above)
    throw Error(ErrorCode::InvalidArgument, "a.c. density needs a λ + i0 boundary value");
  return std::max(0.0, m.value.imag()) / std::numbers::pi;
}

}  // namespace refl
