#include "reflectionless/jost.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "reflectionless/error.hpp"
#include "reflectionless/herglotz.hpp"

namespace refl {

namespace {

constexpr double kResidualTolerance = 1e-10;
constexpr double kNormalizationFloor = 1e-12;
constexpr double kExpansionTolerance = 1e-9;
constexpr double kDegenerateWronskian = 1e-12;

struct Mat2 {
  cplx m00{1.0}, m01{0.0}, m10{0.0}, m11{1.0};
};

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
          x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
}

/// One-period transfer (ψ_s, ψ_{s-1}) -> (ψ_{s+p}, ψ_{s+p-1}).
Mat2 monodromy(const Background& bg, long s, cplx z) {
  Mat2 out;
  const auto p = static_cast<long>(bg.period());
  for (long k = s; k < s + p; ++k) {
    const double ak = bg.a(k);
    const Mat2 t{(z - bg.b(k)) / ak, -bg.a(k - 1) / ak, 1.0, 0.0};
    out = mul(t, out);
  }
  return out;
}

std::array<cplx, 2> eigenvalues(const Mat2& m) {
  const cplx tr = m.m00 + m.m11;
  const cplx det = m.m00 * m.m11 - m.m01 * m.m10;
  const cplx root = std::sqrt(tr * tr - 4.0 * det);
  const cplx q = 0.5 * (std::real(std::conj(tr) * root) >= 0.0 ? tr + root : tr - root);
  return {q, det / q};
}

void require_band_interior(const Background& bg, double lambda) {
  switch (bg.locate(lambda, kEdgeMargin)) {
    case BandLocation::NearEdge:
      throw Error(ErrorCode::BandEdge, "λ = " + std::to_string(lambda) + " is within the edge margin");
    case BandLocation::Gap:
      throw Error(ErrorCode::SpectralGap, "λ = " + std::to_string(lambda) + " is not in a band");
    case BandLocation::Interior:
      break;
  }
}

}  // namespace

cplx JostSolution::at(long k) const {
  if (!contains(k)) throw Error(ErrorCode::InvalidArgument, "site outside the Jost window", k);
  return values[static_cast<std::size_t>(k - k_min)];
}

double JostSolution::bond(long k) const {
  if (!contains(k)) throw Error(ErrorCode::InvalidArgument, "site outside the Jost window", k);
  return bonds[static_cast<std::size_t>(k - k_min)];
}

FloquetSolution floquet_solution(const Background& bg, Side side, double lambda, long k_min,
                                 long k_max) {
  require_band_interior(bg, lambda);
  if (k_max <= k_min) throw Error(ErrorCode::InvalidArgument, "Floquet window needs at least two sites");
  const long s = k_min + 1;

  // Branch: the multiplier decaying in the requested direction just above the
  // axis, followed continuously down to λ.
  const auto probe = eigenvalues(monodromy(bg, s, cplx(lambda, kProbeEpsilon)));
  const bool want_small = side == Side::Right;
  const cplx target = (std::abs(probe[0]) < std::abs(probe[1])) == want_small ? probe[0] : probe[1];

  const Mat2 m = monodromy(bg, s, cplx(lambda, 0.0));
  const auto xs = eigenvalues(m);
  const cplx x = std::abs(xs[0] - target) <= std::abs(xs[1] - target) ? xs[0] : xs[1];

  // Eigenvector (ψ_s, ψ_{s-1}).
  std::array<cplx, 2> v1{m.m01, x - m.m00};
  std::array<cplx, 2> v2{x - m.m11, m.m10};
  const auto& v = std::norm(v1[0]) + std::norm(v1[1]) >= std::norm(v2[0]) + std::norm(v2[1]) ? v1 : v2;

  FloquetSolution out;
  out.multiplier = x;
  out.k_min = k_min;
  const auto len = static_cast<std::size_t>(k_max - k_min + 1);
  const auto p = bg.period();
  out.values.assign(len, cplx(0.0));
  out.values[0] = v[1];
  out.values[1] = v[0];
  for (std::size_t i = 2; i < len && i <= p; ++i) {
    const long k = k_min + static_cast<long>(i) - 1;
    out.values[i] = ((lambda - bg.b(k)) * out.values[i - 1] - bg.a(k - 1) * out.values[i - 2]) / bg.a(k);
  }
  for (std::size_t i = p + 1; i < len; ++i) out.values[i] = x * out.values[i - p];
  return out;
}

JostSolution jost_solution(const JacobiSpec& spec, Side side, double lambda) {
  const auto p = static_cast<long>(spec.background().period());
  long lo = 0, hi = 0;
  if (auto w = spec.window()) {
    lo = w->lo;
    hi = w->hi;
  }
  return jost_solution(spec, side, lambda, std::min(lo, -1L) - 2 * p - 4, std::max(hi, 1L) + 2 * p + 4);
}

JostSolution jost_solution(const JacobiSpec& spec, Side side, double lambda, long k_min, long k_max) {
  const Background& bg = spec.background();
  require_band_interior(bg, lambda);
  const auto w = spec.window();
  if (k_min > -1 || k_max < 1) throw Error(ErrorCode::InvalidArgument, "Jost window must contain sites -1..1");
  if (w && (k_min > w->lo - 2 || k_max < w->hi + 2))
    throw Error(ErrorCode::WindowTooSmall, "Jost window must enclose the perturbation with margin");

  JostSolution psi;
  psi.side = side;
  psi.lambda = lambda;
  psi.k_min = k_min;
  psi.k_max = k_max;
  const auto len = static_cast<std::size_t>(k_max - k_min + 1);
  psi.values.assign(len, cplx(0.0));
  psi.bonds.resize(len);
  for (std::size_t i = 0; i < len; ++i) psi.bonds[i] = spec.a(k_min + static_cast<long>(i));
  auto idx = [k_min](long k) { return static_cast<std::size_t>(k - k_min); };

  if (side == Side::Right) {
    // Pure background from hi + 1 on; recurse leftwards through the window.
    const long r0 = w ? w->hi + 1 : k_max - 1;
    const FloquetSolution tail = floquet_solution(bg, Side::Right, lambda, r0, k_max);
    std::copy(tail.values.begin(), tail.values.end(), psi.values.begin() + static_cast<long>(idx(r0)));
    for (long k = r0; k > k_min; --k) {
      psi.values[idx(k - 1)] =
          ((lambda - spec.b(k)) * psi.values[idx(k)] - spec.a(k) * psi.values[idx(k + 1)]) / spec.a(k - 1);
    }
    psi.tail_multiplier = tail.multiplier;
  } else {
    const long l0 = w ? w->lo - 1 : k_min + 1;
    const FloquetSolution tail = floquet_solution(bg, Side::Left, lambda, k_min, l0);
    std::copy(tail.values.begin(), tail.values.end(), psi.values.begin());
    for (long k = l0; k < k_max; ++k) {
      psi.values[idx(k + 1)] =
          ((lambda - spec.b(k)) * psi.values[idx(k)] - spec.a(k - 1) * psi.values[idx(k - 1)]) / spec.a(k);
    }
    psi.tail_multiplier = 1.0 / tail.multiplier;
  }

  double peak = 0.0;
  for (const cplx& v : psi.values) peak = std::max(peak, std::abs(v));
  const cplx psi0 = psi.values[idx(0)];
  if (std::abs(psi0) < kNormalizationFloor * peak)
    throw Error(ErrorCode::NormalizationPole, "ψ_0 vanishes at λ = " + std::to_string(lambda));
  for (cplx& v : psi.values) v /= psi0;
  peak /= std::abs(psi0);

  double residual = 0.0;
  for (long k = k_min + 1; k < k_max; ++k) {
    const cplx r = spec.a(k) * psi.values[idx(k + 1)] + spec.a(k - 1) * psi.values[idx(k - 1)] +
                   (spec.b(k) - lambda) * psi.values[idx(k)];
    residual = std::max(residual, std::abs(r));
  }
  psi.recursion_residual = residual / peak;
  if (psi.recursion_residual > kResidualTolerance)
    throw Error(ErrorCode::CrossCheckFailure,
                "Jost recursion residual " + std::to_string(psi.recursion_residual));
  return psi;
}

JostSolution conjugate(JostSolution psi) {
  for (cplx& v : psi.values) v = std::conj(v);
  psi.tail_multiplier = std::conj(psi.tail_multiplier);
  return psi;
}

cplx wronskian(const JostSolution& u, const JostSolution& v, long k) {
  return u.bond(k) * (u.at(k + 1) * v.at(k) - u.at(k) * v.at(k + 1));
}

ReflectionDatum alpha_beta(const JacobiSpec& spec, double lambda) {
  const JostSolution left = jost_solution(spec, Side::Left, lambda);
  const JostSolution right = jost_solution(spec, Side::Right, lambda);
  const JostSolution right_bar = conjugate(right);

  const cplx w_basis = wronskian(right_bar, right, 0);
  if (std::abs(w_basis) < kDegenerateWronskian)
    throw Error(ErrorCode::DegenerateBasis, "ψ^(r) is proportional to a real solution");

  ReflectionDatum out;
  out.lambda = lambda;
  out.alpha = wronskian(left, right, 0) / w_basis;
  out.beta = -wronskian(left, right_bar, 0) / w_basis;

  double peak = 1.0;
  double residual = 0.0;
  for (long k = left.k_min; k <= left.k_max; ++k) {
    peak = std::max(peak, std::abs(left.at(k)));
    residual = std::max(residual, std::abs(left.at(k) - out.alpha * right_bar.at(k) - out.beta * right.at(k)));
  }
  out.residual = residual / peak;
  if (out.residual > kExpansionTolerance)
    throw Error(ErrorCode::CrossCheckFailure, "expansion residual " + std::to_string(out.residual));
  out.R_r = std::norm(out.beta / out.alpha);
  return out;
}

double spectral_reflection_mratio(const JacobiSpec& spec, double lambda) {
  const auto above = BoundaryPoint::real_limit(lambda);
  const cplx m0r = m_right(spec, 0, above).value;
  const cplx m1l = m_left(spec, 1, above).value;
  const double a0sq = spec.a(0) * spec.a(0);
  const cplx num = a0sq * std::conj(m0r) * m1l - 1.0;
  const cplx den = a0sq * m0r * m1l - 1.0;
  return std::norm(num / den);
}

cplx green_offdiag(const JacobiSpec& spec, long n, long m, double lambda) {
  const auto p = static_cast<long>(spec.background().period());
  long lo = std::min(n, m), hi = std::max(n, m);
  if (auto w = spec.window()) {
    lo = std::min(lo, w->lo);
    hi = std::max(hi, w->hi);
  }
  const long k_min = std::min(lo, -1L) - 2 * p - 4;
  const long k_max = std::max(hi, 1L) + 2 * p + 4;
  const JostSolution left = jost_solution(spec, Side::Left, lambda, k_min, k_max);
  const JostSolution right = jost_solution(spec, Side::Right, lambda, k_min, k_max);
  return left.at(std::min(n, m)) * right.at(std::max(n, m)) / wronskian(right, left, 0);
}

}  // namespace refl
