#pragma once

#include "reflectionless/jacobi_spec.hpp"

namespace refl {

/// Points closer than this fraction of the adjacent band width to a band edge
/// are refused with BandEdge.
inline constexpr double kEdgeMargin = 1e-6;
/// Stripping denominators below this modulus raise PoleHit.
inline constexpr double kPoleThreshold = 1e-14;
/// Imaginary offset used to pick real roots by continuity inside gaps.
inline constexpr double kProbeEpsilon = 1e-8;

/// Weyl m-function value m_n^{(side)} at a boundary point.
///   right: <δ_{n+1}, (J_n^{(r)} - z)^{-1} δ_{n+1}>, half-line [n+1, ∞)
///   left:  <δ_{n-1}, (J_n^{(l)} - z)^{-1} δ_{n-1}>, half-line (-∞, n-1]
struct HerglotzValue {
  cplx value;
  BoundaryPoint point;
  Side side;
  long cut_site;
};

/// m-function of the pure background with the half-line cut at `cut_site`:
/// the Herglotz fixed point of the p-fold stripping Möbius map. Inside bands
/// the λ + i0 value has Im > 0; in gaps it is real.
HerglotzValue tail_m(const Background& background, Side side, const BoundaryPoint& point,
                     long cut_site = 0);

/// One coefficient-stripping step 1 / (b - z - a² m_next).
cplx strip(cplx m_next, double a, double b, cplx z);

HerglotzValue m_right(const JacobiSpec& spec, long n, const BoundaryPoint& point);
HerglotzValue m_left(const JacobiSpec& spec, long n, const BoundaryPoint& point);
HerglotzValue m_function(const JacobiSpec& spec, Side side, long n, const BoundaryPoint& point);

/// Brute-force reference: solves (T - z) x = δ_edge on the Dirichlet
/// half-line block of truncate(spec, N) and returns the corner element.
cplx m_oracle_truncated(const JacobiSpec& spec, Side side, long n, cplx z, long N);

/// a.c. spectral density Im m(λ + i0) / π; requires a λ + i0 value.
double ac_density(const HerglotzValue& m);

}  // namespace refl
