#include "reflectionless/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "reflectionless/error.hpp"

namespace refl {

namespace {

constexpr cplx kI{0.0, 1.0};

bool open(double im_m) { return im_m / std::numbers::pi > kSupportThreshold; }

/// Both decoupling routes at a point approached from above.
cplx green_above(const JacobiSpec& spec, long n, const BoundaryPoint& above) {
  const cplx mr_n = m_right(spec, n, above).value;
  const cplx ml_next = m_left(spec, n + 1, above).value;
  const cplx ml_n = m_left(spec, n, above).value;
  const cplx mr_prev = m_right(spec, n - 1, above).value;

  const double an = spec.a(n);
  const double anm1 = spec.a(n - 1);
  const cplx g1 = -1.0 / (an * an * mr_n - 1.0 / ml_next);
  const cplx g2 = -1.0 / (anm1 * anm1 * ml_n - 1.0 / mr_prev);
  if (!std::isfinite(g1.real()) || !std::isfinite(g1.imag()))
    throw Error(ErrorCode::PoleHit, "G_nn diverges", n);
  const double scale = std::max(std::abs(g1), std::abs(g2));
  if (std::abs(g1 - g2) > kGreenCrossCheck * scale)
    throw Error(ErrorCode::CrossCheckFailure,
                "Green's function routes differ by " + std::to_string(std::abs(g1 - g2) / scale), n);
  return g1;
}

}  // namespace

GreenDiag green_diag(const JacobiSpec& spec, long n, const BoundaryPoint& point) {
  cplx g = green_above(spec, n, point.from_above());
  if (point.is_real_limit() && point.approach() == BoundaryPoint::Approach::Below) g = std::conj(g);
  return {g, n, point};
}

bool ScatteringMatrix::left_open() const { return open(im_m_left); }
bool ScatteringMatrix::right_open() const { return open(im_m_right); }

ScatteringMatrix assemble_scattering(long n, double lambda, double a_left, double a_right,
                                     cplx green, double im_m_left, double im_m_right) {
  const bool l_open = open(im_m_left);
  const bool r_open = open(im_m_right);
  if (!l_open && !r_open)
    throw Error(ErrorCode::NoOpenChannel, "λ = " + std::to_string(lambda) + " lies outside both a.c. supports", n);

  ScatteringMatrix s;
  s.n = n;
  s.lambda = lambda;
  s.im_m_left = im_m_left;
  s.im_m_right = im_m_right;
  const double il = l_open ? im_m_left : 0.0;
  const double ir = r_open ? im_m_right : 0.0;
  s.s_ll = l_open ? 1.0 + 2.0 * kI * a_left * a_left * green * il : cplx(1.0);
  s.s_rr = r_open ? 1.0 + 2.0 * kI * a_right * a_right * green * ir : cplx(1.0);
  const cplx off = 2.0 * kI * a_left * a_right * green * std::sqrt(il * ir);
  s.s_lr = off;
  s.s_rl = off;
  return s;
}

ScatteringMatrix scattering_matrix(const JacobiSpec& spec, long n, double lambda) {
  const auto above = BoundaryPoint::real_limit(lambda);
  const cplx ml = m_left(spec, n, above).value;
  const cplx mr = m_right(spec, n, above).value;
  if (!open(ml.imag()) && !open(mr.imag()))
    throw Error(ErrorCode::NoOpenChannel, "λ = " + std::to_string(lambda) + " lies outside both a.c. supports", n);
  const cplx g = green_diag(spec, n, above).value;
  return assemble_scattering(n, lambda, spec.a(n - 1), spec.a(n), g, ml.imag(), mr.imag());
}

ReflectionTransmission reflection_transmission(const ScatteringMatrix& s) {
  return {std::norm(s.s_ll), std::norm(s.s_rr), std::norm(s.s_lr)};
}

ChannelWeight channel_weight(const JacobiSpec& spec, long n, double lambda) {
  const auto above = BoundaryPoint::real_limit(lambda);
  const double dl = ac_density(m_left(spec, n, above));
  const double dr = ac_density(m_right(spec, n, above));
  return {lambda, dl > kSupportThreshold ? std::sqrt(dl) : 0.0, dr > kSupportThreshold ? std::sqrt(dr) : 0.0};
}

double unitarity_defect(const ScatteringMatrix& s) {
  const bool l = s.left_open();
  const bool r = s.right_open();
  if (l && r) {
    // (s s^*)_ij = Σ_k s_ik conj(s_jk)
    const cplx p00 = std::norm(s.s_ll) + std::norm(s.s_lr);
    const cplx p11 = std::norm(s.s_rl) + std::norm(s.s_rr);
    const cplx p01 = s.s_ll * std::conj(s.s_rl) + s.s_lr * std::conj(s.s_rr);
    return std::max({std::abs(p00 - 1.0), std::abs(p11 - 1.0), std::abs(p01)});
  }
  if (l) return std::abs(std::norm(s.s_ll) - 1.0);
  if (r) return std::abs(std::norm(s.s_rr) - 1.0);
  return 0.0;
}

}  // namespace refl
