#pragma once

#include "reflectionless/herglotz.hpp"

namespace refl {

/// Channels whose a.c. density Im m / π does not exceed this are closed.
inline constexpr double kSupportThreshold = 1e-10;
/// Relative agreement required between the two Green's function routes.
inline constexpr double kGreenCrossCheck = 1e-10;

/// Diagonal resolvent element G_nn = <δ_n, (J - z)^{-1} δ_n>.
struct GreenDiag {
  cplx value;
  long n;
  BoundaryPoint point;
};

/// Evaluates both decoupling formulas
///   G_nn = -1 / (a_n² m_n^{(r)} - 1/m_{n+1}^{(l)})
///        = -1 / (a_{n-1}² m_n^{(l)} - 1/m_{n-1}^{(r)})
/// and throws CrossCheckFailure when they differ by more than kGreenCrossCheck
/// (relative). Returns the first.
GreenDiag green_diag(const JacobiSpec& spec, long n, const BoundaryPoint& point);

/// On-shell scattering matrix of (J, J_0) with J_0 decoupled at site n,
///   s_jk = δ_jk + 2i a_j a_k G_nn(λ+i0) sqrt(Im m_n^{(j)} Im m_n^{(k)}),
/// a_l = a_{n-1}, a_r = a_n. A closed channel has identity row and column.
struct ScatteringMatrix {
  long n = 0;
  double lambda = 0.0;
  cplx s_ll, s_lr, s_rl, s_rr;
  double im_m_left = 0.0;
  double im_m_right = 0.0;

  bool left_open() const;
  bool right_open() const;
};

ScatteringMatrix scattering_matrix(const JacobiSpec& spec, long n, double lambda);

/// The formula above from raw ingredients; throws NoOpenChannel when both
/// densities vanish.
ScatteringMatrix assemble_scattering(long n, double lambda, double a_left, double a_right,
                                     cplx green, double im_m_left, double im_m_right);

struct ReflectionTransmission {
  double R_l = 0.0;  // |s_ll|²
  double R_r = 0.0;  // |s_rr|²
  double T = 0.0;    // |s_lr|²
};

ReflectionTransmission reflection_transmission(const ScatteringMatrix& s);

/// Diagonal of V(λ): square roots of the channel a.c. densities.
struct ChannelWeight {
  double lambda = 0.0;
  double v_l = 0.0;
  double v_r = 0.0;
};

ChannelWeight channel_weight(const JacobiSpec& spec, long n, double lambda);

/// max |(s s^* - I)_ij| over the open channels.
double unitarity_defect(const ScatteringMatrix& s);

}  // namespace refl
