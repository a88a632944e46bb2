#pragma once

#include <vector>

#include "reflectionless/jacobi_spec.hpp"

namespace refl {

/// Generalized eigenfunction ψ^{(side)}(λ + i0) of
///   a_k ψ_{k+1} + a_{k-1} ψ_{k-1} + b_k ψ_k = λ ψ_k
/// on a finite window, taken on the branch that decays at +∞ (Right) or -∞
/// (Left) just above the real axis, normalized so that ψ_0 = 1.
struct JostSolution {
  Side side = Side::Right;
  double lambda = 0.0;
  long k_min = 0;
  long k_max = 0;
  std::vector<cplx> values;  // ψ_{k_min..k_max}
  std::vector<double> bonds;  // a_{k_min..k_max}
  /// Per-period ratio beyond the window in the decaying direction; |x| <= 1.
  cplx tail_multiplier;
  /// max_k |(J ψ)_k - λ ψ_k| / max |ψ| over the window interior.
  double recursion_residual = 0.0;

  cplx at(long k) const;
  double bond(long k) const;
  bool contains(long k) const { return k >= k_min && k <= k_max; }
};

/// Window wide enough for the override region, sites -3..4 and two periods of tail.
JostSolution jost_solution(const JacobiSpec& spec, Side side, double lambda);
JostSolution jost_solution(const JacobiSpec& spec, Side side, double lambda, long k_min, long k_max);

/// ψ̄: still a solution at real λ.
JostSolution conjugate(JostSolution psi);

/// a_k (u_{k+1} v_k - u_k v_{k+1}); independent of k for two solutions.
cplx wronskian(const JostSolution& u, const JostSolution& v, long k);

/// Unnormalized Floquet (Bloch) solution of a pure background on [k_min, k_max]
/// with the same branch convention as jost_solution. Right-decaying waves move
/// right, left-decaying waves move left.
struct FloquetSolution {
  cplx multiplier;  // ψ_{k+p} = multiplier · ψ_k
  long k_min = 0;
  std::vector<cplx> values;
};

FloquetSolution floquet_solution(const Background& background, Side side, double lambda, long k_min,
                                 long k_max);

/// Expansion ψ^{(l)} = α ψ̄^{(r)} + β ψ^{(r)} and R_r = |β/α|².
struct ReflectionDatum {
  double lambda = 0.0;
  cplx alpha;
  cplx beta;
  double R_r = 0.0;
  /// max_k |ψ^{(l)}_k - α ψ̄^{(r)}_k - β ψ^{(r)}_k| / max(1, max |ψ^{(l)}|).
  double residual = 0.0;
};

ReflectionDatum alpha_beta(const JacobiSpec& spec, double lambda);

/// |(a_0² conj(m_0^{(r)}) m_1^{(l)} - 1) / (a_0² m_0^{(r)} m_1^{(l)} - 1)|² at λ + i0.
double spectral_reflection_mratio(const JacobiSpec& spec, double lambda);

/// G_nm(λ + i0) = ψ^{(l)}_{min(n,m)} ψ^{(r)}_{max(n,m)} / W(ψ^{(r)}, ψ^{(l)}).
cplx green_offdiag(const JacobiSpec& spec, long n, long m, double lambda);

}  // namespace refl
