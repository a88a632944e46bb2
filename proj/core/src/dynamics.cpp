#include "reflectionless/dynamics.hpp"

#include <lapacke.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "reflectionless/error.hpp"
#include "reflectionless/herglotz.hpp"
#include "reflectionless/jost.hpp"
#include "reflectionless/scattering.hpp"

namespace refl {

namespace {

constexpr cplx kI{0.0, 1.0};
/// Discarded packet mass outside the retained support.
constexpr double kTailMass = 1e-12;
/// Energy samples extend this many Δλ on each side of λ0.
constexpr double kSpectralReach = 8.0;
/// Samples closer than this fraction of the band width to an edge are skipped.
constexpr double kPacketEdgeMargin = 1e-4;
constexpr double kWeightFloor = 1e-14;
constexpr double kTimeFactor = 0.8;

using Map = Eigen::Map<const Eigen::MatrixXd>;

double norm_of(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

SiteRange window_or_origin(const JacobiSpec& spec) { return spec.window().value_or(SiteRange{0, 0}); }

long window_size(const JacobiSpec& spec) {
  const auto w = spec.window();
  return w ? w->size() : 0;
}

const Band& band_containing(const Background& bg, double lambda) {
  for (const Band& b : bg.bands())
    if (lambda > b.lower && lambda < b.upper) return b;
  throw Error(ErrorCode::SpectralGap, "λ0 = " + std::to_string(lambda) + " is not in a band");
}

/// Bloch phase per period, unwrapped later; x = e^{∓iθ} on the bands.
double bloch_phase(const Background& bg, Side side, double lambda) {
  return std::arg(floquet_solution(bg, side, lambda, 0, 1).multiplier);
}

/// Smallest background group velocity (sites per unit time) on [lo, hi].
double slowest_group_velocity(const Background& bg, double lo, double hi) {
  constexpr int kProbe = 64;
  const double h = (hi - lo) / kProbe;
  const auto p = static_cast<double>(bg.period());
  double v = std::numeric_limits<double>::infinity();
  double prev = bloch_phase(bg, Side::Right, lo);
  for (int i = 1; i <= kProbe; ++i) {
    const double cur = bloch_phase(bg, Side::Right, lo + i * h);
    double d = std::abs(cur - prev);
    d = std::min(d, 2.0 * std::numbers::pi - d);
    v = std::min(v, p * h / std::max(d, 1e-300));
    prev = cur;
  }
  return v;
}

LatticeState mask(const LatticeState& s, long first, long last) {
  LatticeState out = s;
  for (long k = -s.N; k <= s.N; ++k)
    if (k < first || k > last) out.amplitudes[static_cast<std::size_t>(k + s.N)] = 0.0;
  out.norm = norm_of(out.amplitudes);
  return out;
}

}  // namespace

LatticeState LatticeState::from_amplitudes(long N, std::vector<cplx> amplitudes) {
  if (amplitudes.size() != static_cast<std::size_t>(2 * N + 1))
    throw Error(ErrorCode::InvalidArgument, "state length must be 2N+1");
  LatticeState s;
  s.N = N;
  s.norm = norm_of(amplitudes);
  s.amplitudes = std::move(amplitudes);
  return s;
}

LatticeState LatticeState::delta(long N, long site) {
  if (site < -N || site > N) throw Error(ErrorCode::InvalidArgument, "site outside the lattice", site);
  std::vector<cplx> v(static_cast<std::size_t>(2 * N + 1), 0.0);
  v[static_cast<std::size_t>(site + N)] = 1.0;
  return from_amplitudes(N, std::move(v));
}

double LatticeState::mass(long first, long last) const {
  first = std::max(first, -N);
  last = std::min(last, N);
  double s = 0.0;
  for (long k = first; k <= last; ++k) s += std::norm(at(k));
  return s;
}

SpectralPropagator::SpectralPropagator(TruncatedOperator truncation) : truncation_(std::move(truncation)) {
  // MRRR (dstemr). The divide-and-conquer driver returned non-orthogonal
  // eigenvectors with the OpenBLAS build this was developed against.
  const auto n = static_cast<lapack_int>(truncation_.size());
  std::vector<double> diag = truncation_.diag;
  std::vector<double> off = truncation_.offdiag;
  off.push_back(0.0);
  eigenvalues_.assign(static_cast<std::size_t>(n), 0.0);
  eigenvectors_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info =
      LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), off.data(), 0.0, 0.0, 0, 0, &found,
                     eigenvalues_.data(), eigenvectors_.data(), n, n, support.data(), &tryrac);
  if (info != 0 || found != n)
    throw Error(ErrorCode::SolverFailure, "dstemr failed with info " + std::to_string(info));
}

std::vector<cplx> SpectralPropagator::apply(std::span<const cplx> state, double t) const {
  const auto n = static_cast<Eigen::Index>(truncation_.size());
  if (state.size() != truncation_.size()) throw Error(ErrorCode::InvalidArgument, "state size mismatch");
  const Map V(eigenvectors_.data(), n, n);
  Eigen::VectorXd re(n), im(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    re[i] = state[static_cast<std::size_t>(i)].real();
    im[i] = state[static_cast<std::size_t>(i)].imag();
  }
  Eigen::VectorXd cr = V.transpose() * re;
  Eigen::VectorXd ci = V.transpose() * im;
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx c = cplx(cr[i], ci[i]) * std::exp(-kI * (eigenvalues_[static_cast<std::size_t>(i)] * t));
    cr[i] = c.real();
    ci[i] = c.imag();
  }
  re.noalias() = V * cr;
  im.noalias() = V * ci;
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = cplx(re[i], im[i]);
  return out;
}

std::vector<double> SpectralPropagator::spectral_weights(std::span<const cplx> state) const {
  const auto n = static_cast<Eigen::Index>(truncation_.size());
  if (state.size() != truncation_.size()) throw Error(ErrorCode::InvalidArgument, "state size mismatch");
  const Map V(eigenvectors_.data(), n, n);
  Eigen::VectorXd re(n), im(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    re[i] = state[static_cast<std::size_t>(i)].real();
    im[i] = state[static_cast<std::size_t>(i)].imag();
  }
  const Eigen::VectorXd cr = V.transpose() * re;
  const Eigen::VectorXd ci = V.transpose() * im;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = cr[i] * cr[i] + ci[i] * ci[i];
  return w;
}

PropagationPlan make_plan(const JacobiSpec& spec, long N, long packet_extent) {
  return make_plan(std::make_shared<const SpectralPropagator>(truncate(spec, N)), spec, packet_extent);
}

PropagationPlan make_plan(std::shared_ptr<const SpectralPropagator> propagator, const JacobiSpec& spec,
                          long packet_extent) {
  const TruncatedOperator& t = propagator->truncation();
  PropagationPlan plan;
  double amax = 0.0;
  for (double a : t.offdiag) amax = std::max(amax, a);
  plan.v_max = 2.0 * amax;
  plan.packet_extent = packet_extent;
  const long room = t.N - packet_extent - window_size(spec);
  if (room <= 0) throw Error(ErrorCode::WindowTooSmall, "no propagation room left for N = " + std::to_string(t.N));
  plan.t_max = static_cast<double>(room) / plan.v_max;
  plan.propagator = std::move(propagator);
  return plan;
}

LatticeState evolve(const PropagationPlan& plan, const LatticeState& state, double t) {
  if (std::abs(t) > plan.t_max)
    throw Error(ErrorCode::HorizonExceeded,
                "t = " + std::to_string(t) + " beyond t_max = " + std::to_string(plan.t_max));
  if (state.N != plan.N()) throw Error(ErrorCode::InvalidArgument, "state and plan use different N");
  return LatticeState::from_amplitudes(state.N, plan.propagator->apply(state.amplitudes, t));
}

WavePacket wave_packet(const JacobiSpec& spec, Side side, double lambda0, double dlambda, long N) {
  if (!(dlambda > 0.0) || !std::isfinite(lambda0))
    throw Error(ErrorCode::InvalidArgument, "wave packet needs finite λ0 and Δλ > 0");
  const Background& bg = spec.background();
  const Band& band = band_containing(bg, lambda0);
  if (lambda0 - 3.0 * dlambda <= band.lower || lambda0 + 3.0 * dlambda >= band.upper)
    throw Error(ErrorCode::InvalidArgument, "[λ0 - 3Δλ, λ0 + 3Δλ] must lie inside one band");

  // Waves moving toward the window: right-decaying ones move right.
  const Side wave = side == Side::Left ? Side::Right : Side::Left;
  const auto p = static_cast<long>(bg.period());
  const long M = N / 4;
  const double lo = std::max(lambda0 - kSpectralReach * dlambda, band.lower + kPacketEdgeMargin * band.width());
  const double hi = std::min(lambda0 + kSpectralReach * dlambda, band.upper - kPacketEdgeMargin * band.width());

  // Sample spacing: the Bloch phase step per sample must keep the alias
  // period of the energy sum beyond the 2M+1 evaluated sites.
  double dtheta_max = 0.0;
  {
    constexpr int kProbe = 256;
    const double h = (hi - lo) / kProbe;
    double prev = bloch_phase(bg, wave, lo);
    for (int i = 1; i <= kProbe; ++i) {
      const double cur = bloch_phase(bg, wave, lo + i * h);
      double d = std::abs(cur - prev);
      d = std::min(d, 2.0 * std::numbers::pi - d);
      dtheta_max = std::max(dtheta_max, d / h);
      prev = cur;
    }
  }
  const double step = 2.0 * std::numbers::pi * static_cast<double>(p) /
                      (2.0 * static_cast<double>(4 * M + 2) * std::max(dtheta_max, 1e-12));
  const auto samples = static_cast<long>(std::ceil((hi - lo) / step)) + 1;
  const double dl = (hi - lo) / static_cast<double>(samples - 1);

  std::vector<cplx> shape(static_cast<std::size_t>(2 * M + 1), 0.0);
  for (long s = 0; s < samples; ++s) {
    const double lambda = lo + dl * static_cast<double>(s);
    const double g = std::exp(-(lambda - lambda0) * (lambda - lambda0) / (4.0 * dlambda * dlambda));
    const FloquetSolution f = floquet_solution(bg, wave, lambda, -M, M);
    // Fix the phase at the centre and the scale by the centre cell's norm.
    double cell = 0.0;
    for (long j = 0; j < p; ++j) cell += std::norm(f.values[static_cast<std::size_t>(M + j)]);
    const cplx c = f.values[static_cast<std::size_t>(M)];
    const cplx scale = (std::abs(c) > 0.0 ? std::conj(c) / std::abs(c) : cplx(1.0)) / std::sqrt(cell);
    for (std::size_t i = 0; i < shape.size(); ++i) shape[i] += g * dl * scale * f.values[i];
  }

  double total = 0.0;
  for (const cplx& v : shape) total += std::norm(v);
  long K = M;
  {
    double outside = 0.0;
    while (K > 0) {
      const double next = outside + std::norm(shape[static_cast<std::size_t>(M - K)]) +
                          std::norm(shape[static_cast<std::size_t>(M + K)]);
      if (next > kTailMass * total) break;
      outside = next;
      --K;
    }
  }
  if (K >= M) throw Error(ErrorCode::InvalidArgument, "N too small for a packet of width Δλ");

  // Centre aligned to the period so the background coefficients match.
  const SiteRange w = window_or_origin(spec);
  const long gap = (N + 3) / 4;
  long center = 0;
  if (side == Side::Left) {
    center = w.lo - gap - K;
    center = p * static_cast<long>(std::floor(static_cast<double>(center) / static_cast<double>(p)));
  } else {
    center = w.hi + gap + K;
    center = p * static_cast<long>(std::ceil(static_cast<double>(center) / static_cast<double>(p)));
  }
  if (center - K < -N + 1 || center + K > N - 1)
    throw Error(ErrorCode::WindowTooSmall, "packet does not fit in the truncation");

  std::vector<cplx> amps(static_cast<std::size_t>(2 * N + 1), 0.0);
  for (long j = -K; j <= K; ++j) amps[static_cast<std::size_t>(center + j + N)] = shape[static_cast<std::size_t>(M + j)];
  const double nrm = norm_of(amps);
  for (cplx& v : amps) v /= nrm;

  WavePacket out;
  out.state = LatticeState::from_amplitudes(N, std::move(amps));
  out.side = side;
  out.lambda0 = lambda0;
  out.dlambda = dlambda;
  out.center = center;
  out.extent = 2 * K + 1;
  return out;
}

DynamicalResult dynamical_reflection(const JacobiSpec& spec, double lambda0, double dlambda, long N) {
  return dynamical_reflection(spec, std::make_shared<const SpectralPropagator>(truncate(spec, N)), lambda0,
                              dlambda);
}

DynamicalResult dynamical_reflection(const JacobiSpec& spec,
                                     std::shared_ptr<const SpectralPropagator> propagator, double lambda0,
                                     double dlambda) {
  const long N = propagator->truncation().N;
  const WavePacket packet = wave_packet(spec, Side::Left, lambda0, dlambda, N);
  const PropagationPlan plan = make_plan(propagator, spec, packet.extent);

  DynamicalResult r;
  r.lambda0 = lambda0;
  r.dlambda = dlambda;
  r.N = N;
  r.t_star = kTimeFactor * plan.t_max;

  // The packet core (3σ in energy and space) has to be past the window by t*.
  const Background& bg = spec.background();
  const Band& band = band_containing(bg, lambda0);
  const double v_slow = slowest_group_velocity(bg, std::max(lambda0 - 3.0 * dlambda, band.lower),
                                               std::min(lambda0 + 3.0 * dlambda, band.upper));
  const double v0 = slowest_group_velocity(bg, lambda0 - 1e-3 * dlambda, lambda0 + 1e-3 * dlambda);
  const long far_side = spec.window() ? std::max(spec.window()->hi, 0L) : 0L;
  const double trail = static_cast<double>(far_side - packet.center) + 3.0 * v0 / (2.0 * dlambda);
  const double needed = trail / v_slow;
  if (needed > r.t_star)
    throw Error(ErrorCode::HorizonExceeded, "packet needs t = " + std::to_string(needed) +
                                                " to clear the window but t* = " + std::to_string(r.t_star) +
                                                "; increase N");
  const LatticeState psi = evolve(plan, packet.state, r.t_star);
  r.R_dyn = psi.mass(-N, -1);
  r.T_dyn = psi.mass(1, N);
  r.site0_mass = std::norm(psi.at(0));
  for (double f : {0.9, 1.1}) {
    const LatticeState other = evolve(plan, packet.state, f * r.t_star);
    r.t_variation = std::max(r.t_variation, std::abs(other.mass(-N, -1) - r.R_dyn));
  }

  const std::vector<double> w = propagator->spectral_weights(packet.state.amplitudes);
  const auto energies = propagator->eigenvalues();
  double acc = 0.0, used = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < kWeightFloor) continue;
    try {
      acc += w[i] * std::norm(scattering_matrix(spec, 0, energies[i]).s_ll);
      used += w[i];
    } catch (const Error&) {
      // Edge or gap eigenvalues carry no scattering data.
    }
  }
  if (!(used > 0.0)) throw Error(ErrorCode::NoOpenChannel, "packet has no weight on the a.c. spectrum");
  r.R_stationary_avg = acc / used;
  r.abs_error = std::abs(r.R_dyn - r.R_stationary_avg);
  return r;
}

std::vector<DynamicalResult> scattering_from_dynamics(const JacobiSpec& spec, std::span<const double> lambdas,
                                                      double dlambda, long N) {
  const auto propagator = std::make_shared<const SpectralPropagator>(truncate(spec, N));
  std::vector<DynamicalResult> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(dynamical_reflection(spec, propagator, l, dlambda));
  return out;
}

double projection_defect(const JacobiSpec& spec, double lambda0, double dlambda, long N,
                         std::optional<double> t_star) {
  const WavePacket packet = wave_packet(spec, Side::Left, lambda0, dlambda, N);
  const PropagationPlan plan = make_plan(spec, N, packet.extent);
  const double t1 = t_star.value_or(kTimeFactor * plan.t_max);
  const double t2 = 0.9 * t1;

  auto project = [&](const LatticeState& phi, double t, long first, long last) {
    return evolve(plan, mask(evolve(plan, phi, t), first, last), -t);
  };
  const LatticeState& phi = packet.state;
  const LatticeState once = project(phi, t2, -N, -1);
  const LatticeState twice = project(once, t1, -N, -1);
  double idem = 0.0;
  for (std::size_t i = 0; i < once.amplitudes.size(); ++i) idem += std::norm(twice.amplitudes[i] - once.amplitudes[i]);

  const LatticeState pl = project(phi, t1, -N, -1);
  const LatticeState pr = project(phi, t1, 1, N);
  const double site0 = std::norm(evolve(plan, phi, t1).at(0));
  const double split = std::abs(pl.norm * pl.norm + pr.norm * pr.norm + site0 - phi.norm * phi.norm);
  return std::sqrt(idem) + split;
}

}  // namespace refl
