#pragma once

#include <span>
#include <string>
#include <vector>

#include "reflectionless/jacobi_spec.hpp"

namespace refl {

/// Default absolute distance kept from every band edge.
inline constexpr double kGridEdgeMargin = 1e-5;
/// Default verdict threshold τ.
inline constexpr double kCriterionTolerance = 1e-8;

/// Sorted energy sample with no point within `edge_margin` of a band edge.
struct EnergyGrid {
  enum class Provenance { Explicit, BandScan };

  std::vector<double> points;
  double edge_margin = kGridEdgeMargin;
  Provenance provenance = Provenance::Explicit;
  /// Requested points removed for lying too close to an edge.
  std::vector<double> dropped;
};

EnergyGrid make_grid(const Background& background, std::vector<double> points,
                     double edge_margin = kGridEdgeMargin);
/// start, start+step, ...; stop is included when within step/2 of a sample.
EnergyGrid make_grid(const Background& background, double start, double stop, double step,
                     double edge_margin = kGridEdgeMargin);
/// `points_per_band` equispaced points strictly inside every band.
EnergyGrid band_scan(const Background& background, std::size_t points_per_band,
                     double edge_margin = kGridEdgeMargin);

/// Indices into grid.points with positive a.c. density at cut site 0.
struct EssentialSupport {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  std::vector<std::size_t> either;
};

EssentialSupport essential_support(const JacobiSpec& spec, const EnergyGrid& grid);

struct CutSiteRow {
  long n = 0;
  double re_G = 0.0;
  /// |a_n² m_n^{(r)}(λ+i0) m_{n+1}^{(l)}(λ-i0) - 1|
  double specref_residual = 0.0;
  double s_ll_mag = 0.0;
  double s_rr_mag = 0.0;

  double s_diag_mag() const { return s_ll_mag > s_rr_mag ? s_ll_mag : s_rr_mag; }
};

/// Verdict true means "reflectionless at λ" by that criterion.
struct PointReport {
  double lambda = 0.0;
  std::vector<CutSiteRow> rows;
  bool verdict_mt = false;      // Re G_nn = 0 for every n in range
  bool verdict_triple = false;  // Re G_nn = 0 on some three consecutive n
  bool verdict_spec = false;    // m-function product = 1 for every n
  bool verdict_stat = false;    // s(λ) off-diagonal for every n
  bool agree = false;
};

struct DroppedPoint {
  double lambda = 0.0;
  std::string reason;
};

struct CriteriaReport {
  double tau = kCriterionTolerance;
  long n_first = 0;
  long n_last = 0;
  std::vector<PointReport> points;
  std::vector<DroppedPoint> dropped;

  bool all_agree() const;
  /// Every residual (|Re G|, specref, |s_ll|, |s_rr|) is <= small or >= large.
  bool residual_gap(double small = 1e-10, double large = 1e-3) const;
  /// Largest residual in (small, large), 0 if none.
  double worst_gap_violation(double small = 1e-10, double large = 1e-3) const;
};

/// Evaluates every criterion at each grid point and cut site n_first..n_last.
/// Points outside both a.c. supports or at band edges are dropped with a note.
CriteriaReport reflectionless_report(const JacobiSpec& spec, const EnergyGrid& grid, long n_first,
                                     long n_last, double tau = kCriterionTolerance);

/// Reservoir parameters and quadrature controls for the current integral.
struct Reservoirs {
  double beta_l = 1.0;
  double mu_l = 0.0;
  double beta_r = 1.0;
  double mu_r = 0.0;
};

struct QuadratureOptions {
  double tolerance = 1e-13;
  unsigned max_depth = 20;
  /// Strip width at each band edge, relative to the band width.
  double edge_fraction = 1e-5;
};

struct Currents {
  double charge = 0.0;
  double energy = 0.0;
};

/// Fermi function 1 / (1 + e^{β(λ-μ)}), overflow-safe.
double fermi(double lambda, double beta, double mu);

/// Transmission |s_lr(λ)|² at cut site 0.
double transmission(const JacobiSpec& spec, double lambda);

/// I_q = (2π)^{-1} ∫ T(λ) (f_l - f_r) dλ and I_e with an extra factor λ over
/// the bands (ħ = e = 1, positive for flow from left to right).
Currents landauer_current(const JacobiSpec& spec, const Reservoirs& reservoirs,
                          const QuadratureOptions& quadrature = {});

}  // namespace refl
