#include "reflectionless/analysis.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "reflectionless/error.hpp"
#include "reflectionless/herglotz.hpp"
#include "reflectionless/scattering.hpp"

namespace refl {

namespace {

bool near_edge(const Background& bg, double lambda, double margin) {
  for (const Band& b : bg.bands())
    if (std::abs(lambda - b.lower) < margin || std::abs(lambda - b.upper) < margin) return true;
  return false;
}

bool droppable(ErrorCode code) {
  return code == ErrorCode::BandEdge || code == ErrorCode::SpectralGap || code == ErrorCode::NoOpenChannel;
}

template <class F>
double kronrod(F f, double a, double b, const QuadratureOptions& q) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, q.max_depth, q.tolerance);
}

}  // namespace

EnergyGrid make_grid(const Background& background, std::vector<double> points, double edge_margin) {
  if (!(edge_margin >= 0.0)) throw Error(ErrorCode::InvalidArgument, "edge margin must be non-negative");
  EnergyGrid g;
  g.edge_margin = edge_margin;
  g.provenance = EnergyGrid::Provenance::Explicit;
  for (double x : points) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteEntry, "grid point is not finite");
    (near_edge(background, x, edge_margin) ? g.dropped : g.points).push_back(x);
  }
  std::sort(g.points.begin(), g.points.end());
  g.points.erase(std::unique(g.points.begin(), g.points.end()), g.points.end());
  return g;
}

EnergyGrid make_grid(const Background& background, double start, double stop, double step, double edge_margin) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw Error(ErrorCode::NonFiniteEntry, "grid bounds must be finite");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
  if (stop < start) throw Error(ErrorCode::InvalidArgument, "grid stop precedes start");
  const auto count = static_cast<long>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) pts.push_back(start + static_cast<double>(i) * step);
  return make_grid(background, std::move(pts), edge_margin);
}

EnergyGrid band_scan(const Background& background, std::size_t points_per_band, double edge_margin) {
  if (points_per_band == 0) throw Error(ErrorCode::InvalidArgument, "band scan needs at least one point");
  std::vector<double> pts;
  for (const Band& b : background.bands()) {
    const double lo = b.lower + 2.0 * edge_margin;
    const double hi = b.upper - 2.0 * edge_margin;
    if (points_per_band == 1) {
      pts.push_back(0.5 * (lo + hi));
      continue;
    }
    const double h = (hi - lo) / static_cast<double>(points_per_band - 1);
    for (std::size_t i = 0; i < points_per_band; ++i) pts.push_back(lo + h * static_cast<double>(i));
  }
  EnergyGrid g = make_grid(background, std::move(pts), edge_margin);
  g.provenance = EnergyGrid::Provenance::BandScan;
  return g;
}

EssentialSupport essential_support(const JacobiSpec& spec, const EnergyGrid& grid) {
  EssentialSupport out;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const auto above = BoundaryPoint::real_limit(grid.points[i]);
    const bool l = ac_density(m_left(spec, 0, above)) > kSupportThreshold;
    const bool r = ac_density(m_right(spec, 0, above)) > kSupportThreshold;
    if (l) out.left.push_back(i);
    if (r) out.right.push_back(i);
    if (l || r) out.either.push_back(i);
  }
  return out;
}

bool CriteriaReport::all_agree() const {
  return std::all_of(points.begin(), points.end(), [](const PointReport& p) { return p.agree; });
}

double CriteriaReport::worst_gap_violation(double small, double large) const {
  double worst = 0.0;
  auto check = [&](double v) {
    if (v > small && v < large) worst = std::max(worst, v);
  };
  for (const PointReport& p : points)
    for (const CutSiteRow& r : p.rows) {
      check(std::abs(r.re_G));
      check(r.specref_residual);
      check(r.s_ll_mag);
      check(r.s_rr_mag);
    }
  return worst;
}

bool CriteriaReport::residual_gap(double small, double large) const {
  return worst_gap_violation(small, large) == 0.0;
}

CriteriaReport reflectionless_report(const JacobiSpec& spec, const EnergyGrid& grid, long n_first, long n_last,
                                     double tau) {
  if (n_last < n_first) throw Error(ErrorCode::InvalidArgument, "empty cut-site range");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "τ must be positive");
  CriteriaReport report;
  report.tau = tau;
  report.n_first = n_first;
  report.n_last = n_last;

  for (double lambda : grid.points) {
    PointReport pr;
    pr.lambda = lambda;
    try {
      const auto above = BoundaryPoint::real_limit(lambda);
      for (long n = n_first; n <= n_last; ++n) {
        CutSiteRow row;
        row.n = n;
        const ScatteringMatrix s = scattering_matrix(spec, n, lambda);
        const cplx g = green_diag(spec, n, above).value;
        const cplx mr = m_right(spec, n, above).value;
        const cplx ml_below = std::conj(m_left(spec, n + 1, above).value);
        const double an = spec.a(n);
        row.re_G = g.real();
        row.specref_residual = std::abs(an * an * mr * ml_below - 1.0);
        row.s_ll_mag = std::abs(s.s_ll);
        row.s_rr_mag = std::abs(s.s_rr);
        pr.rows.push_back(row);
      }
    } catch (const Error& e) {
      if (!droppable(e.code())) throw;
      report.dropped.push_back({lambda, e.what()});
      continue;
    }

    auto small = [tau](double v) { return std::abs(v) <= tau; };
    pr.verdict_mt = std::all_of(pr.rows.begin(), pr.rows.end(), [&](const CutSiteRow& r) { return small(r.re_G); });
    // Ranges shorter than three sites fall back to the all-n verdict.
    pr.verdict_triple = pr.rows.size() < 3 && pr.verdict_mt;
    for (std::size_t i = 0; i + 2 < pr.rows.size(); ++i)
      if (small(pr.rows[i].re_G) && small(pr.rows[i + 1].re_G) && small(pr.rows[i + 2].re_G)) {
        pr.verdict_triple = true;
        break;
      }
    pr.verdict_spec = std::all_of(pr.rows.begin(), pr.rows.end(),
                                  [&](const CutSiteRow& r) { return small(r.specref_residual); });
    pr.verdict_stat = std::all_of(pr.rows.begin(), pr.rows.end(),
                                  [&](const CutSiteRow& r) { return small(r.s_diag_mag()); });
    pr.agree = pr.verdict_mt == pr.verdict_triple && pr.verdict_mt == pr.verdict_spec &&
               pr.verdict_mt == pr.verdict_stat;
    report.points.push_back(std::move(pr));
  }
  return report;
}

double fermi(double lambda, double beta, double mu) {
  const double x = beta * (lambda - mu);
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double transmission(const JacobiSpec& spec, double lambda) { return std::norm(scattering_matrix(spec, 0, lambda).s_lr); }

Currents landauer_current(const JacobiSpec& spec, const Reservoirs& res, const QuadratureOptions& q) {
  if (!(res.beta_l > 0.0) || !(res.beta_r > 0.0))
    throw Error(ErrorCode::InvalidArgument, "inverse temperatures must be positive");
  if (!std::isfinite(res.mu_l) || !std::isfinite(res.mu_r))
    throw Error(ErrorCode::NonFiniteEntry, "chemical potentials must be finite");

  auto bias = [&](double l) { return fermi(l, res.beta_l, res.mu_l) - fermi(l, res.beta_r, res.mu_r); };
  Currents out;
  if (res.beta_l == res.beta_r && res.mu_l == res.mu_r) return out;

  for (const Band& b : spec.background().bands()) {
    const double d = q.edge_fraction * b.width();
    const double lo = b.lower + d;
    const double hi = b.upper - d;
    auto charge = [&](double l) { return transmission(spec, l) * bias(l); };
    auto energy = [&](double l) { return l * transmission(spec, l) * bias(l); };
    out.charge += kronrod(charge, lo, hi, q);
    out.energy += kronrod(energy, lo, hi, q);

    // Edge strips: T frozen at the strip's inner end, Fermi factors integrated.
    using strip_rule = boost::math::quadrature::gauss<double, 10>;
    for (const auto& [s0, s1, inner] : {std::tuple{b.lower, lo, lo}, std::tuple{hi, b.upper, hi}}) {
      const double t_edge = transmission(spec, inner);
      out.charge += t_edge * strip_rule::integrate(bias, s0, s1);
      out.energy += t_edge * strip_rule::integrate([&](double l) { return l * bias(l); }, s0, s1);
    }
  }
  out.charge /= 2.0 * std::numbers::pi;
  out.energy /= 2.0 * std::numbers::pi;
  return out;
}

}  // namespace refl
