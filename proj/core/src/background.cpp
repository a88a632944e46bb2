#include "reflectionless/background.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "reflectionless/error.hpp"

namespace refl {

namespace {

void check_entries(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!std::isfinite(a[j]))
      throw Error(ErrorCode::NonFiniteEntry, "background a", static_cast<long>(j));
    if (!(a[j] > 0.0))
      throw Error(ErrorCode::NonPositiveCoefficient, "background a", static_cast<long>(j));
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!std::isfinite(b[j]))
      throw Error(ErrorCode::NonFiniteEntry, "background b", static_cast<long>(j));
  }
}

std::size_t minimal_period(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t p = a.size();
  for (std::size_t d = 1; d < p; ++d) {
    if (p % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < p && repeats; ++i)
      repeats = a[i] == a[i % d] && b[i] == b[i % d];
    if (repeats) return d;
  }
  return p;
}

long floor_mod(long k, long p) {
  long r = k % p;
  return r < 0 ? r + p : r;
}

}  // namespace

Background Background::free() { return constant(1.0, 0.0); }

Background Background::constant(double a, double b) {
  return Background({a}, {b}, 0);
}

Background Background::periodic(std::vector<double> a, std::vector<double> b, long phase) {
  if (a.empty()) throw Error(ErrorCode::InvalidArgument, "periodic background needs at least one a entry");
  if (b.empty()) b.assign(a.size(), 0.0);
  if (a.size() != b.size())
    throw Error(ErrorCode::InvalidArgument, "periodic background: a and b lengths differ (" +
                                                std::to_string(a.size()) + " vs " +
                                                std::to_string(b.size()) + ")");
  return Background(std::move(a), std::move(b), phase);
}

Background::Background(std::vector<double> a, std::vector<double> b, long phase) {
  check_entries(a, b);
  const std::size_t d = minimal_period(a, b);
  a.resize(d);
  b.resize(d);
  a_ = std::move(a);
  b_ = std::move(b);
  phase_ = floor_mod(phase, static_cast<long>(d));
  compute_bands();
}

std::size_t Background::residue(long k) const {
  return static_cast<std::size_t>(floor_mod(k - phase_, static_cast<long>(a_.size())));
}

double Background::max_a() const { return *std::max_element(a_.begin(), a_.end()); }

double Background::floquet_discriminant(double lambda) const {
  // (ψ_{k+1}, ψ_k) = T_k (ψ_k, ψ_{k-1}),  T_k = [[(λ-b_k)/a_k, -a_{k-1}/a_k], [1, 0]]
  const std::size_t p = a_.size();
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double ak = a_[j];
    const double akm1 = a_[(j + p - 1) % p];
    const double t00 = (lambda - b_[j]) / ak;
    const double t01 = -akm1 / ak;
    const double n00 = t00 * m00 + t01 * m10;
    const double n01 = t00 * m01 + t01 * m11;
    m10 = m00;
    m11 = m01;
    m00 = n00;
    m01 = n01;
  }
  return m00 + m11;
}

void Background::compute_bands() {
  // Band edges are the eigenvalues of the cell Hamiltonian with periodic
  // (θ = 0) and antiperiodic (θ = π) boundary conditions.
  const auto p = static_cast<Eigen::Index>(a_.size());
  std::vector<double> edges;
  edges.reserve(2 * a_.size());
  for (double sign : {1.0, -1.0}) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) h(j, j) = b_[j];
    for (Eigen::Index j = 0; j + 1 < p; ++j) {
      h(j, j + 1) += a_[j];
      h(j + 1, j) += a_[j];
    }
    const double wrap = sign * a_[p - 1];
    if (p == 1) {
      h(0, 0) += 2.0 * wrap;
    } else {
      h(p - 1, 0) += wrap;
      h(0, p - 1) += wrap;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    for (Eigen::Index j = 0; j < p; ++j) edges.push_back(solver.eigenvalues()(j));
  }
  std::sort(edges.begin(), edges.end());
  bands_.clear();
  for (std::size_t j = 0; j + 1 < edges.size(); j += 2) bands_.push_back({edges[j], edges[j + 1]});
}

BandLocation Background::locate(double lambda, double relative_margin) const {
  for (const Band& band : bands_) {
    const double margin = relative_margin * std::max(band.width(), 1e-300);
    if (std::abs(lambda - band.lower) <= margin || std::abs(lambda - band.upper) <= margin)
      return BandLocation::NearEdge;
  }
  for (const Band& band : bands_) {
    if (lambda > band.lower && lambda < band.upper) return BandLocation::Interior;
  }
  return BandLocation::Gap;
}

}  // namespace refl
