#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace refl {

/// Closed spectral band [lower, upper] of a periodic background.
struct Band {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool operator==(const Band&) const = default;
};

enum class BandLocation { Interior, Gap, NearEdge };

/// Bi-infinite periodic coefficient rule shared by both tails of a Jacobi
/// operator. Free and one-periodic inputs canonicalize to Constant; a periodic
/// cell that repeats a shorter pattern is reduced to its minimal period.
///
/// Coefficients at site k come from residue (k - phase) mod p. The bond a_k
/// couples sites k and k+1.
class Background {
 public:
  enum class Kind { Constant, Periodic };

  static Background free();
  static Background constant(double a, double b);
  static Background periodic(std::vector<double> a, std::vector<double> b, long phase = 0);

  Kind kind() const { return a_.size() == 1 ? Kind::Constant : Kind::Periodic; }
  std::size_t period() const { return a_.size(); }
  long phase() const { return phase_; }
  std::span<const double> a_cell() const { return a_; }
  std::span<const double> b_cell() const { return b_; }

  std::size_t residue(long k) const;
  double a(long k) const { return a_[residue(k)]; }
  double b(long k) const { return b_[residue(k)]; }
  double max_a() const;

  /// Trace of the one-period transfer matrix; |Δ(λ)| <= 2 exactly on the bands.
  double floquet_discriminant(double lambda) const;

  /// Sorted bands (edges from the periodic / antiperiodic cell eigenproblems).
  const std::vector<Band>& bands() const { return bands_; }

  /// Classifies λ; NearEdge when within `relative_margin` times the adjacent
  /// band's width of any band edge.
  BandLocation locate(double lambda, double relative_margin) const;

  bool operator==(const Background& other) const {
    return a_ == other.a_ && b_ == other.b_ && phase_ == other.phase_;
  }

 private:
  Background(std::vector<double> a, std::vector<double> b, long phase);
  void compute_bands();

  std::vector<double> a_;
  std::vector<double> b_;
  long phase_ = 0;
  std::vector<Band> bands_;
};

}  // namespace refl
