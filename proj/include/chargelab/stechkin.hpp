#pragma once

// Closed forms for the modulus of continuity Ω(δ), the best approximation
// E_N by operators of norm <= N, the optimal averaging step, plus numerical
// cross-checks and a derivative-recovery procedure for noisy data.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chargelab/charge.hpp"
#include "chargelab/geometry.hpp"
#include "chargelab/steklov.hpp"

namespace chargelab {

class ProblemSetting {
 public:
  enum class Kind { charge, mixed };

  // D_μ on charges over C with unit gradient bound in |·|_{K°}.
  static ProblemSetting charge(const ConvexBody& body, const Cone& cone);
  // ∂_I on R^m_+ x R^{d-m}, K = (-1,1)^d.
  static ProblemSetting mixed(int d, int m);

  Kind kind() const { return kind_; }
  int dimension() const { return d_; }
  int m() const { return m_; }
  // μ(K∩C); 2^{d-m} in the mixed setting
  double volume() const { return volume_; }
  // The μ for which the charge formulas give the setting's closed forms:
  // μ(K∩C) for charges, 2^{-m} for mixed derivatives.
  double effective_volume() const { return effective_volume_; }
  std::string describe() const;

 private:
  ProblemSetting(Kind kind, int d, int m, double volume, double effective_volume, std::string label);
  Kind kind_;
  int d_;
  int m_;
  double volume_;
  double effective_volume_;
  std::string label_;
};

// ((d+1)δ/μ)^{1/(d+1)}, mixed: (2^m(d+1)δ)^{1/(d+1)}
double omega(const ProblemSetting& s, double delta);
// d/(d+1)·(1/(Nμ))^{1/d}, mixed: d/(d+1)·(2^m/N)^{1/d}
double stechkin_error(const ProblemSetting& s, double N);
// Norm of the averaging operator with step h: 1/(h^d μ), mixed: 2^m/h^d
double operator_norm(const ProblemSetting& s, double h);
double optimal_h_for_delta(const ProblemSetting& s, double delta);
double optimal_h_for_N(const ProblemSetting& s, double N);
// d·h/(d+1) + δ·operator_norm(h): the worst-case recovery error with step h.
double additive_bound(const ProblemSetting& s, double h, double delta);

struct SandwichRow {
  double delta = 0.0;
  double omega = 0.0;
  double inf_value = 0.0;  // inf_N {E_N + Nδ}
  double argmin_N = 0.0;
  double relative_gap = 0.0;
  bool ok = false;  // relative_gap <= 1e-6
};

// For each δ: inf over N of E_N + Nδ by a 64-point log grid on
// [1e-3, 1e3]/effective_volume (widened when the minimum sits on an end),
// refined by golden-section search in log N; compared with Ω(δ).
std::vector<SandwichRow> sandwich_check(const ProblemSetting& s, std::span<const double> deltas);

struct StechkinCurvePoint {
  double N = 0.0;
  double error = 0.0;  // E_N
  double h = 0.0;      // step with operator norm N
};

std::vector<StechkinCurvePoint> stechkin_curve(const ProblemSetting& s, std::span<const double> Ns);

std::vector<double> log_space(double lo, double hi, int count);

// ---------------------------------------------------------------------------
// Recovery

struct RecoveryResult {
  MaskedField estimate;
  std::optional<double> estimate_at_origin;  // when the grid covers θ
  double h = 0.0;
  double omega = 0.0;  // Ω(δ)
  double bound = 0.0;  // additive_bound at the step actually used
  std::vector<std::string> warnings;
};

// S_{h*(δ)} applied to the noisy charge.
RecoveryResult recover_derivative(const Charge& noisy, double delta, const ConvexBody& body);

// S̄_h applied to noisy samples of f with ‖noise‖_∞ <= δ. h*(δ) is snapped to
// the nearest positive multiple of the grid spacing (with a warning).
RecoveryResult recover_mixed(const GridField& noisy, double delta, int m);

struct RecoveryError {
  double value = 0.0;
  Vec argmax;
  double coverage = 1.0;  // fraction of centers in C with a valid estimate
};

// sup over valid centers in C (and θ when both sides have it) of
// |truth - estimate|. `truth` is the true derivative; θ uses its callback.
RecoveryError recovery_error(const RecoveryResult& r, const GridField& truth, const Cone& cone);

struct RecoveryDemo {
  std::string kind;  // worst-case or typical
  double delta = 0.0;
  double omega = 0.0;
  double h = 0.0;
  double error = 0.0;
  double perturbation_norm = 0.0;  // ‖perturbation‖_K as measured
  double coverage = 1.0;
  std::string grid;
  std::vector<std::string> warnings;
  std::optional<RecoveryResult> result;
};

// Truth ν_{e,h*(δ)} with perturbation -δ·ν_{e,h*}/‖ν_{e,h*}‖_K, so the data is
// (numerically) the zero charge and no method can tell the two apart.
RecoveryDemo worst_case_recovery(const ConvexBody& body, const Cone& cone, double delta, int n);

// Gaussian truth scaled to gradient bound 1/2 plus filtered noise scaled to
// ‖·‖_K = δ.
RecoveryDemo typical_recovery(const ConvexBody& body, const Cone& cone, double delta, int n, std::uint64_t seed);

// Mixed setting, m <= 1: truth is the extremal f (m = 0) or g (m = 1) with step
// h*(δ) and the data is f - δ·f/‖f‖_∞. The grid spacing is h*/(n/4).
RecoveryDemo worst_case_mixed_recovery(int d, int m, double delta, int n);

// Mixed setting: Gaussian product with sup|∇∂_I f|_1 = 1/2 plus filtered noise
// with sup norm δ. The step is snapped to the grid.
RecoveryDemo typical_mixed_recovery(int d, int m, double delta, int n, std::uint64_t seed);

}  // namespace chargelab
