#pragma once

#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pbicm/channel.hpp"
#include "pbicm/constellation.hpp"
#include "pbicm/quadrature.hpp"
#include "pbicm/tables.hpp"

namespace pbicm {

// All information quantities are in bits (base-2 logs).

/// Thrown when the node-doubling check disagrees by more than
/// kQuadratureTolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Information-theoretic view of a base channel with a labeled
/// constellation: moments of the information density for W and every W_s,
/// plus the integration tables needed for E0. Expensive pieces are built
/// lazily and once; all accessors are safe to call concurrently.
class ChannelAnalysis {
 public:
  ChannelAnalysis(ChannelModel base, Constellation cons, QuadratureSpec spec = {});

  const ChannelModel& base() const { return base_; }
  const Constellation& constellation() const { return cons_; }
  const QuadratureSpec& spec() const { return spec_; }
  int levels() const { return cons_.bits_per_symbol(); }

  /// Information moments. For continuous channels the first call starts at
  /// the configured resolution and doubles it until capacities and
  /// dispersions move by at most 1e-4 between two resolutions; the coarser
  /// of the agreeing pair is kept. Throws QuadratureError when
  /// spec().max_refinements doublings do not get there.
  const ChannelMoments& moments() const;
  /// Resolution the moments were accepted at.
  const QuadratureSpec& moments_spec() const;

  /// Binary table of W_s (0-based label position).
  const WeightedTable& subchannel_table(int s) const;
  /// Table of W with equiprobable X (built on first use).
  const WeightedTable& full_table() const;
  /// False when the full table is too large to keep; E0 then streams it.
  bool full_table_stored() const;

 private:
  ChannelModel base_;
  Constellation cons_;
  QuadratureSpec spec_;

  mutable std::once_flag moments_once_;
  mutable ChannelMoments moments_;
  mutable QuadratureSpec moments_spec_;
  mutable std::once_flag sub_once_;
  mutable std::vector<WeightedTable> sub_;
  mutable std::once_flag full_once_;
  mutable WeightedTable full_;
};

using AnalysisPtr = std::shared_ptr<const ChannelAnalysis>;

AnalysisPtr analyze(ChannelModel base, Constellation cons, QuadratureSpec spec = {});

enum class E0Kind { Subchannel, WbarCombined, WachsmannAveraged, Unconstrained };

/// rho -> E0(rho) in bits for one of the channels derived from an analysis.
///
///   Subchannel(s)      E0 of W_s with equiprobable input
///   WbarCombined       -log2 mean_s 2^(-E0_s(rho)), the E0 of the dithered state channel
///   WachsmannAveraged  mean_s E0_s(rho); overestimates the combined value (Jensen)
///   Unconstrained      E0 of W with equiprobable X
///
/// Values are memoized by rho; the cache is mutex-protected.
class E0Evaluator {
 public:
  static E0Evaluator subchannel(AnalysisPtr a, int s);
  static E0Evaluator wbar_combined(AnalysisPtr a);
  static E0Evaluator wachsmann_averaged(AnalysisPtr a);
  static E0Evaluator unconstrained(AnalysisPtr a);

  E0Kind kind() const { return kind_; }
  int state() const { return state_; }
  const ChannelAnalysis& analysis() const { return *analysis_; }

  double operator()(double rho) const;

  /// E0'(0): the capacity of the channel this evaluator describes (for the
  /// averaged variant, the mean sub-channel capacity).
  double capacity() const;

  E0Evaluator(const E0Evaluator& other);
  E0Evaluator& operator=(const E0Evaluator&) = delete;

 private:
  E0Evaluator(E0Kind kind, AnalysisPtr a, int s);
  double compute(double rho) const;

  E0Kind kind_;
  AnalysisPtr analysis_;
  int state_ = 0;
  mutable std::mutex mutex_;
  mutable std::map<double, double> cache_;
};

double e0(const E0Evaluator& ev, double rho);

inline constexpr double kSpherePackingRhoMax = 100.0;
inline constexpr double kInfiniteExponent = std::numeric_limits<double>::infinity();

struct ExponentPoint {
  double value = 0.0;  // bits
  double rho = 0.0;    // maximizer
};

/// max over rho in [0,1] of E0(rho) - rho R.
ExponentPoint random_coding_point(const E0Evaluator& ev, double rate_bits);
double random_coding_exponent(const E0Evaluator& ev, double rate_bits);

/// sup over rho in (0, 100] of E0(rho) - rho R; kInfiniteExponent when the
/// supremum sits at the cap.
ExponentPoint sphere_packing_point(const E0Evaluator& ev, double rate_bits);
double sphere_packing_exponent(const E0Evaluator& ev, double rate_bits);

/// dE0/drho at rho = 1 by central difference (h = 1e-5).
double critical_rate(const E0Evaluator& ev);

double capacity_subchannel(const ChannelAnalysis& a, int s);
double capacity_pbicm(const ChannelAnalysis& a);
double capacity_cm(const ChannelAnalysis& a);

enum class ExponentBound { RandomCoding, SpherePacking };

/// Exponent of the parallel scheme at total rate R (bits per channel use):
/// the bound of the dithered state channel at R / L, times L when normalized.
double pbicm_exponent(const AnalysisPtr& a, double rate_total_bits, ExponentBound bound, bool normalized);

double pbicm_critical_rate(const AnalysisPtr& a);

struct SubchannelDispersion {
  double capacity = 0.0;    // bits
  double dispersion = 0.0;  // bits^2
};

struct DispersionReport {
  std::vector<SubchannelDispersion> per_subchannel;
  double c_wbar = 0.0;
  double v_wbar = 0.0;
  double c_pbicm = 0.0;
  double v_pbicm = 0.0;
  double penalty = 0.0;  // variance over the uniform state of C(W_S)
};

/// v_wbar is the variance of the information density of the dithered state
/// channel computed from its own second moment; the report also carries the
/// sub-channel terms of the total-variance decomposition so the identity can
/// be checked independently.
DispersionReport dispersion_report(const ChannelAnalysis& a);

struct RateBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Normal approximation of the achievable-rate sandwich; the O(1/n) and
/// O(log n / n) remainders are dropped.
RateBounds rate_bounds(const ChannelAnalysis& a, double blocklength, double pe);
RateBounds rate_bounds(const DispersionReport& r, int levels, double blocklength, double pe);

/// (C - R)^2 / (2 V ln 2).
double exponent_gaussian_approx(double capacity_bits, double dispersion_bits2, double rate_bits);

enum class CurveKind { RandomCoding, SpherePacking, PbicmRandomCoding, PbicmNormalized, UnconstrainedRandomCoding };

std::string_view to_string(CurveKind kind);

struct ExponentCurve {
  CurveKind kind;
  std::vector<double> rates;   // bits per channel use
  std::vector<double> values;  // bits
};

/// Evaluates a curve on a rate grid. RandomCoding and SpherePacking use
/// `ev` directly; the Pbicm kinds use `ev` as the combined evaluator and
/// rescale the rate by L; UnconstrainedRandomCoding expects an unconstrained
/// evaluator. Rates are evaluated in parallel.
ExponentCurve exponent_curve(const E0Evaluator& ev, CurveKind kind, const std::vector<double>& rates);

/// start, start+step, ..., up to stop inclusive (within step/1e6).
std::vector<double> rate_grid(double start, double stop, double step);

}  // namespace pbicm
