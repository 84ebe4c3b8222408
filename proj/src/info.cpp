#include "pbicm/info.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pbicm/optimize.hpp"
#include "pbicm/qfunc.hpp"

namespace pbicm {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double bits(double nats) { return nats / kLn2; }
double bits2(double nats2) { return nats2 / (kLn2 * kLn2); }

double variance_bits2(const InfoMoments& m) { return bits2(m.second) - bits(m.mean) * bits(m.mean); }

// Empty when the two resolutions agree, otherwise what moved.
std::string convergence_failure(const ChannelMoments& coarse, const ChannelMoments& fine) {
  std::string why;
  auto check = [&](double a, double b, const char* what) {
    if (why.empty() && std::abs(a - b) > kQuadratureTolerance) {
      why = std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b);
    }
  };
  check(bits(coarse.full.mean), bits(fine.full.mean), "capacity");
  check(variance_bits2(coarse.full), variance_bits2(fine.full), "dispersion");
  for (std::size_t s = 0; s < coarse.sub.size(); ++s) {
    check(bits(coarse.sub[s].mean), bits(fine.sub[s].mean), "sub-channel capacity");
    check(variance_bits2(coarse.sub[s]), variance_bits2(fine.sub[s]), "sub-channel dispersion");
  }
  return why;
}

}  // namespace

ChannelAnalysis::ChannelAnalysis(ChannelModel base, Constellation cons, QuadratureSpec spec)
    : base_(std::move(base)), cons_(std::move(cons)), spec_(spec) {
  check_compatible(base_, cons_);
}

const ChannelMoments& ChannelAnalysis::moments() const {
  std::call_once(moments_once_, [this] {
    QuadratureSpec s = spec_;
    ChannelMoments m = accumulate_moments(base_, cons_, s);
    if (!base_.is_discrete()) {
      for (int k = 0;; ++k) {
        ChannelMoments fine = accumulate_moments(base_, cons_, s.doubled());
        const std::string why = convergence_failure(m, fine);
        if (why.empty()) break;
        if (k >= spec_.max_refinements) {
          throw QuadratureError("quadrature did not converge at " + std::to_string(s.hermite_nodes) +
                                " Hermite nodes for " + why);
        }
        m = std::move(fine);
        s = s.doubled();
      }
    }
    moments_ = std::move(m);
    moments_spec_ = s;
  });
  return moments_;
}

const QuadratureSpec& ChannelAnalysis::moments_spec() const {
  moments();
  return moments_spec_;
}

const WeightedTable& ChannelAnalysis::subchannel_table(int s) const {
  if (s < 0 || s >= levels()) throw std::out_of_range("sub-channel index out of range");
  std::call_once(sub_once_, [this] { sub_ = build_tables(base_, cons_, spec_, false).sub; });
  return sub_[static_cast<std::size_t>(s)];
}

const WeightedTable& ChannelAnalysis::full_table() const {
  std::call_once(full_once_, [this] { full_ = std::move(build_tables(base_, cons_, spec_, true).full); });
  return full_;
}

bool ChannelAnalysis::full_table_stored() const {
  return node_count(base_, cons_, spec_) * cons_.size() <= kMaxStoredTableEntries;
}

AnalysisPtr analyze(ChannelModel base, Constellation cons, QuadratureSpec spec) {
  return std::make_shared<const ChannelAnalysis>(std::move(base), std::move(cons), spec);
}

E0Evaluator::E0Evaluator(E0Kind kind, AnalysisPtr a, int s) : kind_(kind), analysis_(std::move(a)), state_(s) {
  if (!analysis_) throw std::invalid_argument("E0 evaluator needs an analysis");
  if (kind == E0Kind::Subchannel && (s < 0 || s >= analysis_->levels())) {
    throw std::out_of_range("sub-channel index out of range");
  }
}

E0Evaluator::E0Evaluator(const E0Evaluator& other)
    : kind_(other.kind_), analysis_(other.analysis_), state_(other.state_) {
  std::lock_guard lock(other.mutex_);
  cache_ = other.cache_;
}

E0Evaluator E0Evaluator::subchannel(AnalysisPtr a, int s) { return {E0Kind::Subchannel, std::move(a), s}; }
E0Evaluator E0Evaluator::wbar_combined(AnalysisPtr a) { return {E0Kind::WbarCombined, std::move(a), 0}; }
E0Evaluator E0Evaluator::wachsmann_averaged(AnalysisPtr a) { return {E0Kind::WachsmannAveraged, std::move(a), 0}; }
E0Evaluator E0Evaluator::unconstrained(AnalysisPtr a) { return {E0Kind::Unconstrained, std::move(a), 0}; }

double E0Evaluator::operator()(double rho) const {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(rho); it != cache_.end()) return it->second;
  }
  const double v = compute(rho);
  std::lock_guard lock(mutex_);
  cache_.emplace(rho, v);
  return v;
}

double E0Evaluator::compute(double rho) const {
  const ChannelAnalysis& a = *analysis_;
  const int levels = a.levels();
  switch (kind_) {
    case E0Kind::Subchannel: return -std::log2(gallager_sum(a.subchannel_table(state_), rho));
    case E0Kind::WbarCombined: {
      double mean = 0.0;
      for (int s = 0; s < levels; ++s) mean += gallager_sum(a.subchannel_table(s), rho);
      return -std::log2(mean / levels);
    }
    case E0Kind::WachsmannAveraged: {
      double mean = 0.0;
      for (int s = 0; s < levels; ++s) mean += -std::log2(gallager_sum(a.subchannel_table(s), rho));
      return mean / levels;
    }
    case E0Kind::Unconstrained:
      if (a.full_table_stored()) return -std::log2(gallager_sum(a.full_table(), rho));
      return -std::log2(streamed_gallager_sum(a.base(), a.constellation(), a.spec(), rho));
  }
  return 0.0;
}

double E0Evaluator::capacity() const {
  const ChannelAnalysis& a = *analysis_;
  switch (kind_) {
    case E0Kind::Subchannel: return capacity_subchannel(a, state_);
    case E0Kind::WbarCombined:
    case E0Kind::WachsmannAveraged: return capacity_pbicm(a) / a.levels();
    case E0Kind::Unconstrained: return capacity_cm(a);
  }
  return 0.0;
}

double e0(const E0Evaluator& ev, double rho) { return ev(rho); }

ExponentPoint random_coding_point(const E0Evaluator& ev, double rate_bits) {
  if (!(rate_bits >= 0.0)) throw std::invalid_argument("rate must be >= 0");
  const Maximum m = concave_max([&](double rho) { return ev(rho) - rho * rate_bits; }, 0.0, 1.0);
  return {std::max(0.0, m.value), m.x};
}

double random_coding_exponent(const E0Evaluator& ev, double rate_bits) {
  return random_coding_point(ev, rate_bits).value;
}

ExponentPoint sphere_packing_point(const E0Evaluator& ev, double rate_bits) {
  if (!(rate_bits >= 0.0)) throw std::invalid_argument("rate must be >= 0");
  const Maximum m =
      concave_max([&](double rho) { return ev(rho) - rho * rate_bits; }, 0.0, kSpherePackingRhoMax);
  if (m.x >= kSpherePackingRhoMax - 1e-6) return {kInfiniteExponent, m.x};
  return {std::max(0.0, m.value), m.x};
}

double sphere_packing_exponent(const E0Evaluator& ev, double rate_bits) {
  return sphere_packing_point(ev, rate_bits).value;
}

double critical_rate(const E0Evaluator& ev) {
  constexpr double h = 1e-5;
  return (ev(1.0 + h) - ev(1.0 - h)) / (2.0 * h);
}

double capacity_subchannel(const ChannelAnalysis& a, int s) {
  if (s < 0 || s >= a.levels()) throw std::out_of_range("sub-channel index out of range");
  return bits(a.moments().sub[static_cast<std::size_t>(s)].mean);
}

double capacity_pbicm(const ChannelAnalysis& a) {
  double c = 0.0;
  for (int s = 0; s < a.levels(); ++s) c += capacity_subchannel(a, s);
  return c;
}

double capacity_cm(const ChannelAnalysis& a) { return bits(a.moments().full.mean); }

double pbicm_exponent(const AnalysisPtr& a, double rate_total_bits, ExponentBound bound, bool normalized) {
  if (!(rate_total_bits >= 0.0)) throw std::invalid_argument("rate must be >= 0");
  const E0Evaluator ev = E0Evaluator::wbar_combined(a);
  const double levels = a->levels();
  const double r = rate_total_bits / levels;
  const double e = bound == ExponentBound::RandomCoding ? random_coding_exponent(ev, r) : sphere_packing_exponent(ev, r);
  return normalized ? levels * e : e;
}

double pbicm_critical_rate(const AnalysisPtr& a) {
  return a->levels() * critical_rate(E0Evaluator::wbar_combined(a));
}

DispersionReport dispersion_report(const ChannelAnalysis& a) {
  const ChannelMoments& m = a.moments();
  const int levels = a.levels();
  DispersionReport r;
  double c_sum = 0.0;
  double c_sq_sum = 0.0;
  double second_sum = 0.0;
  for (int s = 0; s < levels; ++s) {
    const InfoMoments& sm = m.sub[static_cast<std::size_t>(s)];
    const SubchannelDispersion d{bits(sm.mean), variance_bits2(sm)};
    r.per_subchannel.push_back(d);
    c_sum += d.capacity;
    c_sq_sum += d.capacity * d.capacity;
    second_sum += bits2(sm.second);
  }
  r.c_wbar = c_sum / levels;
  // Second moment of the dithered state channel's information density is the
  // state average of the sub-channel second moments.
  r.v_wbar = second_sum / levels - r.c_wbar * r.c_wbar;
  r.penalty = c_sq_sum / levels - r.c_wbar * r.c_wbar;
  r.c_pbicm = c_sum;
  r.v_pbicm = static_cast<double>(levels) * levels * r.v_wbar;
  return r;
}

RateBounds rate_bounds(const DispersionReport& r, int levels, double blocklength, double pe) {
  if (!(blocklength >= 1.0)) throw std::invalid_argument("blocklength must be >= 1");
  if (!(pe > 0.0 && pe < 1.0)) throw std::invalid_argument("error probability must lie in (0, 1)");
  const double backoff = std::sqrt(r.v_pbicm / blocklength);
  return {r.c_pbicm - backoff * qinv(pe / levels), r.c_pbicm - backoff * qinv(pe)};
}

RateBounds rate_bounds(const ChannelAnalysis& a, double blocklength, double pe) {
  return rate_bounds(dispersion_report(a), a.levels(), blocklength, pe);
}

double exponent_gaussian_approx(double capacity_bits, double dispersion_bits2, double rate_bits) {
  if (!(dispersion_bits2 > 0.0)) throw std::invalid_argument("dispersion must be > 0");
  if (rate_bits > capacity_bits) throw std::invalid_argument("rate must not exceed capacity");
  const double gap = capacity_bits - rate_bits;
  return gap * gap / (2.0 * dispersion_bits2 * kLn2);
}

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::RandomCoding: return "RandomCoding";
    case CurveKind::SpherePacking: return "SpherePacking";
    case CurveKind::PbicmRandomCoding: return "PbicmRandomCoding";
    case CurveKind::PbicmNormalized: return "PbicmNormalized";
    case CurveKind::UnconstrainedRandomCoding: return "UnconstrainedRandomCoding";
  }
  return "?";
}

ExponentCurve exponent_curve(const E0Evaluator& ev, CurveKind kind, const std::vector<double>& rates) {
  ExponentCurve curve{kind, rates, std::vector<double>(rates.size())};
  const double levels = ev.analysis().levels();
  const auto n = static_cast<std::ptrdiff_t>(rates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double r = rates[static_cast<std::size_t>(i)];
    double v = 0.0;
    switch (kind) {
      case CurveKind::RandomCoding:
      case CurveKind::UnconstrainedRandomCoding: v = random_coding_exponent(ev, r); break;
      case CurveKind::SpherePacking: v = sphere_packing_exponent(ev, r); break;
      case CurveKind::PbicmRandomCoding: v = random_coding_exponent(ev, r / levels); break;
      case CurveKind::PbicmNormalized: v = levels * random_coding_exponent(ev, r / levels); break;
    }
    curve.values[static_cast<std::size_t>(i)] = v;
  }
  return curve;
}

std::vector<double> rate_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("rate step must be > 0");
  if (!(stop >= start)) throw std::invalid_argument("rate grid stop must be >= start");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double r = start + static_cast<double>(k) * step;
    if (r > stop + step * 1e-6) break;
    grid.push_back(std::min(r, stop));
  }
  return grid;
}

}  // namespace pbicm
