#include "pbicm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace pbicm {

namespace {

// Eigenvalues of the Jacobi matrix (Golub-Welsch) as starting points.
std::vector<double> jacobi_eigenvalues(const Eigen::VectorXd& diag, const Eigen::VectorXd& off) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Jacobi eigenvalue solver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

// Golub-Welsch nodes polished by Newton steps on the three-term recurrence
// in long double; weights come from the derivative at the polished node.
GaussRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("rule needs at least one node");
  using R = long double;
  const R pim4 = 0.7511255444649424828587030047762276930510L;  // pi^(-1/4)
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k / 2.0);
  const std::vector<double> start = jacobi_eigenvalues(Eigen::VectorXd::Zero(n), off);

  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    R z = start[static_cast<std::size_t>(i)];
    R pp = 0;
    for (int iter = 0; iter < 20; ++iter) {
      R p1 = pim4;
      R p2 = 0;
      for (int j = 0; j < n; ++j) {
        const R p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(R(2) / R(j + 1)) * p2 - std::sqrt(R(j) / R(j + 1)) * p3;
      }
      pp = std::sqrt(R(2 * n)) * p2;
      const R z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-17L * std::max(R(1), std::abs(z))) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(z);
    rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(2.0L / (pp * pp));
  }
  // Exact symmetry.
  for (int i = 0; i < n / 2; ++i) {
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
    const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
    rule.nodes[a] = -x;
    rule.nodes[b] = x;
    rule.weights[a] = rule.weights[b] = w;
  }
  if (n % 2) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

GaussRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("rule needs at least one node");
  using R = long double;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) off[k - 1] = k;
  const std::vector<double> start = jacobi_eigenvalues(diag, off);

  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    R z = start[static_cast<std::size_t>(i)];
    R p1 = 0;
    R p2 = 0;
    R pp = 0;
    for (int iter = 0; iter < 20; ++iter) {
      p1 = 1;
      p2 = 0;
      for (int j = 0; j < n; ++j) {
        const R p3 = p2;
        p2 = p1;
        p1 = ((2 * j + 1 - z) * p2 - j * p3) / (j + 1);
      }
      pp = (n * p1 - n * p2) / z;
      const R z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-17L * std::max(R(1), std::abs(z))) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(z);
    rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(-1.0L / (pp * n * p2));
  }
  return rule;
}

QuadratureGrid make_grid(const ChannelModel& ch, const QuadratureSpec& spec) {
  if (ch.is_discrete()) throw std::invalid_argument("discrete channels need no quadrature grid");
  if (spec.phase_nodes < 1) throw std::invalid_argument("need at least one phase node");

  QuadratureGrid grid;
  if (ch.kind() == ChannelKind::RayleighCsi) {
    const GaussRule lag = gauss_laguerre(spec.laguerre_nodes);
    for (int k = 0; k < spec.laguerre_nodes; ++k) {
      for (int p = 0; p < spec.phase_nodes; ++p) {
        const double phase = 2.0 * std::numbers::pi * p / spec.phase_nodes;
        grid.fades.push_back({std::polar(std::sqrt(lag.nodes[k]), phase), lag.weights[k] / spec.phase_nodes});
      }
    }
  } else {
    grid.fades.push_back({Complex(1.0, 0.0), 1.0});
  }

  const GaussRule gh = gauss_hermite(spec.hermite_nodes);
  double max_noise = 0.0;
  for (double wa : gh.weights)
    for (double wb : gh.weights) max_noise = std::max(max_noise, wa * wb);
  double max_fade = 0.0;
  for (const FadeNode& f : grid.fades) max_fade = std::max(max_fade, f.weight);

  const double threshold = spec.prune * max_noise * max_fade;
  grid.noise.resize(grid.fades.size());
  for (std::size_t f = 0; f < grid.fades.size(); ++f) {
    auto& list = grid.noise[f];
    for (int a = 0; a < spec.hermite_nodes; ++a) {
      for (int b = 0; b < spec.hermite_nodes; ++b) {
        const double w = gh.weights[a] * gh.weights[b];
        if (w * grid.fades[f].weight < threshold) continue;
        list.push_back({Complex(gh.nodes[a], gh.nodes[b]), w / std::numbers::pi});
      }
    }
  }
  // Fade nodes whose every noise node was pruned carry no mass.
  std::size_t kept = 0;
  for (std::size_t f = 0; f < grid.fades.size(); ++f) {
    if (grid.noise[f].empty()) continue;
    if (kept != f) {
      grid.fades[kept] = grid.fades[f];
      grid.noise[kept] = std::move(grid.noise[f]);
    }
    ++kept;
  }
  grid.fades.resize(kept);
  grid.noise.resize(kept);
  return grid;
}

}  // namespace pbicm
