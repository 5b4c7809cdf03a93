#include "btv/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "btv/parallel.hpp"

namespace btv {

double violation_margin(const Spec& region, const Vector& y) {
  if (const auto* s = std::get_if<PolytopeSpec>(&region)) {
    const double worst = (s->gamma * y + s->psi).maxCoeff();
    return s->polarity == Polarity::kSafeRegion ? worst : -worst;
  }
  const auto& e = std::get<EllipsoidSpec>(region);
  const Vector d = y - e.a;
  const double excess = d.dot(e.q * d) - e.radius * e.radius;
  return e.polarity == Polarity::kSafeRegion ? excess : -excess;
}

double witness_guard(const Spec& region) {
  double scale;
  if (const auto* s = std::get_if<PolytopeSpec>(&region)) {
    scale = std::max(s->psi.cwiseAbs().maxCoeff(), s->gamma.cwiseAbs().maxCoeff());
  } else {
    const auto& e = std::get<EllipsoidSpec>(region);
    scale = e.radius * e.radius;
  }
  return kWitnessGuard * std::max(scale, std::numeric_limits<double>::min());
}

namespace {

struct Candidate {
  Vector x0;
  PiecewiseConstantSignal input;
};

Vector random_vertex(const HyperBox& box, std::mt19937_64& rng) {
  Vector v = box.lb();
  for (Index i = 0; i < box.dim(); ++i)
    if (rng() & 1U) v[i] = box.ub()[i];
  return v;
}

Vector random_point(const HyperBox& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector v(box.dim());
  for (Index i = 0; i < box.dim(); ++i)
    v[i] = box.lb()[i] + unit(rng) * (box.ub()[i] - box.lb()[i]);
  return v;
}

PiecewiseConstantSignal random_signal(const HyperBox& u, double t_f, bool vertices,
                                      std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> times{0.0};
  const int switches = count(rng);
  for (int i = 0; i < switches; ++i) times.push_back(unit(rng) * t_f);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<Vector> values;
  for (std::size_t i = 0; i < times.size(); ++i)
    values.push_back(vertices ? random_vertex(u, rng) : random_point(u, rng));
  return PiecewiseConstantSignal(std::move(times), std::move(values));
}

Candidate make_candidate(std::size_t index, const HyperBox& x0, const HyperBox& u,
                         double t_f, std::mt19937_64& rng) {
  switch (index % 4) {
    case 0:
      return {random_vertex(x0, rng),
              PiecewiseConstantSignal::constant(random_vertex(u, rng))};
    case 1:
      return {random_vertex(x0, rng), random_signal(u, t_f, true, rng)};
    case 2:
      return {random_point(x0, rng), random_signal(u, t_f, false, rng)};
    default:
      return {random_point(x0, rng),
              PiecewiseConstantSignal::constant(random_vertex(u, rng))};
  }
}

}  // namespace

std::optional<Witness> find_unsafe_witness(
    const LtiSystem& sys, const Matrix& initial_map, const HyperBox& x0,
    const HyperBox& u_box, const std::vector<TransformedSpec>& specs, double t_f,
    const WitnessOptions& opts) {
  if (opts.budget == 0) throw std::invalid_argument("witness budget must be positive");
  if (initial_map.rows() != sys.n() || initial_map.cols() != x0.dim())
    throw DimensionError("initial map", "does not match the system and box");
  if (u_box.dim() != sys.m()) throw DimensionError("input", "dimension does not match m");

  const double h = opts.step_h > 0.0 ? opts.step_h : default_sim_step(sys.A(), t_f);
  double h_full = h;
  if (opts.confirm_with) h_full = std::min(h, default_sim_step(opts.confirm_with->A(), t_f));

  std::mt19937_64 rng(opts.seed);
  std::vector<Candidate> candidates;
  candidates.reserve(opts.budget);
  for (std::size_t i = 0; i < opts.budget; ++i)
    candidates.push_back(make_candidate(i, x0, u_box, t_f, rng));

  std::vector<std::optional<Witness>> hits(candidates.size());
  std::atomic<std::size_t> first_hit{candidates.size()};
  parallel_for(candidates.size(), [&](std::size_t i) {
    if (i > first_hit.load()) return;
    const Candidate& cand = candidates[i];
    const Vector xr0 = initial_map * cand.x0;
    const Trajectory tr = simulate(sys, xr0, cand.input, t_f, h);
    for (std::size_t s = 0; s < tr.t.size(); ++s) {
      for (std::size_t k = 0; k < specs.size(); ++k) {
        if (!specs[k].witness_region) continue;
        const Spec& region = *specs[k].witness_region;
        const double margin = violation_margin(region, tr.y[s]);
        if (!(margin >= witness_guard(region))) continue;
        Witness w{cand.x0, xr0, cand.input, tr.t[s], tr.y[s], std::nullopt, k, margin, i};
        if (opts.confirm_with) {
          const Trajectory full =
              simulate(*opts.confirm_with, cand.x0, cand.input, tr.t[s], h_full);
          if (spec_satisfied(specs[k].original, full.y.back())) continue;
          w.y_full = full.y.back();
        }
        hits[i] = std::move(w);
        std::size_t cur = first_hit.load();
        while (i < cur && !first_hit.compare_exchange_weak(cur, i)) {
        }
        return;
      }
    }
  });
  for (auto& h_opt : hits)
    if (h_opt) return std::move(h_opt);
  return std::nullopt;
}

std::optional<Witness> find_unsafe_witness(
    const LtiSystem& sys, const HyperBox& x0, const HyperBox& u_box,
    const std::vector<TransformedSpec>& specs, double t_f,
    const WitnessOptions& opts) {
  return find_unsafe_witness(sys, Matrix::Identity(sys.n(), sys.n()), x0, u_box,
                             specs, t_f, opts);
}

}  // namespace btv
