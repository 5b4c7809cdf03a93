// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "btv/manifest.hpp"
#include "btv/verifier.hpp"
#include "fixture.hpp"

using namespace btv;

namespace {

struct Outcome_ {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

PolytopeSpec output_box(const Vector& lo, const Vector& hi, Polarity pol) {
  const Index p = lo.size();
  Matrix g(2 * p, p);
  g << Matrix::Identity(p, p), -Matrix::Identity(p, p);
  Vector psi(2 * p);
  psi << -hi, lo;
  return PolytopeSpec(g, psi, pol);
}

// ------------------------------------------------------------------ 1

Outcome_ closed_form() {
  const LtiSystem sys(Matrix::Constant(1, 1, -1), Matrix::Constant(1, 1, 2),
                      Matrix::Constant(1, 1, 3));
  const auto g = gramians(sys);
  const auto bal = balance(sys);
  const double ewc = std::abs(g.Wc(0, 0) - 2.0), ewo = std::abs(g.Wo(0, 0) - 4.5),
               es = std::abs(bal.sigma[0] - 3.0);
  const double worst = std::max({ewc, ewo, es});
  return {worst <= 1e-12, "Wc=" + num(g.Wc(0, 0)) + " Wo=" + num(g.Wo(0, 0)) +
                              " sigma=" + num(bal.sigma[0]) + " max abs err " + num(worst)};
}

// ------------------------------------------------------------------ 2

Outcome_ lyapunov_residuals() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<Index> dim(5, 50), io(1, 4);
  double worst = 0.0;
  int solves = 0;
  for (int i = 0; i < 100; ++i) {
    const auto sys = random_stable_system(dim(rng), io(rng), io(rng), rng, 1.0 + i % 5);
    const auto g = gramians(sys);
    worst = std::max({worst, g.residual_c, g.residual_o});
    solves += 2;
  }
  return {worst <= 1e-8, std::to_string(solves) + " solves, worst relative residual " + num(worst)};
}

// ------------------------------------------------------------------ 3

Outcome_ hsv_invariance() {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<Index> dim(2, 20), io(1, 3);
  double worst = 0.0, worst_each = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Index n = dim(rng);
    const auto sys = fixture::minimal_system(rng, n, io(rng), io(rng));
    const Matrix t = fixture::random_conditioned(rng, n, 100.0);
    const Matrix ti = t.inverse();
    const Vector a = hankel_singular_values(sys);
    const Vector b = hankel_singular_values(LtiSystem(t * sys.A() * ti, t * sys.B(), sys.C() * ti));
    // Measured against sigma_1: values far below it carry rounding of order
    // eps cond(T) sigma_1 whatever the algorithm.
    for (Index j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(a[j] - b[j]) / a[0]);
      worst_each = std::max(worst_each, std::abs(a[j] - b[j]) / a[j]);
    }
  }
  return {worst <= 1e-6, "50 systems, worst deviation relative to sigma_1 " + num(worst) +
                             " (per-value worst " + num(worst_each) + ")"};
}

// ------------------------------------------------------------------ 4, 5

struct BoundInstance {
  LtiSystem sys;
  BalancedRealization bal;
  Abstraction abs;
  HyperBox x0, u;
  MethodBounds raw;
  ErrorBound combined;
};

constexpr double kTf = 5.0;
constexpr double kGamma = 0.01;
// Rounding floor of the paired simulation: full and reduced models run in
// different coordinates, so at k=n their outputs still differ near 1e-14.
constexpr double kSimFloor = 1e-10;

std::vector<BoundInstance>& bound_instances() {
  static std::vector<BoundInstance> all = [] {
    std::vector<BoundInstance> out;
    std::mt19937_64 rng(4004);
    std::uniform_int_distribution<Index> dim(4, 12), io(1, 3);
    BoundOptions opts;
    opts.e1_methods = {E1Method::kTheorem1, E1Method::kTheorem2, E1Method::kSimulation};
    opts.e2_methods = {E2Method::kTheorem3, E2Method::kSimulation};
    opts.gamma = kGamma;
    while (out.size() < 20) {
      const Index n = dim(rng), m = io(rng), p = std::min<Index>(io(rng), n - 1);
      const Index k = std::uniform_int_distribution<Index>(p + 1, n)(rng);
      auto sys = fixture::minimal_system(rng, n, m, p);
      auto bal = balance(sys);
      HyperBox x0 = fixture::random_box(rng, n, 0.05, 0.5);
      HyperBox u = fixture::random_box(rng, m, 0.05, 0.5);
      Abstraction abs = truncate(bal, k, x0);
      MethodBounds raw;
      ErrorBound eb = compute_error_bound(bal, abs, x0, u, kTf, opts, &raw);
      out.push_back({std::move(sys), std::move(bal), std::move(abs), std::move(x0), std::move(u),
                     std::move(raw), std::move(eb)});
    }
    return out;
  }();
  return all;
}

template <class M>
const Vector* find_method(const std::vector<std::pair<M, Vector>>& v, M m) {
  for (const auto& [k, vec] : v)
    if (k == m) return &vec;
  return nullptr;
}

Outcome_ bound_soundness() {
  auto& inst = bound_instances();
  std::mt19937_64 rng(4005);
  std::ostringstream detail;
  bool pass = true;
  auto trial_loop = [&](const std::string& label, auto&& bound_of, bool zero_input,
                        bool zero_state) {
    long trials = 0, violations = 0, missing = 0;
    for (std::size_t s = 0; s < inst.size(); ++s) {
      const auto& in = inst[s];
      const Vector* b = bound_of(in);
      if (!b) {
        ++missing;
        continue;
      }
      const double h = std::min(0.01, default_sim_step(in.sys.A(), kTf));
      for (int t = 0; t < 50; ++t) {
        const Vector x0 = zero_state ? Vector::Zero(in.sys.n())
                          : t % 2   ? fixture::random_vertex(rng, in.x0)
                                    : fixture::random_point(rng, in.x0);
        const auto u = zero_input ? PiecewiseConstantSignal::constant(Vector::Zero(in.sys.m()))
                                  : fixture::random_signal(rng, in.u, kTf, 1 + t % 8, t % 2 == 0);
        const Vector err = fixture::max_output_error(in.sys, in.abs, x0, u, kTf, h);
        ++trials;
        if ((err.array() > b->array() + kSimFloor).any()) ++violations;
      }
    }
    detail << label << ": " << violations << "/" << trials << " violations";
    if (missing) detail << " (" << missing << " systems without this bound)";
    detail << "; ";
    if (violations || missing) pass = false;
  };

  std::vector<Vector> scratch;
  scratch.reserve(200);
  auto scaled = [&](const Vector* v, bool sim) -> const Vector* {
    if (!v) return nullptr;
    scratch.push_back(sim ? Vector((1.0 + kGamma) * *v) : *v);
    return &scratch.back();
  };
  trial_loop("thm1", [&](const BoundInstance& in) {
    return scaled(find_method(in.raw.e1, E1Method::kTheorem1), false); }, true, false);
  trial_loop("thm2", [&](const BoundInstance& in) {
    return scaled(find_method(in.raw.e1, E1Method::kTheorem2), false); }, true, false);
  trial_loop("sim-e1", [&](const BoundInstance& in) {
    return scaled(find_method(in.raw.e1, E1Method::kSimulation), true); }, true, false);
  trial_loop("thm3", [&](const BoundInstance& in) {
    return scaled(find_method(in.raw.e2, E2Method::kTheorem3), false); }, false, true);
  trial_loop("sim-e2", [&](const BoundInstance& in) {
    return scaled(find_method(in.raw.e2, E2Method::kSimulation), true); }, false, true);
  trial_loop("delta", [&](const BoundInstance& in) { return &in.combined.delta; }, false, false);
  return {pass, detail.str()};
}

Outcome_ bound_ordering() {
  auto& inst = bound_instances();
  int ok = 0;
  std::ostringstream detail;
  for (std::size_t s = 0; s < inst.size(); ++s) {
    const auto& in = inst[s];
    const Vector* t1 = find_method(in.raw.e1, E1Method::kTheorem1);
    const Vector* t2 = find_method(in.raw.e1, E1Method::kTheorem2);
    const Vector* t3 = find_method(in.raw.e2, E2Method::kTheorem3);
    const Vector* s2 = find_method(in.raw.e2, E2Method::kSimulation);
    const bool good = t1 && t2 && t3 && s2 && (s2->array() <= t3->array() + kSimFloor).all() &&
                      (t2->array() <= 1.05 * t1->array()).all();
    if (good) {
      ++ok;
    } else {
      detail << "instance " << s << " out of order (n=" << in.sys.n() << ", k=" << in.abs.k
             << "); ";
    }
  }
  detail << ok << "/" << inst.size() << " instances ordered";
  return {ok >= 19, detail.str()};
}

// ------------------------------------------------------------------ 6

Outcome_ transform_reproduction() {
  Matrix g(2, 1);
  g << 1, -1;
  const auto bm = transform_polytope(
      PolytopeSpec(g, vec({-0.0015, -0.0015}), Polarity::kSafeRegion), vec({3.7219e-4}));
  const auto& safe = std::get<PolytopeSpec>(*bm.safe_region);
  const double hi = -safe.psi[0], lo = safe.psi[1];
  char hs[32], ls[32];
  std::snprintf(hs, sizeof hs, "%.8f", hi);
  std::snprintf(ls, sizeof ls, "%.8f", lo);
  const bool bm_ok = std::string(hs) == "0.00112781" && std::string(ls) == "-0.00112781";

  Matrix q = Matrix::Zero(2, 2);
  q.diagonal() << 178, 625;
  const auto motor = transform_unsafe_ellipsoid(
      EllipsoidSpec(q, vec({0.325, 0.16}), 1.0, Polarity::kUnsafeRegion), vec({0.0234, 0.0189}));
  const double r = std::get<EllipsoidSpec>(motor.unsafe_region).radius;
  const bool motor_ok = r >= 1.56 && r <= 1.57;
  return {bm_ok && motor_ok,
          std::string("building-model safe interval [") + ls + ", " + hs +
              "], motor enlarged radius " + num(r)};
}

// ------------------------------------------------------------------ 7

Outcome_ safety_relation_sampling() {
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix q(2, 2);
  q << 4, 1.5, 1.5, 2;
  Matrix g(3, 2);
  g << 1, 1, -1, 0.5, 0, -1;
  const std::vector<std::pair<std::string, Spec>> specs{
      {"polytope/safe", PolytopeSpec(g, vec({-1, -0.8, -0.6}), Polarity::kSafeRegion)},
      {"polytope/unsafe", PolytopeSpec(g, vec({-1, -0.8, -0.6}), Polarity::kUnsafeRegion)},
      {"ellipsoid/safe", EllipsoidSpec(q, vec({0.1, -0.2}), 1.0, Polarity::kSafeRegion)},
      {"ellipsoid/unsafe", EllipsoidSpec(q, vec({0.1, -0.2}), 1.0, Polarity::kUnsafeRegion)}};
  const Vector delta = vec({0.08, 0.05});
  long violations = 0, total = 0;
  for (const auto& [name, s] : specs) {
    const auto t = transform(s, delta);
    for (int i = 0; i < 10000; ++i) {
      const Vector yr = vec({1.5 * u(rng), 1.5 * u(rng)});
      const Vector y = yr + vec({delta[0] * u(rng), delta[1] * u(rng)});
      ++total;
      // y_r in the transformed safe set  =>  y in the original safe set.
      if (t.safe_region && spec_satisfied(*t.safe_region, yr) && !spec_satisfied(s, y))
        ++violations;
      // y_r in the transformed unsafe set  =>  y violates the original.
      if (t.witness_region && !spec_satisfied(*t.witness_region, yr) && spec_satisfied(s, y))
        ++violations;
    }
  }
  return {violations == 0, std::to_string(total) + " pairs over 4 specs, " +
                               std::to_string(violations) + " violations"};
}

// ------------------------------------------------------------------ 8

Outcome_ motor_case_study() {
  const auto p = parse_problem(std::string(BTV_DATA_DIR) + "/motor/manifest.json");
  VerifyOptions o;
  o.k0 = 5;
  o.k_max = 5;
  const auto v = verify_pss(p, o);
  const std::array<Vector, 2> published{vec({0.0234, 0.0189}), vec({0.0228, 0.0177})};
  bool within = v.delta.size() == 2;
  std::ostringstream d;
  d << "outcome " << outcome_name(v.outcome);
  for (std::size_t m = 0; m < v.delta.size() && m < 2; ++m) {
    d << ", delta" << m + 1 << " = [" << num(v.delta[m].delta[0]) << ", "
      << num(v.delta[m].delta[1]) << "]";
    for (Index i = 0; i < 2; ++i) {
      const double ratio = v.delta[m].delta[i] / published[m][i];
      within = within && ratio <= 2.0 && ratio >= 0.5;
    }
  }
  return {v.outcome == Outcome::kSafe && within, d.str()};
}

// ------------------------------------------------------------------ 9

Outcome_ verifier_vs_oracle() {
  std::mt19937_64 rng(9009);
  std::uniform_int_distribution<Index> dim(2, 6), io(1, 2);
  const double factors[] = {0.5, 0.8, 0.95, 1.05, 1.3, 2.0, 5.0};
  int contradictions = 0, safe = 0, unsafe = 0, indet = 0;
  long samples_min = -1;
  for (int inst = 0; inst < 30; ++inst) {
    const Index n = dim(rng), m = io(rng), p = std::min<Index>(io(rng), n - 1);
    const auto sys = fixture::minimal_system(rng, n, m, p);
    const HyperBox x0 = fixture::random_box(rng, n, 0.05, 0.4);
    const HyperBox u = fixture::random_box(rng, m, 0.05, 0.4);
    const double t_f = 2.0;
    const double h = std::min(0.005, default_sim_step(sys.A(), t_f));

    std::vector<Vector> ys;
    const long runs = std::max<long>(64, 100000 / static_cast<long>(t_f / h) + 1);
    for (long r = 0; r < runs; ++r) {
      const auto sig = fixture::random_signal(rng, u, t_f, 1 + r % 6, true);
      const auto tr = simulate(sys, fixture::random_vertex(rng, x0), sig, t_f, h);
      ys.insert(ys.end(), tr.y.begin(), tr.y.end());
    }
    if (samples_min < 0 || static_cast<long>(ys.size()) < samples_min) samples_min = ys.size();
    Vector peak = Vector::Zero(p);
    for (const auto& y : ys) peak = peak.cwiseMax(y.cwiseAbs());

    Spec spec = output_box(-factors[inst % 7] * peak, factors[inst % 7] * peak,
                           Polarity::kSafeRegion);
    if (inst % 3 == 2) {
      // Unsafe ball around a point near the edge of the sampled outputs.
      const Vector c = ys[std::uniform_int_distribution<std::size_t>(0, ys.size() - 1)(rng)] * 1.1;
      spec = EllipsoidSpec(Matrix::Identity(p, p), c, 0.05 * (peak.norm() + 1e-9) * factors[inst % 7],
                           Polarity::kUnsafeRegion);
    }
    bool oracle_violation = false;
    for (const auto& y : ys)
      if (!spec_satisfied(spec, y)) {
        oracle_violation = true;
        break;
      }
    VerifyOptions o;
    o.seed = inst;
    const auto v = verify(VerificationProblem("oracle", sys, x0, u, {spec}, t_f), o);
    if (v.outcome == Outcome::kSafe) {
      ++safe;
      if (oracle_violation) ++contradictions;
    } else if (v.outcome == Outcome::kUnsafe) {
      ++unsafe;
      // The witness is a concrete full-order run; re-check it independently.
      const auto& w = *v.witness;
      const auto tr = simulate(sys, w.x0, w.input, w.time, h / 10);
      if (spec_satisfied(spec, tr.y.back())) ++contradictions;
    } else {
      ++indet;
    }
  }
  return {contradictions == 0,
          std::to_string(safe) + " safe, " + std::to_string(unsafe) + " unsafe, " +
              std::to_string(indet) + " indeterminate, " + std::to_string(contradictions) +
              " contradictions; >= " + std::to_string(samples_min) + " oracle samples each"};
}

// ------------------------------------------------------------------ 10

Outcome_ scale_smoke() {
  std::mt19937_64 rng(10010);
  const auto sys = random_stable_system(500, 10, 2, rng, 50.0);
  const HyperBox x0 = fixture::random_box(rng, 500, 0.01, 0.1);
  const HyperBox u = fixture::random_box(rng, 10, 0.1, 0.5);
  const auto bal = balance(sys);
  const auto abs = truncate(bal, 20, x0);
  BoundOptions opts;
  opts.e1_methods = {E1Method::kTheorem1};
  opts.e2_methods = {E2Method::kTheorem3};
  const auto eb = compute_error_bound(bal, abs, x0, u, 5.0, opts);
  const bool finite = eb.delta.allFinite();
  return {finite, "n=500 k=20 delta=[" + num(eb.delta[0]) + ", " + num(eb.delta[1]) +
                      "], cond(H)=" + num(bal.condition)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome_()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "closed-form scalar gramians and HSV", 1.0, closed_form},
      {2, "Lyapunov residuals on 100 random systems", 30.0, lyapunov_residuals},
      {3, "HSV invariance under similarity", 30.0, hsv_invariance},
      {4, "bound soundness, 1000 trials per method", 300.0, bound_soundness},
      {5, "bound ordering", 300.0, bound_ordering},
      {6, "spec transform reproduction", 1.0, transform_reproduction},
      {7, "safety-relation sampling", 10.0, safety_relation_sampling},
      {8, "motor case study at k=5", 120.0, motor_case_study},
      {9, "verifier vs dense-simulation oracle", 600.0, verifier_vs_oracle},
      {10, "n=500 reduce + theoretical bounds", 60.0, scale_smoke},
  };
  int failures = 0;
  double shared = 0.0;  // criterion 5 reuses the instances built by criterion 4
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome_ r{false, ""};
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.id == 4) shared = secs;
    const bool in_time = secs <= c.limit_s + (c.id == 5 ? shared : 0.0);
    const bool pass = r.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, r.detail.c_str(), secs, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures ? 1 : 0;
}
