// btv: balanced-truncation verification toolkit, command-line frontend.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "btv/generator.hpp"
#include "btv/kernels.hpp"
#include "btv/manifest.hpp"
#include "btv/parallel.hpp"
#include "btv/report.hpp"

namespace fs = std::filesystem;
using namespace btv;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string output;
  std::string format = "json";
  bool timing = false;
};

struct TableOut {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        const bool quote = cells[i].find_first_of(",\"") != std::string::npos;
        if (quote) {
          out << '"';
          for (char c : cells[i]) out << (c == '"' ? "\"\"" : std::string(1, c));
          out << '"';
        } else {
          out << cells[i];
        }
      }
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
  }
};

void emit(const Globals& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.output);
  if (!f) throw Error("cannot write " + g.output);
  f << text;
}

void emit(const Globals& g, const Json& j, const TableOut* table,
          const std::string& text = {}) {
  if (g.format == "json") {
    emit(g, j.dump(2) + "\n");
  } else if (g.format == "csv") {
    if (!table) throw Error("csv output is not available for this command");
    emit(g, table->csv());
  } else {
    if (!text.empty()) {
      emit(g, text);
    } else if (table) {
      emit(g, report::table(table->header, table->rows));
    } else {
      emit(g, j.dump(2) + "\n");
    }
  }
}

E1Method parse_e1(const std::string& s) {
  if (s == "theorem1") return E1Method::kTheorem1;
  if (s == "theorem2") return E1Method::kTheorem2;
  if (s == "simulation") return E1Method::kSimulation;
  throw Error("unknown e1 method " + s);
}

E2Method parse_e2(const std::string& s) {
  if (s == "theorem3") return E2Method::kTheorem3;
  if (s == "simulation") return E2Method::kSimulation;
  throw Error("unknown e2 method " + s);
}

struct BoundFlags {
  std::vector<std::string> e1 = {"theorem1", "theorem2", "simulation"};
  std::vector<std::string> e2 = {"theorem3", "simulation"};
  double gamma = kDefaultGamma;
  std::size_t vertex_cap = kDefaultVertexCap;

  void add(CLI::App* app) {
    app->add_option("--e1", e1, "Zero-input bound methods (theorem1, theorem2, simulation)")
        ->delimiter(',')
        ->check(CLI::IsMember({"theorem1", "theorem2", "simulation"}))
        ->capture_default_str();
    app->add_option("--e2", e2, "Zero-state bound methods (theorem3, simulation)")
        ->delimiter(',')
        ->check(CLI::IsMember({"theorem3", "simulation"}))
        ->capture_default_str();
    app->add_option("--gamma", gamma, "Bloat factor for simulation-derived bounds")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--vertex-cap", vertex_cap,
                    "Largest vertex count for simulation e1")
        ->capture_default_str();
  }

  BoundOptions options() const {
    BoundOptions b;
    b.e1_methods.clear();
    b.e2_methods.clear();
    for (const auto& s : e1) b.e1_methods.push_back(parse_e1(s));
    for (const auto& s : e2) b.e2_methods.push_back(parse_e2(s));
    b.gamma = gamma;
    b.vertex_cap = vertex_cap;
    return b;
  }
};

struct ModeView {
  const LtiSystem* sys;
  HyperBox x0;
  double horizon;
};

std::vector<ModeView> modes_of(const VerificationProblem& p) {
  std::vector<ModeView> out;
  if (!p.is_pss()) {
    out.push_back({&p.lti(), p.x0, p.t_f});
    return out;
  }
  double start = 0.0;
  const auto& pss = p.pss();
  for (std::size_t i = 0; i < pss.size(); ++i) {
    const double h = std::max(0.0, std::min(pss.durations()[i], p.t_f - start));
    out.push_back({&pss.modes()[i], pss.mode_initial_sets()[i], h});
    start += pss.durations()[i];
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- reduce

int cmd_reduce(const Globals& g, const std::string& input, std::optional<Index> k_opt) {
  const VerificationProblem problem = parse_problem(input);
  const auto modes = modes_of(problem);
  const Index n = problem.n(), p = problem.p();
  const Index k = k_opt.value_or(std::min(p + 1, n));
  Json out{{"format_version", kFormatVersion}, {"name", problem.name}, {"k", k}};
  Json mode_json = Json::array();
  std::vector<LtiSystem> reduced;
  std::vector<HyperBox> boxes;
  std::vector<std::string> warnings;
  if (k <= p) warnings.push_back("k <= p: the result is not an output abstraction");
  TableOut table{{"mode", "i", "sigma"}, {}};
  for (std::size_t i = 0; i < modes.size(); ++i) {
    auto bal = std::make_shared<const BalancedRealization>(balance(*modes[i].sys));
    const Abstraction abs = truncate(bal, k, modes[i].x0, {false});
    for (const auto& w : bal->warnings) warnings.push_back(w);
    mode_json.push_back(Json{{"mode", i + 1},
                             {"sigma", vector_to_json(bal->sigma)},
                             {"condition", bal->condition},
                             {"balance_error", bal->balance_error},
                             {"x0_reduced", box_to_json(abs.x0_reduced)}});
    for (Index j = 0; j < bal->sigma.size(); ++j)
      table.rows.push_back({std::to_string(i + 1), std::to_string(j + 1),
                            report::fmt(bal->sigma[j], 10)});
    reduced.push_back(abs.reduced);
    boxes.push_back(abs.x0_reduced);
  }
  out["modes"] = mode_json;
  out["warnings"] = warnings;
  if (!g.output.empty()) {
    const fs::path dir = g.output;
    std::string name = problem.name + "-k" + std::to_string(k);
    fs::path manifest;
    if (problem.is_pss()) {
      PssSystem pss(reduced, problem.pss().durations(), boxes);
      manifest = write_problem(VerificationProblem(name, std::move(pss), boxes.front(),
                                                   problem.inputs, problem.specs,
                                                   problem.t_f),
                               dir);
    } else {
      manifest = write_problem(VerificationProblem(name, reduced.front(), boxes.front(),
                                                   problem.inputs, problem.specs,
                                                   problem.t_f),
                               dir);
    }
    Json sigma = Json::array();
    for (const auto& m : mode_json) sigma.push_back(m["sigma"]);
    std::ofstream(dir / "sigma.json")
        << Json{{"format_version", kFormatVersion},
                {"sigma", modes.size() == 1 ? sigma[0] : sigma}}
                   .dump(2)
        << '\n';
    out["manifest"] = manifest.string();
    Globals to_stdout = g;
    to_stdout.output.clear();
    emit(to_stdout, out, &table);
    return 0;
  }
  emit(g, out, &table);
  return 0;
}

// ---------------------------------------------------------------- bounds

int cmd_bounds(const Globals& g, const std::string& input, std::vector<Index> ks,
               const BoundFlags& flags) {
  const VerificationProblem problem = parse_problem(input);
  const auto modes = modes_of(problem);
  const Index n = problem.n(), p = problem.p();
  if (ks.empty()) ks.push_back(p + 1);
  const BoundOptions opts = flags.options();
  Json rows = Json::array();
  TableOut table{{"mode", "k", "e1", "e2", "delta", "e1_method", "e2_method"}, {}};
  if (g.timing) table.header.push_back("time[s]");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    auto bal = std::make_shared<const BalancedRealization>(balance(*modes[i].sys));
    for (Index k : ks) {
      if (k <= p || k > n) throw std::invalid_argument("k must satisfy p < k <= n");
      const auto t0 = std::chrono::steady_clock::now();
      const Abstraction abs = truncate(bal, k, modes[i].x0);
      MethodBounds raw;
      const ErrorBound eb = compute_error_bound(*bal, abs, modes[i].x0, problem.inputs,
                                                modes[i].horizon, opts, &raw);
      const double secs = seconds_since(t0);
      Json methods = Json::object();
      for (const auto& [m, v] : raw.e1) methods[std::string("e1_") + method_name(m)] = vector_to_json(v);
      for (const auto& [m, v] : raw.e2) methods[std::string("e2_") + method_name(m)] = vector_to_json(v);
      Json row{{"mode", i + 1}, {"k", k}, {"bound", report::error_bound(eb)},
               {"methods", methods}};
      if (g.timing) row["seconds"] = secs;
      rows.push_back(row);
      std::string m1, m2;
      for (std::size_t o = 0; o < eb.e1_method.size(); ++o) {
        m1 += (o ? "/" : "") + std::string(method_name(eb.e1_method[o]));
        m2 += (o ? "/" : "") + std::string(method_name(eb.e2_method[o]));
      }
      std::vector<std::string> r{std::to_string(i + 1), std::to_string(k),
                                 report::fmt_vector(eb.e1, 4), report::fmt_vector(eb.e2, 4),
                                 report::fmt_vector(eb.delta, 4), m1, m2};
      if (g.timing) r.push_back(report::fmt(secs, 3));
      table.rows.push_back(r);
    }
  }
  emit(g, Json{{"format_version", kFormatVersion}, {"name", problem.name}, {"rows", rows}},
       &table);
  return 0;
}

// ---------------------------------------------------------------- transform-spec

int cmd_transform(const Globals& g, const std::string& input, const std::string& delta_str) {
  std::ifstream f(input);
  if (!f) throw ParseError("cannot open " + input);
  Json doc = Json::parse(f);
  const std::vector<Spec> specs = specs_from_json(doc.contains("spec") ? doc["spec"] : doc);
  Json delta_json = delta_str.empty() ? doc.at("delta") : Json::parse(delta_str);
  std::vector<Vector> deltas;
  if (delta_json.is_array() && !delta_json.empty() && delta_json[0].is_array()) {
    for (const auto& d : delta_json) deltas.push_back(vector_from_json(d, "delta"));
  } else {
    deltas.push_back(vector_from_json(delta_json, "delta"));
  }
  const auto per_mode = transform_pss(specs, deltas);
  Json modes = Json::array();
  TableOut table{{"mode", "spec", "margins", "safe_region_empty"}, {}};
  for (std::size_t m = 0; m < per_mode.size(); ++m) {
    Json list = Json::array();
    for (std::size_t s = 0; s < per_mode[m].size(); ++s) {
      list.push_back(report::transformed_spec(per_mode[m][s]));
      table.rows.push_back({std::to_string(m + 1), std::to_string(s + 1),
                            report::fmt_vector(per_mode[m][s].margins, 8),
                            per_mode[m][s].safe_region_empty() ? "yes" : "no"});
    }
    modes.push_back(list);
  }
  Json out{{"format_version", kFormatVersion}};
  out["transformed"] = per_mode.size() == 1 ? modes[0] : modes;
  emit(g, out, &table);
  return 0;
}

// ---------------------------------------------------------------- reach

int cmd_reach(const Globals& g, const std::string& input, std::optional<Index> k_opt,
              std::optional<double> step_h, const std::string& csv_path, bool full,
              const BoundFlags& flags) {
  const VerificationProblem problem = parse_problem(input);
  const auto modes = modes_of(problem);
  const Index p = problem.p(), n = problem.n();
  const Index k = k_opt.value_or(std::min(p + 1, n));
  ReachOptions ro;
  ro.step_h = step_h;
  Json modes_json = Json::array();
  TableOut table{{"mode", "t0", "t1"}, {}};
  for (Index i = 0; i < p; ++i) {
    table.header.push_back("y" + std::to_string(i + 1) + "_lo");
    table.header.push_back("y" + std::to_string(i + 1) + "_hi");
  }
  for (std::size_t i = 0; i < modes.size(); ++i) {
    Json mj{{"mode", i + 1}};
    ReachResult reach;
    std::vector<TransformedSpec> specs;
    if (full) {
      reach = reach_lti(*modes[i].sys, modes[i].x0, problem.inputs, modes[i].horizon, ro);
      specs = transform_all(problem.specs, Vector::Zero(p));
      mj["order"] = n;
    } else {
      if (k <= p || k > n) throw std::invalid_argument("k must satisfy p < k <= n");
      auto bal = std::make_shared<const BalancedRealization>(balance(*modes[i].sys));
      const Abstraction abs = truncate(bal, k, modes[i].x0);
      const ErrorBound eb = compute_error_bound(*bal, abs, modes[i].x0, problem.inputs,
                                                modes[i].horizon, flags.options());
      specs = transform_all(problem.specs, eb.delta);
      reach = reach_lti(abs.reduced, Zonotope::from_box(modes[i].x0).linear_map(abs.initial_map),
                        problem.inputs, modes[i].horizon, ro);
      mj["order"] = k;
      mj["bound"] = report::error_bound(eb);
    }
    Json tj = Json::array();
    for (const auto& s : specs) tj.push_back(report::transformed_spec(s));
    mj["transformed_specs"] = tj;
    mj["check"] = report::check(check_specs(reach, specs));
    mj["reach"] = report::reach(reach);
    modes_json.push_back(mj);
    for (const auto& s : reach.steps) {
      const HyperBox hull = s.y.interval_hull();
      std::vector<std::string> r{std::to_string(i + 1), report::fmt(s.t0, 10),
                                 report::fmt(s.t1, 10)};
      for (Index j = 0; j < p; ++j) {
        r.push_back(report::fmt(hull.lb()[j], 10));
        r.push_back(report::fmt(hull.ub()[j], 10));
      }
      table.rows.push_back(r);
    }
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw Error("cannot write " + csv_path);
    f << table.csv();
  }
  emit(g, Json{{"format_version", kFormatVersion}, {"name", problem.name},
               {"modes", modes_json}},
       &table);
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyFlags {
  std::optional<Index> k0, k_max;
  std::optional<double> step_h;
  std::size_t budget = 256;
  bool no_confirm = false;
  bool geometric = false;
  double time_budget = 0.0;

  void add(CLI::App* app) {
    app->add_option("--k0", k0, "First abstraction order (default p + 1)");
    app->add_option("--k-max", k_max, "Last abstraction order (default n)");
    app->add_option("--step-h", step_h, "Reach step (default min(t_f/200, 0.1/||A||))")
        ->check(CLI::PositiveNumber);
    app->add_option("--witness-budget", budget, "Trajectories tried per witness search")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_flag("--no-confirm", no_confirm,
                  "Do not re-simulate the full-order model for witnesses");
    app->add_flag("--geometric", geometric, "Double k each iteration instead of k + 1");
    app->add_option("--time-budget", time_budget,
                    "Wall-clock budget in seconds; overrun yields indeterminate")
        ->check(CLI::NonNegativeNumber);
  }
};

int cmd_verify(const Globals& g, const std::string& input, const VerifyFlags& vf,
               const BoundFlags& bf, bool pss) {
  const VerificationProblem problem = parse_problem(input);
  if (pss && !problem.is_pss()) throw Error("verify-pss needs a manifest of type pss");
  if (!pss && problem.is_pss()) throw Error("verify needs an LTI manifest; use verify-pss");
  VerifyOptions o;
  o.k0 = vf.k0;
  o.k_max = vf.k_max;
  o.bounds = bf.options();
  o.reach.step_h = vf.step_h;
  o.witness_budget = vf.budget;
  o.seed = g.seed;
  o.confirm_witness = !vf.no_confirm;
  o.geometric_schedule = vf.geometric;
  o.time_budget_s = vf.time_budget;
  const Verdict v = pss ? verify_pss(problem, o) : verify(problem, o);
  TableOut table{{"k", "mode", "e1", "e2", "delta", "check"}, {}};
  for (const auto& e : v.per_k_log)
    for (const auto& m : e.modes)
      table.rows.push_back({std::to_string(e.k), std::to_string(m.mode + 1),
                            report::fmt_vector(m.delta.e1, 6), report::fmt_vector(m.delta.e2, 6),
                            report::fmt_vector(m.delta.delta, 6), outcome_name(m.check)});
  Json j = report::verdict(v, g.timing);
  j["name"] = problem.name;
  emit(g, j, &table, report::verdict_text(v, g.timing));
  return exit_code(v.outcome);
}

// ---------------------------------------------------------------- bench

std::vector<fs::path> find_manifests(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "manifest.json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_bench(const Globals& g, const std::string& data_dir,
              const std::vector<std::string>& extra, std::vector<Index> ks,
              const BoundFlags& flags) {
  std::vector<fs::path> manifests;
  std::vector<std::string> notices;
  const fs::path motor = fs::path(data_dir) / "motor" / "manifest.json";
  if (fs::exists(motor)) manifests.push_back(motor);
  else notices.push_back("bundled motor benchmark not found at " + motor.string());
  for (const auto& d : extra) {
    auto found = find_manifests(d);
    if (fs::is_regular_file(d)) found = {fs::path(d)};
    if (found.empty()) notices.push_back("skipped " + d + ": no benchmark manifests found");
    manifests.insert(manifests.end(), found.begin(), found.end());
  }
  const BoundOptions base = flags.options();
  Json rows = Json::array();
  TableOut table{{"benchmark", "mode", "k", "e1_method", "e2_method", "e1", "e2", "delta"}, {}};
  if (g.timing) table.header.push_back("time[s]");
  for (const auto& path : manifests) {
    VerificationProblem problem = [&] {
      return parse_problem(path);
    }();
    const auto modes = modes_of(problem);
    const Index p = problem.p(), n = problem.n();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      auto bal = std::make_shared<const BalancedRealization>(balance(*modes[i].sys));
      for (Index k : ks) {
        if (k <= p || k > n) {
          notices.push_back(problem.name + ": k=" + std::to_string(k) + " outside (p, n]");
          continue;
        }
        const Abstraction abs = truncate(bal, k, modes[i].x0);
        for (E1Method m1 : base.e1_methods) {
          for (E2Method m2 : base.e2_methods) {
            BoundOptions one = base;
            one.e1_methods = {m1};
            one.e2_methods = {m2};
            const auto t0 = std::chrono::steady_clock::now();
            std::optional<ErrorBound> eb;
            std::string failure;
            try {
              eb = compute_error_bound(*bal, abs, modes[i].x0, problem.inputs,
                                       modes[i].horizon, one);
            } catch (const Error& e) {
              failure = e.what();
            }
            const double secs = seconds_since(t0);
            Json row{{"benchmark", problem.name}, {"mode", i + 1}, {"k", k},
                     {"e1_method", method_name(m1)}, {"e2_method", method_name(m2)}};
            std::vector<std::string> r{problem.name, std::to_string(i + 1), std::to_string(k),
                                       method_name(m1), method_name(m2)};
            if (eb) {
              row["e1"] = vector_to_json(eb->e1);
              row["e2"] = vector_to_json(eb->e2);
              row["delta"] = vector_to_json(eb->delta);
              r.push_back(report::fmt_vector(eb->e1, 4));
              r.push_back(report::fmt_vector(eb->e2, 4));
              r.push_back(report::fmt_vector(eb->delta, 4));
            } else {
              row["error"] = failure;
              r.insert(r.end(), {"n/a", "n/a", "n/a"});
            }
            if (g.timing) {
              row["seconds"] = secs;
              r.push_back(report::fmt(secs, 3));
            }
            rows.push_back(row);
            table.rows.push_back(r);
          }
        }
      }
    }
  }
  Json out{{"format_version", kFormatVersion}, {"rows", rows}, {"notices", notices}};
  std::string text = report::table(table.header, table.rows);
  for (const auto& nt : notices) text += "notice: " + nt + "\n";
  emit(g, out, &table, text);
  return 0;
}

// ---------------------------------------------------------------- gen

int cmd_gen(const Globals& g, GeneratorOptions go, double t_f) {
  if (g.output.empty()) throw Error("gen needs --output DIR");
  go.seed = g.seed;
  const VerificationProblem problem = random_problem(go, t_f);
  const fs::path manifest = write_problem(problem, g.output);
  const auto stab = check_stability(problem.lti());
  Json out{{"format_version", kFormatVersion},
           {"manifest", manifest.string()},
           {"n", go.n}, {"m", go.m}, {"p", go.p},
           {"seed", go.seed},
           {"spectral_abscissa", stab.spectral_abscissa},
           {"stable", stab.stable}};
  Globals to_stdout = g;
  to_stdout.output.clear();
  emit(to_stdout, out, nullptr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Balanced-truncation abstraction, error bounds and safety verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every randomized step")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  app.add_option("--output", g.output,
                 "Output file (directory for reduce and gen); stdout when omitted");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "text", "csv"}))
      ->capture_default_str();
  app.add_flag("--timing", g.timing, "Include wall-clock times in reports");
  app.add_flag_callback("--force-scalar",
                        [] { kernels::set_active_isa(kernels::Isa::kScalar); },
                        "Use the scalar reference kernels");

  std::string input;
  std::optional<Index> k;
  std::vector<Index> ks;
  BoundFlags bound_flags;
  VerifyFlags verify_flags;

  auto* reduce = app.add_subcommand("reduce", "Balance and truncate a model; write the reduced manifest");
  reduce->add_option("input", input, "Manifest path")->required()->check(CLI::ExistingFile);
  reduce->add_option("-k,--order", k, "Reduced order (default p + 1)");

  auto* bounds = app.add_subcommand("bounds", "Error bounds e1, e2 and delta per order");
  bounds->add_option("input", input, "Manifest path")->required()->check(CLI::ExistingFile);
  bounds->add_option("-k,--order", ks, "Orders to evaluate (repeatable, default p + 1)");
  bound_flags.add(bounds);

  std::string delta_str;
  auto* tspec = app.add_subcommand("transform-spec", "Transform specs by a delta vector");
  tspec->add_option("input", input, "JSON with 'spec' and optionally 'delta'")
      ->required()
      ->check(CLI::ExistingFile);
  tspec->add_option("--delta", delta_str,
                    "Delta as a JSON array, or an array of arrays (one per mode)");

  std::optional<double> step_h;
  std::string csv_path;
  bool full = false;
  auto* reach = app.add_subcommand("reach", "Reach sets of the abstraction and a spec check");
  reach->add_option("input", input, "Manifest path")->required()->check(CLI::ExistingFile);
  reach->add_option("-k,--order", k, "Abstraction order (default p + 1)");
  reach->add_option("--step-h", step_h, "Reach step")->check(CLI::PositiveNumber);
  reach->add_option("--csv", csv_path, "Also write per-step output boxes as CSV");
  reach->add_flag("--full", full, "Reach the full-order model instead (small n only)");
  bound_flags.add(reach);

  auto* verify_cmd = app.add_subcommand("verify", "Verify an LTI problem");
  verify_cmd->add_option("input", input, "Manifest path")->required()->check(CLI::ExistingFile);
  verify_flags.add(verify_cmd);
  bound_flags.add(verify_cmd);

  auto* verify_pss_cmd = app.add_subcommand("verify-pss", "Verify a periodically switched problem");
  verify_pss_cmd->add_option("input", input, "Manifest path")->required()->check(CLI::ExistingFile);
  verify_flags.add(verify_pss_cmd);
  bound_flags.add(verify_pss_cmd);

  std::string data_dir = BTV_DATA_DIR;
  std::vector<std::string> extra;
  std::vector<Index> bench_ks = {4, 5};
  auto* bench = app.add_subcommand("bench", "Error-bound table over bundled and user benchmarks");
  bench->add_option("--data-dir", data_dir, "Bundled data directory")->capture_default_str();
  bench->add_option("--extra", extra,
                    "Extra manifest files or directories (e.g. SLICOT conversions)");
  bench->add_option("-k,--order", bench_ks, "Orders to evaluate")->capture_default_str();
  bound_flags.add(bench);

  GeneratorOptions gen_opts;
  double gen_tf = 5.0;
  auto* gen = app.add_subcommand("gen", "Write a random stable problem");
  gen->add_option("--n", gen_opts.n, "State dimension")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--m", gen_opts.m, "Input dimension")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--p", gen_opts.p, "Output dimension")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--skew-scale", gen_opts.skew_scale, "Scale of the skew part of A")
      ->capture_default_str();
  gen->add_option("--t-f", gen_tf, "Time horizon")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (g.threads) set_thread_count(g.threads);
    if (*reduce) return cmd_reduce(g, input, k);
    if (*bounds) return cmd_bounds(g, input, ks, bound_flags);
    if (*tspec) return cmd_transform(g, input, delta_str);
    if (*reach) return cmd_reach(g, input, k, step_h, csv_path, full, bound_flags);
    if (*verify_cmd) return cmd_verify(g, input, verify_flags, bound_flags, false);
    if (*verify_pss_cmd) return cmd_verify(g, input, verify_flags, bound_flags, true);
    if (*bench) return cmd_bench(g, data_dir, extra, bench_ks, bound_flags);
    if (*gen) return cmd_gen(g, gen_opts, gen_tf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 3;
}
