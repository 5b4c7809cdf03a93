#include "btv/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace btv::report {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string fmt_vector(const Vector& v, int digits) {
  std::string s = "[";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i], digits);
  }
  return s + "]";
}

std::string table(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c)
      width[c] = std::max(width[c], r[c].size());
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      out << (c ? "  " : "") << cell << std::string(width[c] - cell.size(), ' ');
    }
    out << '\n';
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& r : rows) line(r);
  return out.str();
}

Json error_bound(const ErrorBound& eb) {
  Json m1 = Json::array(), m2 = Json::array();
  for (auto m : eb.e1_method) m1.push_back(method_name(m));
  for (auto m : eb.e2_method) m2.push_back(method_name(m));
  return Json{{"e1", vector_to_json(eb.e1)},
              {"e2", vector_to_json(eb.e2)},
              {"delta", vector_to_json(eb.delta)},
              {"rho", eb.rho},
              {"e1_method", m1},
              {"e2_method", m2},
              {"gamma", eb.gamma},
              {"gamma_applied", vector_to_json(eb.gamma_applied)},
              {"warnings", eb.warnings}};
}

Json transformed_spec(const TransformedSpec& ts) {
  Json j{{"original", spec_to_json(ts.original)},
         {"safe_region", ts.safe_region ? spec_to_json(*ts.safe_region) : Json()},
         {"unsafe_region", spec_to_json(ts.unsafe_region)},
         {"witness_region",
          ts.witness_region ? spec_to_json(*ts.witness_region) : Json()},
         {"safe_region_empty", ts.safe_region_empty()},
         {"delta", vector_to_json(ts.delta_used)},
         {"margins", vector_to_json(ts.margins)}};
  if (ts.basis.size() > 0) {
    j["eigenbasis"] = matrix_to_json(ts.basis);
    j["eigenvalues"] = vector_to_json(ts.eigenvalues);
  }
  return j;
}

Json zonotope(const Zonotope& z) {
  Json gens = Json::array();
  for (Index j = 0; j < z.num_generators(); ++j)
    gens.push_back(vector_to_json(z.generators().col(j)));
  return Json{{"center", vector_to_json(z.center())}, {"generators", gens}};
}

Json reach(const ReachResult& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps)
    steps.push_back(Json{{"t0", s.t0}, {"t1", s.t1}, {"set", zonotope(s.y)}});
  return Json{{"h", r.h}, {"t_f", r.t_f}, {"steps", steps}};
}

Json witness(const Witness& w) {
  Json input = Json::array();
  for (std::size_t i = 0; i < w.input.times().size(); ++i)
    input.push_back(Json{{"t", w.input.times()[i]},
                         {"u", vector_to_json(w.input.values()[i])}});
  Json j{{"x0", vector_to_json(w.x0)},
         {"x0_reduced", vector_to_json(w.x0_reduced)},
         {"input", input},
         {"time", w.time},
         {"y_reduced", vector_to_json(w.y_reduced)},
         {"spec_index", w.spec_index},
         {"margin", w.margin},
         {"candidate", w.candidate}};
  j["y_full"] = w.y_full ? vector_to_json(*w.y_full) : Json();
  return j;
}

Json check(const CheckResult& c) {
  Json j{{"outcome", outcome_name(c.outcome)}};
  if (c.step) j["step"] = *c.step;
  if (c.spec_index) j["spec_index"] = *c.spec_index;
  if (c.point) j["point"] = vector_to_json(*c.point);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json verdict(const Verdict& v, bool timing) {
  Json log = Json::array();
  for (const auto& e : v.per_k_log) {
    Json modes = Json::array();
    for (const auto& m : e.modes) {
      Json specs = Json::array();
      for (const auto& s : m.specs) specs.push_back(transformed_spec(s));
      Json mj{{"mode", m.mode + 1},
              {"horizon", m.horizon},
              {"bound", error_bound(m.delta)},
              {"check", outcome_name(m.check)},
              {"reach_steps", m.reach_steps},
              {"transformed_specs", specs}};
      if (!m.note.empty()) mj["note"] = m.note;
      modes.push_back(mj);
    }
    Json ej{{"k", e.k}, {"outcome", outcome_name(e.outcome)}, {"modes", modes}};
    if (e.skipped) ej["skipped"] = true;
    if (!e.note.empty()) ej["note"] = e.note;
    if (timing) ej["seconds"] = e.seconds;
    log.push_back(ej);
  }
  Json deltas = Json::array();
  for (const auto& d : v.delta) deltas.push_back(error_bound(d));
  Json j{{"format_version", kFormatVersion},
         {"outcome", outcome_name(v.outcome)},
         {"k_used", v.k_used ? Json(*v.k_used) : Json()},
         {"delta", deltas},
         {"witness", v.witness ? witness(*v.witness) : Json()},
         {"per_k_log", log},
         {"warnings", v.warnings}};
  if (v.witness_mode) j["witness_mode"] = *v.witness_mode + 1;
  return j;
}

std::string verdict_text(const Verdict& v, bool timing) {
  std::ostringstream out;
  out << "outcome: " << outcome_name(v.outcome);
  if (v.k_used) out << " (k = " << *v.k_used << ")";
  out << '\n';
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : v.per_k_log) {
    for (const auto& m : e.modes) {
      std::vector<std::string> r{std::to_string(e.k), std::to_string(m.mode + 1),
                                 fmt_vector(m.delta.e1, 4), fmt_vector(m.delta.e2, 4),
                                 fmt_vector(m.delta.delta, 4), outcome_name(m.check)};
      if (timing) r.push_back(fmt(e.seconds, 3));
      rows.push_back(r);
    }
  }
  std::vector<std::string> header{"k", "mode", "e1", "e2", "delta", "check"};
  if (timing) header.push_back("time[s]");
  out << table(header, rows);
  if (v.witness) {
    out << "witness: t = " << fmt(v.witness->time) << ", y_r = "
        << fmt_vector(v.witness->y_reduced);
    if (v.witness->y_full) out << ", y = " << fmt_vector(*v.witness->y_full);
    out << '\n';
  }
  for (const auto& w : v.warnings) out << "warning: " << w << '\n';
  return out.str();
}

}  // namespace btv::report
