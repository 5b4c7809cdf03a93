#include "btv/manifest.hpp"

#include <fstream>

#include "btv/matrix_market.hpp"

namespace btv {
namespace fs = std::filesystem;

namespace {

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& name) {
  if (!j.is_number()) throw ParseError(name + ": expected a number");
  return j.get<double>();
}

Matrix load_matrix(const Json& matrices, const char* key,
                   const fs::path& base_dir) {
  const Json& ref = field(matrices, key, "matrices");
  if (ref.is_array()) return matrix_from_json(ref, key);
  if (!ref.is_string())
    throw ParseError(std::string("matrices.") + key +
                     ": expected a file path or inline rows");
  const fs::path path = base_dir / ref.get<std::string>();
  if (!fs::exists(path))
    throw ParseError(std::string("matrix ") + key + ": file not found: " +
                     path.string());
  return mm::read_file(path);
}

LtiSystem load_system(const Json& matrices, const fs::path& base_dir,
                      const std::string& ctx) {
  Matrix a = load_matrix(matrices, "A", base_dir);
  Matrix b = load_matrix(matrices, "B", base_dir);
  Matrix c = load_matrix(matrices, "C", base_dir);
  try {
    return LtiSystem(std::move(a), std::move(b), std::move(c));
  } catch (const DimensionError& e) {
    throw DimensionError(e.name(), ctx + ": dimension mismatch in matrix " +
                                       e.name() + " (" + e.what() + ")");
  }
}

}  // namespace

std::string polarity_name(Polarity p) {
  return p == Polarity::kSafeRegion ? "safe-region" : "unsafe-region";
}

Polarity polarity_from_string(const std::string& s) {
  if (s == "safe-region" || s == "safe") return Polarity::kSafeRegion;
  if (s == "unsafe-region" || s == "unsafe") return Polarity::kUnsafeRegion;
  throw ParseError("unknown polarity '" + s + "'");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& name) {
  if (!j.is_array() || j.empty())
    throw ParseError(name + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw ParseError(name + ": rows must be non-empty arrays");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw DimensionError(name, "row " + std::to_string(i) +
                                     " has the wrong length");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Index>(i), static_cast<Index>(k)) =
          number(j[i][k], name);
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const Json& j, const std::string& name) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) throw ParseError(name + ": expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Index>(i)] = number(j[i], name);
  return v;
}

Json box_to_json(const HyperBox& box) {
  return Json{{"lb", vector_to_json(box.lb())}, {"ub", vector_to_json(box.ub())}};
}

HyperBox box_from_json(const Json& j, const std::string& name) {
  return HyperBox(vector_from_json(field(j, "lb", name), name + ".lb"),
                  vector_from_json(field(j, "ub", name), name + ".ub"));
}

Json spec_to_json(const Spec& spec) {
  if (const auto* s = std::get_if<PolytopeSpec>(&spec)) {
    return Json{{"kind", "polytope"},
                {"polarity", polarity_name(s->polarity)},
                {"Gamma", matrix_to_json(s->gamma)},
                {"Psi", vector_to_json(s->psi)}};
  }
  const auto& e = std::get<EllipsoidSpec>(spec);
  return Json{{"kind", "ellipsoid"},
              {"polarity", polarity_name(e.polarity)},
              {"Q", matrix_to_json(e.q)},
              {"a", vector_to_json(e.a)},
              {"R", e.radius}};
}

Spec spec_from_json(const Json& j) {
  const std::string kind = field(j, "kind", "spec").get<std::string>();
  const Polarity pol = j.contains("polarity")
                           ? polarity_from_string(j.at("polarity").get<std::string>())
                           : Polarity::kSafeRegion;
  if (kind == "polytope") {
    return PolytopeSpec(matrix_from_json(field(j, "Gamma", "spec"), "Gamma"),
                        vector_from_json(field(j, "Psi", "spec"), "Psi"), pol);
  }
  if (kind == "ellipsoid") {
    return EllipsoidSpec(matrix_from_json(field(j, "Q", "spec"), "Q"),
                         vector_from_json(field(j, "a", "spec"), "a"),
                         number(field(j, "R", "spec"), "R"), pol);
  }
  throw ParseError("spec: unknown kind '" + kind + "'");
}

std::vector<Spec> specs_from_json(const Json& j) {
  std::vector<Spec> out;
  if (j.is_array()) {
    for (const auto& s : j) out.push_back(spec_from_json(s));
  } else {
    out.push_back(spec_from_json(j));
  }
  return out;
}

Json specs_to_json(const std::vector<Spec>& specs) {
  if (specs.size() == 1) return spec_to_json(specs.front());
  Json a = Json::array();
  for (const auto& s : specs) a.push_back(spec_to_json(s));
  return a;
}

VerificationProblem parse_problem_json(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ParseError("manifest: expected a JSON object");
  if (doc.contains("format_version") &&
      doc.at("format_version").get<int>() > kFormatVersion)
    throw ParseError("manifest: unsupported format_version");
  const std::string name = doc.value("name", std::string("unnamed"));
  const std::string type = doc.value("type", std::string("lti"));
  HyperBox inputs = box_from_json(field(doc, "input", "manifest"), "input");
  std::vector<Spec> specs = specs_from_json(field(doc, "spec", "manifest"));
  const double t_f = number(field(doc, "t_f", "manifest"), "t_f");

  if (type == "lti") {
    LtiSystem sys = load_system(field(doc, "matrices", "manifest"), base_dir,
                                "manifest");
    HyperBox x0 = box_from_json(field(doc, "x0", "manifest"), "x0");
    return VerificationProblem(name, std::move(sys), std::move(x0),
                               std::move(inputs), std::move(specs), t_f);
  }
  if (type == "pss") {
    const Json& modes = field(doc, "modes", "manifest");
    if (!modes.is_array() || modes.empty())
      throw ParseError("manifest: 'modes' must be a non-empty array");
    std::vector<LtiSystem> systems;
    std::vector<double> durations;
    std::vector<HyperBox> boxes;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::string ctx = "mode " + std::to_string(i + 1);
      systems.push_back(
          load_system(field(modes[i], "matrices", ctx), base_dir, ctx));
      durations.push_back(
          number(field(modes[i], "duration", ctx), ctx + ".duration"));
      boxes.push_back(box_from_json(field(modes[i], "x0", ctx), ctx + ".x0"));
    }
    HyperBox first = boxes.front();
    PssSystem pss(std::move(systems), std::move(durations), std::move(boxes));
    return VerificationProblem(name, std::move(pss), std::move(first),
                               std::move(inputs), std::move(specs), t_f);
  }
  throw ParseError("manifest: unknown type '" + type + "'");
}

VerificationProblem parse_problem(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open manifest " + manifest_path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  try {
    return parse_problem_json(doc, manifest_path.parent_path());
  } catch (const Json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
}

fs::path write_problem(const VerificationProblem& problem, const fs::path& dir,
                       const std::string& manifest_name) {
  fs::create_directories(dir);
  Json doc{{"format_version", kFormatVersion}, {"name", problem.name}};
  auto write_sys = [&](const LtiSystem& s, const std::string& suffix) {
    mm::write_file(dir / ("A" + suffix + ".mtx"), s.A());
    mm::write_file(dir / ("B" + suffix + ".mtx"), s.B());
    mm::write_file(dir / ("C" + suffix + ".mtx"), s.C());
    return Json{{"A", "A" + suffix + ".mtx"},
                {"B", "B" + suffix + ".mtx"},
                {"C", "C" + suffix + ".mtx"}};
  };
  if (problem.is_pss()) {
    const auto& pss = problem.pss();
    doc["type"] = "pss";
    Json modes = Json::array();
    for (std::size_t i = 0; i < pss.size(); ++i) {
      modes.push_back(Json{
          {"matrices", write_sys(pss.modes()[i], std::to_string(i + 1))},
          {"duration", pss.durations()[i]},
          {"x0", box_to_json(pss.mode_initial_sets()[i])}});
    }
    doc["modes"] = std::move(modes);
  } else {
    doc["type"] = "lti";
    doc["matrices"] = write_sys(problem.lti(), "");
    doc["x0"] = box_to_json(problem.x0);
  }
  doc["input"] = box_to_json(problem.inputs);
  doc["spec"] = specs_to_json(problem.specs);
  doc["t_f"] = problem.t_f;
  const fs::path out = dir / manifest_name;
  std::ofstream f(out);
  if (!f) throw Error("cannot write manifest " + out.string());
  f << doc.dump(2) << '\n';
  return out;
}

}  // namespace btv
