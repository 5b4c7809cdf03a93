#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "btv/model.hpp"

namespace btv {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Loads a JSON manifest and the MatrixMarket files it references (paths are
/// relative to the manifest's directory). The result is fully validated.
VerificationProblem parse_problem(const std::filesystem::path& manifest_path);
VerificationProblem parse_problem_json(const Json& doc,
                                       const std::filesystem::path& base_dir);

/// Writes `dir/manifest_name` plus one .mtx file per matrix. Returns the
/// manifest path. parse_problem(write_problem(P, d)) == P bit for bit.
std::filesystem::path write_problem(const VerificationProblem& problem,
                                    const std::filesystem::path& dir,
                                    const std::string& manifest_name =
                                        "manifest.json");

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& name);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& name);
Json box_to_json(const HyperBox& box);
HyperBox box_from_json(const Json& j, const std::string& name);
Json spec_to_json(const Spec& spec);
Spec spec_from_json(const Json& j);
/// Accepts a single spec object or an array of them.
std::vector<Spec> specs_from_json(const Json& j);
Json specs_to_json(const std::vector<Spec>& specs);

std::string polarity_name(Polarity p);
Polarity polarity_from_string(const std::string& s);

}  // namespace btv
