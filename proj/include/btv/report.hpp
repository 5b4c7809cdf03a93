#pragma once

#include <string>
#include <vector>

#include "btv/manifest.hpp"
#include "btv/verifier.hpp"

namespace btv::report {

Json error_bound(const ErrorBound& eb);
Json transformed_spec(const TransformedSpec& ts);
Json zonotope(const Zonotope& z);
Json reach(const ReachResult& r);
Json witness(const Witness& w);
Json check(const CheckResult& c);
/// Wall times are included only when `timing` is set, so reports stay
/// byte-identical across runs by default.
Json verdict(const Verdict& v, bool timing);

std::string verdict_text(const Verdict& v, bool timing);

/// Fixed-width text table. Numbers use %.6g unless already formatted.
std::string table(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows);
std::string fmt(double v, int digits = 6);
std::string fmt_vector(const Vector& v, int digits = 6);

}  // namespace btv::report
