#include "hypowiener/verdict.hpp"

#include "json.hpp"

namespace hypowiener {

std::string verdict_name(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::RegularLikely:
      return "RegularLikely";
    case VerdictKind::IrregularLikely:
      return "IrregularLikely";
    case VerdictKind::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

std::string Verdict::to_json() const {
  nlohmann::json nums = nlohmann::json::object();
  for (const auto& [k, v] : numbers) nums[k] = v;
  return nlohmann::json{{"verdict", verdict_name(kind)}, {"evidence", evidence}, {"numbers", nums}}.dump();
}

}  // namespace hypowiener
