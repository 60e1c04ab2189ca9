#pragma once

#include <map>
#include <string>

namespace hypowiener {

enum class VerdictKind { RegularLikely, IrregularLikely, Inconclusive };

std::string verdict_name(VerdictKind kind);

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::string evidence;
  std::map<std::string, double> numbers;

  std::string to_json() const;
};

}  // namespace hypowiener
