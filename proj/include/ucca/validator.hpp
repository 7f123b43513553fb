#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucca/passage.hpp"

namespace ucca {

enum class Severity { Error, Warning };

std::string_view to_string(Severity severity);

struct RuleInfo {
  std::string id;
  Severity severity;
  std::string description;
  std::string guideline_anchor;
};

// R1..R13, W1, W2 in registry order.
const std::vector<RuleInfo>& list_rules();
const RuleInfo* find_rule(std::string_view id);

struct Diagnostic {
  std::string rule;
  Severity severity = Severity::Error;
  UnitId unit = 0;
  std::string message;
  std::string yield;  // first 40 characters of the unit's text

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Per-rule severity overrides; std::nullopt switches the rule off.
struct ValidatorConfig {
  std::map<std::string, std::optional<Severity>, std::less<>> overrides;
};

// Reads "RULE = error|warning|off" lines; '#' starts a comment. Throws
// std::invalid_argument naming the offending line.
ValidatorConfig parse_validator_config(std::string_view text);

// All registry violations, sorted by (unit, registry order). Empty iff the
// passage conforms.
std::vector<Diagnostic> validate(const Passage& passage, const ValidatorConfig& config = {});

}  // namespace ucca
