// A parsed transformation system: metamodels, rules, and units.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "hengine/metamodel.hpp"
#include "hengine/rule.hpp"
#include "hengine/unit.hpp"

namespace hengine {

struct TransformationSystem {
  std::shared_ptr<const TypeRegistry> types;
  std::map<std::string, Rule> rules;
  std::map<std::string, Unit> units;

  const Rule* find_rule(std::string_view name) const;
  const Unit* find_unit(std::string_view name) const;
};

}  // namespace hengine
