#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hypercount/exact_enum.hpp"

namespace hypercount {

using Json = nlohmann::ordered_json;

// One check with what it saw and what it was held to. Descriptive rows are
// reported but never fail a suite.
struct CheckReport {
  std::string name;
  Json inputs = Json::object();
  Json observed = Json::object();
  Json bound = Json::object();
  bool pass = false;
  bool descriptive = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckReport> checks;
  bool all_pass() const;
  CheckReport& add(CheckReport c);
};

Json to_json(const CheckReport& c);
Json to_json(const SuiteReport& s);

// BigCounts always travel as decimal strings.
std::string dec(const BigCount& v);

}  // namespace hypercount
