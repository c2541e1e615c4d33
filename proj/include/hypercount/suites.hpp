#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypercount/report.hpp"

namespace hypercount {

const std::vector<std::string>& suite_names();

// identities | decomposition | samplers | asymptotics. Unknown names throw DomainError.
SuiteReport run_suite(const std::string& name, std::uint64_t seed = 1, int jobs = 1);

SuiteReport suite_identities();
SuiteReport suite_decomposition(int jobs = 1);
SuiteReport suite_samplers(std::uint64_t seed, int jobs = 1);
SuiteReport suite_asymptotics(std::uint64_t seed);

}  // namespace hypercount
