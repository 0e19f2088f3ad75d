#pragma once

#include <ostream>

#include "config.hpp"
#include "csv.hpp"

namespace ghzclock::cli {

// Campaign seed for the i-th tau point; shared by all protocols so comparisons are paired.
std::uint64_t point_seed(std::uint64_t seed, std::size_t i);

CsvTable simulate_table(const ScenarioConfig& cfg, std::ostream& log);
CsvTable predict_table(const ScenarioConfig& cfg, std::ostream& log);
CsvTable fig1_table(const ScenarioConfig& cfg, std::ostream& log);
CsvTable sweep_table(const ScenarioConfig& cfg, std::ostream& log);

// Quick oracle checks; prints one PASS/FAIL line per check and returns the failure count.
int selftest(std::uint64_t seed, std::ostream& out);

}  // namespace ghzclock::cli
