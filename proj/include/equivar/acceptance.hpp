// The acceptance suite: one record per criterion with its measured values,
// tolerances and verdict.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "equivar/asymptotics.hpp"

namespace equivar {

enum class Budget { kQuick, kFull };

struct Metric {
  std::string name;
  double value = 0.0;
  std::string bound;  // e.g. "<= 0.03", "in [1.8, 2.2]"
  bool pass = true;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::vector<Metric> metrics;
  std::string note;
};

struct AcceptanceOptions {
  Budget budget = Budget::kFull;
  std::uint64_t seed = 1;
  SignatureConvention convention = SignatureConvention::kQuarter;
  std::vector<int> only;  // empty: all criteria
};

int acceptance_criterion_count();
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
// Runs the selected criteria in order; on_result sees each record as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = nullptr);

// "PASS [3] so3_on_sphere power law: kappa_hat=1.9695 ..." style line.
std::string format_criterion(const CriterionResult& r);

}  // namespace equivar
