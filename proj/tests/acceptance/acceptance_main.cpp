// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
#include <cstdio>

#include "CLI11.hpp"
#include "equivar/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace equivar;
  CLI::App app{"equivar acceptance suite"};
  std::string budget = "full";
  AcceptanceOptions opt;
  app.add_option("--budget", budget)->check(CLI::IsMember({"quick", "full"}));
  app.add_option("--only", opt.only, "criterion ids to run")->check(CLI::Range(1, acceptance_criterion_count()));
  app.add_option("--seed", opt.seed);
  CLI11_PARSE(app, argc, argv);
  opt.budget = budget == "quick" ? Budget::kQuick : Budget::kFull;

  int failed = 0;
  const auto results = run_acceptance(opt, [&](const CriterionResult& r) {
    std::printf("%s\n", format_criterion(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  std::printf("%d/%zu criteria passed\n", int(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
