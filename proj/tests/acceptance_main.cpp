// Runs the acceptance battery and prints one line per criterion.

#include "holodisc/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  holodisc::acceptance::Options o;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--no-determinism") o.determinism = false;
    else if (a.rfind("--seed=", 0) == 0) o.seed = std::strtoull(a.c_str() + 7, nullptr, 10);
    else o.only.push_back(std::atoi(a.c_str()));
  }
  const auto report = holodisc::acceptance::run_suite(o);
  int failed = 0;
  for (const auto& r : report.results) {
    std::printf("%s\n", holodisc::acceptance::format_line(r).c_str());
    if (!r.pass) {
      std::printf("  details: %s\n", r.details.dump().c_str());
      ++failed;
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(report.results.size()) - failed, report.results.size());
  return report.pass ? 0 : 1;
}
