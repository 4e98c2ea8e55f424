// Verification battery: one pass/fail line per criterion; exit 0 iff all pass.

#include <iostream>

#include "robin/acceptance.hpp"

int main() {
  robin::AcceptanceOptions opts;
  opts.threads = 4;
  const auto results = robin::run_acceptance(opts, &std::cout);
  const bool ok = robin::all_passed(results);
  std::cout << (ok ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << "\n";
  return ok ? 0 : 1;
}
