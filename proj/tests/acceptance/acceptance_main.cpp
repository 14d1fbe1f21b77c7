// Prints one line per acceptance criterion and exits nonzero if any failed.
// With arguments, runs only the listed criterion ids.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "bisons_acceptance/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace bisons::acceptance;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
  }
  Session session;
  int failed = 0;
  for (int id : ids) {
    if (id < 1 || id > kCriterionCount) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    const CriterionResult& r = session.run(id);
    std::cout << format_result(r) << std::endl;
    failed += r.passed ? 0 : 1;
  }
  std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
