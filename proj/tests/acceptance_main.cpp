#include <iostream>

#include "mirrorkit/acceptance.hpp"

int main() {
  bool all = true;
  mirrorkit::run_acceptance([&](const mirrorkit::CriterionResult& c) {
    std::cout << mirrorkit::criterion_line(c) << std::endl;
    all = all && c.pass;
  });
  std::cout << (all ? "acceptance: all criteria pass" : "acceptance: FAILURES") << std::endl;
  return all ? 0 : 1;
}
