// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Horizons and tolerances are fixed inside run_acceptance_criteria.
#include <iostream>

#include "htq/verify.hpp"

int main() {
    auto results = htq::run_acceptance_criteria();
    int failures = htq::print_report(results, std::cout);
    return failures == 0 ? 0 : 1;
}
