// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exits nonzero when any non-informational criterion fails.

#include <cstdio>

#include <ssmspectra/acceptance.hpp>

int main()
{
    const auto results = ssmspectra::acceptance::run_all();
    const bool ok = ssmspectra::acceptance::report(results);
    std::printf("%s\n", ok ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return ok ? 0 : 1;
}
