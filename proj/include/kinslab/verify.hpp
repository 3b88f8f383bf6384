#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kinslab {

enum class FaultMode { None, FlipWeight };

/// "none" or "flip-weight" (negates one velocity weight of the measure).
FaultMode parse_fault_mode(const std::string& name);

struct VerifyCase {
    std::string suite;
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyCase> cases;
    bool passed() const;
    std::size_t failures() const;
};

/// Invariant suites of every module at fixed grids; `seed` drives the random
/// cases. Identical seed and fault give an identical report.
VerifyReport cmd_verify(std::uint64_t seed, FaultMode fault = FaultMode::None);

/// One line per case plus a closing tally.
void print_report(std::ostream& out, const VerifyReport& report);

}  // namespace kinslab
