#pragma once

#include <string>
#include <vector>

namespace reclab {

struct VerifyEntry {
    std::string suite;
    std::string invariant;
    bool passed = false;
    std::string detail;
};

struct VerifySummary {
    std::vector<VerifyEntry> entries;
    bool all_passed() const;
    /// 0 when every entry passed (or nothing ran), 1 otherwise.
    int exit_status() const;
};

struct VerifyOptions {
    /// Suite whose comparison tolerance is replaced by -inf; the suite must
    /// then report a named failure. Used as a fixture for the failure path.
    std::string tamper;
};

/// direct-sum, time-discretization, rotation, forward-backward, spectral, gdelta.
std::vector<std::string> verify_suite_names();

/// Runs the selected suites ("all" expands to every suite, an empty selector
/// runs nothing). Unknown names throw ErrorKind::Validation.
VerifySummary verify_theorems(const std::vector<std::string>& selector, const VerifyOptions& options = {});

/// One "PASS|FAIL suite: invariant (detail)" line per entry.
std::string format_summary(const VerifySummary& summary);

} // namespace reclab
