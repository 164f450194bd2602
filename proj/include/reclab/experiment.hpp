#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reclab/admissibility.hpp"
#include "reclab/config.hpp"
#include "reclab/criteria.hpp"
#include "reclab/family.hpp"
#include "reclab/recurrence.hpp"

namespace reclab {

std::string software_version();

/// One CSV row. `method` names the source: criterion, detector,
/// admissibility check or spectral estimate.
struct ReportRow {
    std::string instance;
    std::string analysis;
    std::string quantity;
    std::optional<double> t_or_x;
    double value = 0.0;
    double tol = 0.0;
    double horizon = 0.0;
    bool truncated = false;
    std::string method;
};

struct DetectorOutcome {
    std::string label;  // e.g. nested_ball, nested_ball_backward, direct_scan
    RecurrenceReport report;
};

struct RunRecord {
    std::string instance;
    std::string config_hash;
    std::string version;
    double wall_time_s = 0.0;  // never written to report files
    std::vector<ReportRow> rows;
    std::vector<AdmissibilityCertificate> certificates;
    std::optional<CriterionVerdict> criterion;
    std::vector<DetectorOutcome> detectors;
    std::optional<NestedBallResult> construction;
    std::optional<NestedBallResult> backward_construction;
    std::optional<GDeltaResult> gdelta;
    std::vector<RigidityReport> rigidity;
    std::optional<SpectralRadiusEstimate> spectrum;
    std::vector<ConsistencyRecord> consistency;
    bool spectral_consistent = true;
    std::vector<std::string> notes;
    std::string error;
    int exit_status = 0;
};

/// Objects described by a config.
struct BuiltInstance {
    WeightedGridSpace space;
    std::optional<WeightFunction> weight;
    std::optional<Semiflow> phi;
    /// Translation or composition family carrying the pullback oracle.
    std::optional<OperatorFamily> base;
    OperatorFamily family;
    /// Test vector in family.space(); base_vector is the same data in the
    /// base space (the first component for direct sums).
    GridFunction test_vector;
    GridFunction base_vector;
    /// Single operator lambda T(t0) for rotated and discretized families.
    std::optional<DiscreteOperator> discrete;
};

BuiltInstance build_instance(const ExperimentConfig& config);

/// Time grid step, 2 step, ..., up to horizon.
std::vector<double> time_grid(double step, double horizon);

/// Runs the requested analyses in dependency order (admissibility, criteria,
/// detectors, cross-validation). Never throws on execution errors: they end
/// up in `error` with exit status 1. Exit status 2 marks a criterion claimed
/// necessary failing while a detector found witnesses.
RunRecord run(const ExperimentConfig& config);

/// Rows sorted stably by (instance, analysis, t_or_x), numbers as %.17g.
std::string rows_to_csv(std::vector<ReportRow> rows);
/// Structured summary of verdicts; excludes wall time so reruns are
/// byte-identical.
std::string summary_text(const RunRecord& record, bool include_rows = false);
/// csv: <dir>/<instance>.csv and <dir>/<instance>.summary.json;
/// structured: <dir>/<instance>.json with rows embedded.
void write_reports(const RunRecord& record, const std::string& dir, const std::string& format);

} // namespace reclab
