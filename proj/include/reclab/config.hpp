#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reclab/error.hpp"
#include "reclab/operator_matrix.hpp"
#include "reclab/weight.hpp"

namespace reclab {

inline constexpr int kSchemaVersion = 1;

struct SpaceConfig {
    std::string domain = "half_line";  // half_line | line | open_box | coordinates
    double low = 0.0;                  // open_box only
    double high = std::numeric_limits<double>::infinity();
    double trunc = 200.0;
    double spacing = 0.01;
    std::size_t grid_points = 0;       // overrides spacing when nonzero
    std::string mode = "lp";           // lp | sup
    double p = 1.0;
};

struct WeightConfig {
    std::string name = "flat";
    ParamMap params;
};

struct RotationConfig {
    long long p = 0;
    long long q = 1;
};

struct FamilyConfig {
    /// translation | composition | diagonal | direct_sum | rotated | discretized
    std::string kind = "translation";
    std::string semiflow;  // empty means translation
    ParamMap semiflow_params;
    std::vector<double> frequencies;
    std::optional<RotationConfig> rotation;
    double t0 = 1.0;
};

struct TestVectorConfig {
    std::string kind = "indicator";  // indicator | bump | hat | values | basis
    double a = 0.0;
    double b = 1.0;
    std::vector<double> values;
    std::size_t index = 0;
};

struct AnalysisConfig {
    /// admissibility | criterion | nested_ball | direct_scan | gdelta | rigidity |
    /// uniform_rigidity | spectrum | cross_validate
    std::vector<std::string> operations{"admissibility", "criterion", "nested_ball", "cross_validate"};
    /// auto | liminf | pointwise | lp_mass | c0_sup | jacobian_lp | jacobian_c0 | discrete_spectrum
    std::string criterion = "auto";
    std::string direction = "both";  // forward | backward | both
    double criterion_tol = 1e-4;
    double criterion_horizon = 1e3;
    double criterion_time_step = 1.0;
    /// Detector used for cross-validation: nested_ball | direct_scan.
    std::string detector = "nested_ball";
    double detector_tol = 1e-3;
    double detector_horizon = 1e3;
    double time_step = 1.0;
    double eps0 = 0.5;
    int stages = 6;
    double candidate_step = 1.0;
    double max_time = 0.0;
    double accept_fraction = 1.0;
    /// Also build in the backward time direction (group families).
    bool backward = false;
    TestVectorConfig test_vector;
    std::vector<std::pair<double, double>> compacts{{0.0, 1.0}};
    std::vector<double> x_samples{0.0, 0.5, 1.0};
    double spectrum_t = 1.0;
    double spectrum_tol = 1e-2;
    std::size_t matrix_cap = kDefaultMatrixCap;
    int gdelta_k_max = 10;
    int gdelta_max_level = 2;
    double gdelta_horizon = 64.0;
    double rigidity_tol = 0.1;
    int random_vectors = 2;
    std::uint64_t seed = 1;
};

struct OutputConfig {
    std::string path;
    std::string format = "csv";  // csv | structured
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string name = "experiment";
    SpaceConfig space;
    WeightConfig weight;
    FamilyConfig family;
    AnalysisConfig analysis;
    OutputConfig output;
};

struct ValidationProblem {
    std::string path;
    std::string message;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<ValidationProblem> problems);
    const std::vector<ValidationProblem>& problems() const { return problems_; }

private:
    std::vector<ValidationProblem> problems_;
};

/// Grid size the space section describes.
std::size_t grid_point_count(const SpaceConfig& space, std::size_t coordinates = 0);

bool requests(const AnalysisConfig& analysis, const std::string& operation);
bool requests_matrix(const AnalysisConfig& analysis);

/// Every problem found, each with the dotted path of the offending field.
std::vector<ValidationProblem> validate(const ExperimentConfig& config);

/// Parses and validates; throws ValidationError listing all problems.
ExperimentConfig load_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Canonical serialization (sorted keys), stable across runs.
std::string to_text(const ExperimentConfig& config);
/// 64-bit FNV-1a of the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& config);
std::string hex64(std::uint64_t v);

} // namespace reclab
