#include "reclab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "reclab/domain.hpp"
#include "reclab/semiflow.hpp"

namespace reclab {

using nlohmann::json;

namespace {

const std::set<std::string> kDomains{"half_line", "line", "open_box", "coordinates"};
const std::set<std::string> kModes{"lp", "sup"};
const std::set<std::string> kKinds{"translation", "composition", "diagonal", "direct_sum", "rotated", "discretized"};
const std::set<std::string> kVectorKinds{"indicator", "bump", "hat", "values", "basis"};
const std::set<std::string> kOperations{"admissibility", "criterion", "nested_ball", "direct_scan", "gdelta",
                                        "rigidity", "uniform_rigidity", "spectrum", "cross_validate"};
const std::set<std::string> kCriteria{"auto", "liminf", "pointwise", "lp_mass", "c0_sup",
                                      "jacobian_lp", "jacobian_c0", "discrete_spectrum"};
const std::set<std::string> kDirections{"forward", "backward", "both"};
const std::set<std::string> kDetectors{"nested_ball", "direct_scan"};
const std::set<std::string> kFormats{"csv", "structured"};

std::string join_names(const std::set<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

// Reads typed fields out of one JSON object, recording problems instead of
// throwing so that every issue in the document is reported.
class Reader {
public:
    Reader(const json& obj, std::string path, std::vector<ValidationProblem>& problems)
        : obj_(obj), path_(std::move(path)), problems_(problems) {
        if (!obj_.is_object()) problem("", "expected an object");
    }

    ~Reader() = default;

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void problem(const std::string& key, const std::string& message) const {
        problems_.push_back({key.empty() ? path_ : at(key), message});
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.is_object() && obj_.contains(key);
    }

    void number(const std::string& key, double& out) {
        if (!has(key)) return;
        const json& v = obj_[key];
        if (v.is_number()) {
            out = v.get<double>();
        } else if (v.is_string() && (v == "inf" || v == "-inf")) {
            out = v == "inf" ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        } else {
            problem(key, "expected a number");
        }
    }

    template <class Int>
    void integer(const std::string& key, Int& out) {
        if (!has(key)) return;
        const json& v = obj_[key];
        if (v.is_number_integer() || v.is_number_unsigned()) {
            if constexpr (std::is_unsigned_v<Int>) {
                if (v.is_number_integer() && v.get<long long>() < 0) {
                    problem(key, "expected a non-negative integer");
                    return;
                }
            }
            out = v.get<Int>();
        } else {
            problem(key, "expected an integer");
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        if (obj_[key].is_boolean()) out = obj_[key].get<bool>();
        else problem(key, "expected a boolean");
    }

    void string(const std::string& key, std::string& out) {
        if (!has(key)) return;
        if (obj_[key].is_string()) out = obj_[key].get<std::string>();
        else problem(key, "expected a string");
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (!has(key)) return;
        const json& v = obj_[key];
        if (!v.is_array()) {
            problem(key, "expected an array of numbers");
            return;
        }
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                problems_.push_back({at(key) + "[" + std::to_string(i) + "]", "expected a number"});
                continue;
            }
            out.push_back(v[i].get<double>());
        }
    }

    void strings(const std::string& key, std::vector<std::string>& out) {
        if (!has(key)) return;
        const json& v = obj_[key];
        if (!v.is_array()) {
            problem(key, "expected an array of strings");
            return;
        }
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) {
                problems_.push_back({at(key) + "[" + std::to_string(i) + "]", "expected a string"});
                continue;
            }
            out.push_back(v[i].get<std::string>());
        }
    }

    void params(const std::string& key, ParamMap& out) {
        if (!has(key)) return;
        const json& v = obj_[key];
        if (!v.is_object()) {
            problem(key, "expected an object of numbers");
            return;
        }
        out.clear();
        for (const auto& [k, x] : v.items()) {
            if (!x.is_number()) {
                problems_.push_back({at(key) + "." + k, "expected a number"});
                continue;
            }
            out[k] = x.get<double>();
        }
    }

    const json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        return &obj_[key];
    }

    /// Flags keys that no reader call asked for.
    void finish() const {
        if (!obj_.is_object()) return;
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.count(k)) problems_.push_back({at(k), "unknown field"});
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<ValidationProblem>& problems_;
    std::set<std::string> seen_;
};

void read_space(const json& j, SpaceConfig& s, std::vector<ValidationProblem>& probs) {
    Reader r(j, "space", probs);
    r.string("domain", s.domain);
    r.number("low", s.low);
    r.number("high", s.high);
    r.number("trunc", s.trunc);
    r.number("spacing", s.spacing);
    r.integer("grid_points", s.grid_points);
    r.string("mode", s.mode);
    r.number("p", s.p);
    r.finish();
}

void read_family(const json& j, FamilyConfig& f, std::vector<ValidationProblem>& probs) {
    Reader r(j, "family", probs);
    r.string("kind", f.kind);
    r.string("semiflow", f.semiflow);
    r.params("semiflow_params", f.semiflow_params);
    r.numbers("frequencies", f.frequencies);
    r.number("t0", f.t0);
    if (const json* rot = r.child("rotation")) {
        RotationConfig rc;
        Reader rr(*rot, "family.rotation", probs);
        rr.integer("p", rc.p);
        rr.integer("q", rc.q);
        rr.finish();
        f.rotation = rc;
    }
    r.finish();
}

void read_analysis(const json& j, AnalysisConfig& a, std::vector<ValidationProblem>& probs) {
    Reader r(j, "analysis", probs);
    r.strings("operations", a.operations);
    r.string("criterion", a.criterion);
    r.string("direction", a.direction);
    r.number("criterion_tol", a.criterion_tol);
    r.number("criterion_horizon", a.criterion_horizon);
    r.number("criterion_time_step", a.criterion_time_step);
    r.string("detector", a.detector);
    r.number("detector_tol", a.detector_tol);
    r.number("detector_horizon", a.detector_horizon);
    r.number("time_step", a.time_step);
    r.number("eps0", a.eps0);
    r.integer("stages", a.stages);
    r.number("candidate_step", a.candidate_step);
    r.number("max_time", a.max_time);
    r.number("accept_fraction", a.accept_fraction);
    r.boolean("backward", a.backward);
    if (const json* tv = r.child("test_vector")) {
        Reader t(*tv, "analysis.test_vector", probs);
        t.string("kind", a.test_vector.kind);
        t.number("a", a.test_vector.a);
        t.number("b", a.test_vector.b);
        t.numbers("values", a.test_vector.values);
        t.integer("index", a.test_vector.index);
        t.finish();
    }
    if (const json* cs = r.child("compacts")) {
        if (!cs->is_array()) {
            r.problem("compacts", "expected an array of [low, high] pairs");
        } else {
            a.compacts.clear();
            for (std::size_t i = 0; i < cs->size(); ++i) {
                const json& c = (*cs)[i];
                if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
                    probs.push_back({"analysis.compacts[" + std::to_string(i) + "]", "expected [low, high]"});
                    continue;
                }
                a.compacts.emplace_back(c[0].get<double>(), c[1].get<double>());
            }
        }
    }
    r.numbers("x_samples", a.x_samples);
    r.number("spectrum_t", a.spectrum_t);
    r.number("spectrum_tol", a.spectrum_tol);
    r.integer("matrix_cap", a.matrix_cap);
    r.integer("gdelta_k_max", a.gdelta_k_max);
    r.integer("gdelta_max_level", a.gdelta_max_level);
    r.number("gdelta_horizon", a.gdelta_horizon);
    r.number("rigidity_tol", a.rigidity_tol);
    r.integer("random_vectors", a.random_vectors);
    r.integer("seed", a.seed);
    r.finish();
}

void check_in(std::vector<ValidationProblem>& probs, const std::string& path, const std::string& value,
              const std::set<std::string>& allowed) {
    if (!allowed.count(value)) {
        probs.push_back({path, "unknown value '" + value + "' (expected one of: " + join_names(allowed) + ")"});
    }
}

void check_positive(std::vector<ValidationProblem>& probs, const std::string& path, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) probs.push_back({path, "must be a positive finite number"});
}

} // namespace

ValidationError::ValidationError(std::vector<ValidationProblem> problems)
    : Error(ErrorKind::Validation,
            [&] {
                std::string msg = "configuration invalid:";
                for (const auto& p : problems) msg += "\n  " + p.path + ": " + p.message;
                return msg;
            }()),
      problems_(std::move(problems)) {}

std::size_t grid_point_count(const SpaceConfig& space, std::size_t coordinates) {
    if (space.domain == "coordinates") return coordinates;
    if (space.grid_points > 0) return space.grid_points;
    double low = space.domain == "half_line" ? 0.0 : -space.trunc;
    double high = space.trunc;
    if (space.domain == "open_box") {
        low = std::max(space.low, -space.trunc);
        high = std::min(space.high, space.trunc);
    }
    if (!(space.spacing > 0.0) || !(high > low)) return 0;
    return static_cast<std::size_t>(std::llround((high - low) / space.spacing));
}

bool requests(const AnalysisConfig& analysis, const std::string& operation) {
    return std::find(analysis.operations.begin(), analysis.operations.end(), operation) != analysis.operations.end();
}

bool requests_matrix(const AnalysisConfig& analysis) {
    return requests(analysis, "spectrum") || requests(analysis, "uniform_rigidity");
}

std::vector<ValidationProblem> validate(const ExperimentConfig& c) {
    std::vector<ValidationProblem> probs;
    if (c.schema_version != kSchemaVersion) {
        probs.push_back({"schema_version", "unsupported version " + std::to_string(c.schema_version)});
    }
    if (c.name.empty()) probs.push_back({"name", "must not be empty"});

    const SpaceConfig& s = c.space;
    check_in(probs, "space.domain", s.domain, kDomains);
    check_in(probs, "space.mode", s.mode, kModes);
    if (s.mode == "lp" && (!(s.p >= 1.0) || !std::isfinite(s.p))) {
        probs.push_back({"space.p", "p must satisfy 1 <= p < inf"});
    }
    if (s.domain != "coordinates") {
        check_positive(probs, "space.trunc", s.trunc);
        if (s.grid_points == 0) check_positive(probs, "space.spacing", s.spacing);
        if (s.domain == "open_box" && !(s.low < s.high)) probs.push_back({"space.low", "low must be below high"});
        if (kDomains.count(s.domain) && grid_point_count(s) < 2) {
            probs.push_back({"space.grid_points", "grid needs at least 2 points"});
        }
    }

    const auto weight_names = weights::names();
    if (std::find(weight_names.begin(), weight_names.end(), c.weight.name) == weight_names.end()) {
        const auto& names = weight_names;
        probs.push_back({"weight.name", "unknown weight '" + c.weight.name + "' (expected one of: " +
                                            join_names({names.begin(), names.end()}) + ")"});
    } else {
        try {
            (void)weights::make(c.weight.name, c.weight.params);
        } catch (const Error& e) {
            probs.push_back({"weight.params", e.what()});
        }
    }

    const FamilyConfig& f = c.family;
    check_in(probs, "family.kind", f.kind, kKinds);
    if (!f.semiflow.empty()) {
        const auto names = semiflows::names();
        if (std::find(names.begin(), names.end(), f.semiflow) == names.end()) {
            probs.push_back({"family.semiflow", "unknown semiflow '" + f.semiflow + "' (expected one of: " +
                                                    join_names({names.begin(), names.end()}) + ")"});
        }
    }
    if (f.kind == "composition" && f.semiflow.empty()) {
        probs.push_back({"family.semiflow", "composition families need a semiflow"});
    }
    if (f.kind == "diagonal") {
        if (f.frequencies.empty()) probs.push_back({"family.frequencies", "diagonal families need frequencies"});
        if (s.domain != "coordinates") probs.push_back({"space.domain", "diagonal families need 'coordinates'"});
    } else if (s.domain == "coordinates") {
        probs.push_back({"space.domain", "'coordinates' is only valid for diagonal families"});
    }
    if (f.kind == "rotated" && !f.rotation) probs.push_back({"family.rotation", "rotated families need (p, q)"});
    if (f.rotation && f.rotation->q < 1) probs.push_back({"family.rotation.q", "q must be >= 1"});
    if (f.kind == "rotated" || f.kind == "discretized") check_positive(probs, "family.t0", f.t0);

    const AnalysisConfig& a = c.analysis;
    for (std::size_t i = 0; i < a.operations.size(); ++i) {
        check_in(probs, "analysis.operations[" + std::to_string(i) + "]", a.operations[i], kOperations);
    }
    check_in(probs, "analysis.criterion", a.criterion, kCriteria);
    check_in(probs, "analysis.direction", a.direction, kDirections);
    check_in(probs, "analysis.detector", a.detector, kDetectors);
    check_positive(probs, "analysis.criterion_tol", a.criterion_tol);
    check_positive(probs, "analysis.criterion_horizon", a.criterion_horizon);
    check_positive(probs, "analysis.criterion_time_step", a.criterion_time_step);
    check_positive(probs, "analysis.detector_tol", a.detector_tol);
    check_positive(probs, "analysis.detector_horizon", a.detector_horizon);
    check_positive(probs, "analysis.time_step", a.time_step);
    check_positive(probs, "analysis.candidate_step", a.candidate_step);
    check_positive(probs, "analysis.spectrum_tol", a.spectrum_tol);
    check_positive(probs, "analysis.rigidity_tol", a.rigidity_tol);
    check_positive(probs, "analysis.gdelta_horizon", a.gdelta_horizon);
    if (!(a.eps0 > 0.0 && a.eps0 < 1.0)) probs.push_back({"analysis.eps0", "must lie in (0, 1)"});
    if (a.stages < 1) probs.push_back({"analysis.stages", "must be >= 1"});
    if (a.max_time < 0.0) probs.push_back({"analysis.max_time", "must be >= 0"});
    if (!(a.accept_fraction > 0.0 && a.accept_fraction <= 1.0)) {
        probs.push_back({"analysis.accept_fraction", "must lie in (0, 1]"});
    }
    if (a.gdelta_k_max < 1) probs.push_back({"analysis.gdelta_k_max", "must be >= 1"});
    if (a.gdelta_max_level < 0 || a.gdelta_max_level > 12) {
        probs.push_back({"analysis.gdelta_max_level", "must lie in [0, 12]"});
    }
    if (a.random_vectors < 0) probs.push_back({"analysis.random_vectors", "must be >= 0"});
    check_in(probs, "analysis.test_vector.kind", a.test_vector.kind, kVectorKinds);
    for (std::size_t i = 0; i < a.compacts.size(); ++i) {
        if (!(a.compacts[i].first < a.compacts[i].second)) {
            probs.push_back({"analysis.compacts[" + std::to_string(i) + "]", "low must be below high"});
        }
    }
    if (requests_matrix(a)) {
        const std::size_t n = grid_point_count(s, f.frequencies.size()) * (f.kind == "direct_sum" ? 2 : 1);
        if (n > a.matrix_cap) {
            probs.push_back({"space.grid_points", "grid of " + std::to_string(n) + " points exceeds matrix cap " +
                                                      std::to_string(a.matrix_cap) + " required by matrix analyses"});
        }
    }
    check_in(probs, "output.format", c.output.format, kFormats);
    return probs;
}

ExperimentConfig load_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError({{"", std::string("malformed document: ") + e.what()}});
    }
    ExperimentConfig c;
    std::vector<ValidationProblem> probs;
    Reader r(doc, "", probs);
    r.integer("schema_version", c.schema_version);
    r.string("name", c.name);
    if (const json* s = r.child("space")) read_space(*s, c.space, probs);
    if (const json* w = r.child("weight")) {
        Reader wr(*w, "weight", probs);
        wr.string("name", c.weight.name);
        wr.params("params", c.weight.params);
        wr.finish();
    }
    if (const json* f = r.child("family")) read_family(*f, c.family, probs);
    if (const json* a = r.child("analysis")) read_analysis(*a, c.analysis, probs);
    if (const json* o = r.child("output")) {
        Reader orr(*o, "output", probs);
        orr.string("path", c.output.path);
        orr.string("format", c.output.format);
        orr.finish();
    }
    r.finish();
    auto more = validate(c);
    probs.insert(probs.end(), more.begin(), more.end());
    if (!probs.empty()) throw ValidationError(std::move(probs));
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({{"", "cannot read config file " + path}});
    std::stringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

namespace {

json num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json params_json(const ParamMap& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

} // namespace

std::string to_text(const ExperimentConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    j["space"] = {{"domain", c.space.domain}, {"low", num(c.space.low)},   {"high", num(c.space.high)},
                  {"trunc", num(c.space.trunc)}, {"spacing", c.space.spacing}, {"grid_points", c.space.grid_points},
                  {"mode", c.space.mode},      {"p", c.space.p}};
    j["weight"] = {{"name", c.weight.name}, {"params", params_json(c.weight.params)}};
    json fam = {{"kind", c.family.kind},
                {"semiflow", c.family.semiflow},
                {"semiflow_params", params_json(c.family.semiflow_params)},
                {"frequencies", c.family.frequencies},
                {"t0", c.family.t0}};
    if (c.family.rotation) fam["rotation"] = {{"p", c.family.rotation->p}, {"q", c.family.rotation->q}};
    j["family"] = fam;
    const AnalysisConfig& a = c.analysis;
    json compacts = json::array();
    for (const auto& [lo, hi] : a.compacts) compacts.push_back({lo, hi});
    j["analysis"] = {{"operations", a.operations},
                     {"criterion", a.criterion},
                     {"direction", a.direction},
                     {"criterion_tol", a.criterion_tol},
                     {"criterion_horizon", a.criterion_horizon},
                     {"criterion_time_step", a.criterion_time_step},
                     {"detector", a.detector},
                     {"detector_tol", a.detector_tol},
                     {"detector_horizon", a.detector_horizon},
                     {"time_step", a.time_step},
                     {"eps0", a.eps0},
                     {"stages", a.stages},
                     {"candidate_step", a.candidate_step},
                     {"max_time", a.max_time},
                     {"accept_fraction", a.accept_fraction},
                     {"backward", a.backward},
                     {"test_vector",
                      {{"kind", a.test_vector.kind},
                       {"a", a.test_vector.a},
                       {"b", a.test_vector.b},
                       {"values", a.test_vector.values},
                       {"index", a.test_vector.index}}},
                     {"compacts", compacts},
                     {"x_samples", a.x_samples},
                     {"spectrum_t", a.spectrum_t},
                     {"spectrum_tol", a.spectrum_tol},
                     {"matrix_cap", a.matrix_cap},
                     {"gdelta_k_max", a.gdelta_k_max},
                     {"gdelta_max_level", a.gdelta_max_level},
                     {"gdelta_horizon", a.gdelta_horizon},
                     {"rigidity_tol", a.rigidity_tol},
                     {"random_vectors", a.random_vectors},
                     {"seed", a.seed}};
    j["output"] = {{"path", c.output.path}, {"format", c.output.format}};
    return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    // output location does not change any result
    ExperimentConfig c = config;
    c.output = OutputConfig{};
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : to_text(c)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace reclab
