#include "reclab/catalog.hpp"

#include <cmath>
#include <numbers>

namespace reclab {

namespace {

ExperimentConfig halfline(const std::string& name, const std::string& weight, ParamMap params) {
    ExperimentConfig c;
    c.name = name;
    c.space.domain = "half_line";
    c.space.trunc = 200.0;
    c.space.spacing = 0.01;
    c.space.mode = "lp";
    c.space.p = 1.0;
    c.weight = {weight, std::move(params)};
    c.family.kind = "translation";
    c.analysis.operations = {"admissibility", "criterion", "nested_ball", "direct_scan", "cross_validate"};
    c.analysis.criterion = "liminf";
    c.analysis.detector_tol = 0.1;
    c.analysis.test_vector = {"indicator", 0.0, 1.0, {}, 0};
    return c;
}

ExperimentConfig line(const std::string& name, const std::string& weight) {
    ExperimentConfig c;
    c.name = name;
    c.space.domain = "line";
    c.space.trunc = 200.0;
    c.space.spacing = 0.01;
    c.space.mode = "lp";
    c.space.p = 1.0;
    c.weight = {weight, {{"rate", 1.0}}};
    c.family.kind = "translation";
    c.analysis.operations = {"admissibility", "criterion", "nested_ball", "direct_scan", "cross_validate"};
    c.analysis.criterion = "pointwise";
    c.analysis.direction = "both";
    c.analysis.stages = 4;
    c.analysis.detector_tol = 0.1;
    c.analysis.detector_horizon = 400.0;
    c.analysis.x_samples = {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0};
    c.analysis.test_vector = {"indicator", 0.0, 1.0, {}, 0};
    return c;
}

ExperimentConfig dilation(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.space.domain = "open_box";
    c.space.low = 0.0;
    c.space.high = std::numeric_limits<double>::infinity();
    c.family.kind = "composition";
    c.family.semiflow = "dilation";
    c.family.semiflow_params = {{"rate", 1.0}};
    c.analysis.operations = {"admissibility", "criterion", "nested_ball", "cross_validate"};
    c.analysis.compacts = {{1.0, 2.0}};
    c.analysis.x_samples = {0.5, 1.0, 2.0};
    c.analysis.stages = 2;
    c.analysis.candidate_step = 0.25;
    c.analysis.max_time = 12.0;
    c.analysis.accept_fraction = 0.5;
    c.analysis.test_vector = {"bump", 1.0, 2.0, {}, 0};
    return c;
}

ExperimentConfig diagonal(const std::string& name, std::vector<double> frequencies, std::vector<double> vector) {
    ExperimentConfig c;
    c.name = name;
    c.space.domain = "coordinates";
    c.space.mode = "lp";
    c.space.p = 2.0;
    c.family.kind = "diagonal";
    c.family.frequencies = std::move(frequencies);
    c.analysis.operations = {"criterion", "direct_scan", "rigidity", "uniform_rigidity", "cross_validate"};
    c.analysis.criterion = "discrete_spectrum";
    c.analysis.detector = "direct_scan";
    c.analysis.test_vector = {"values", 0.0, 1.0, std::move(vector), 0};
    return c;
}

std::vector<CatalogInstance> build() {
    std::vector<CatalogInstance> out;

    {
        auto c = halfline("halfline-expdecay", "exp_decay", {{"rate", 1.0}});
        c.analysis.operations.push_back("gdelta");
        out.push_back({"halfline-expdecay", "translation on L^1_rho[0,inf), rho = e^{-x}", true,
                       "lim inf of rho is 0 (closed form); comb construction", c});
    }
    {
        auto c = halfline("halfline-flat", "flat", {});
        c.analysis.detector_tol = 0.5;
        out.push_back({"halfline-flat", "translation on L^1[0,inf), rho = 1", false,
                       "residual of any compactly supported f is ||f|| once shifted past its support", c});
    }
    {
        auto c = halfline("halfline-growing", "exp_growth", {{"rate", 1.0}});
        c.space.trunc = 20.48;
        c.analysis.operations.push_back("spectrum");
        out.push_back({"halfline-growing", "translation on L^1_rho[0,inf), rho = e^{x}", false,
                       "||T(t)|| <= e^{-t}, spectral radius e^{-1} < 1", c});
    }
    {
        auto c = line("line-symmetric", "symmetric_exp");
        c.analysis.backward = true;
        out.push_back({"line-symmetric", "translation group on L^1_rho(R), rho = e^{-|x|}", true,
                       "rho decays in both directions (direct evaluation); comb in both time directions", c});
    }
    {
        auto c = line("line-oneside", "one_sided_exp");
        out.push_back({"line-oneside", "translation on L^1_rho(R), rho = e^{-max(x,0)}", false,
                       "mass pushed left keeps its norm (rho = 1 there)", c});
    }
    {
        auto c = dilation("dilation-lp");
        c.space.trunc = 600.0;
        c.space.spacing = 0.01;
        c.space.mode = "lp";
        c.space.p = 1.0;
        c.weight = {"inverse_power", {{"power", 3.0}}};
        c.analysis.criterion = "lp_mass";
        out.push_back({"dilation-lp", "f(x e^t) on L^1_rho(0,inf), rho = (1+x)^{-3}", true,
                       "forward-image mass of [1,2] tends to 0 (closed form)", c});
    }
    {
        auto c = dilation("dilation-c0");
        c.space.trunc = 5000.0;
        c.space.spacing = 0.05;
        c.space.mode = "sup";
        c.weight = {"rational_hump", {}};
        c.analysis.criterion = "c0_sup";
        out.push_back({"dilation-c0", "f(x e^t) on C_{0,rho}(0,inf), rho = x/(1+x^2)", true,
                       "sup of rho over image and preimage of [1,2] tends to 0 (monotone evaluation)", c});
    }
    {
        auto c = diagonal("diagonal-rational", {2.0 * std::numbers::pi, 4.0 * std::numbers::pi}, {1.0, 1.0});
        out.push_back({"diagonal-rational", "diag(e^{2 pi i t}, e^{4 pi i t}) on C^2", true,
                       "every integer time is an exact return", c});
    }
    {
        auto c = diagonal("diagonal-irrational", {2.0 * std::numbers::pi * std::numbers::sqrt2}, {1.0});
        c.analysis.criterion_tol = 0.05;
        c.analysis.detector_tol = 0.05;
        c.analysis.criterion_horizon = 1e4;
        c.analysis.detector_horizon = 1e4;
        out.push_back({"diagonal-irrational", "e^{2 pi i sqrt(2) t} on C", true,
                       "equidistribution of n sqrt(2) mod 1 (scalar brute force)", c});
    }
    return out;
}

} // namespace

const std::vector<CatalogInstance>& catalog() {
    static const std::vector<CatalogInstance> instances = build();
    return instances;
}

const CatalogInstance& catalog_instance(const std::string& name) {
    for (const auto& inst : catalog()) {
        if (inst.name == name) return inst;
    }
    std::string known;
    for (const auto& inst : catalog()) known += (known.empty() ? "" : ", ") + inst.name;
    throw Error(ErrorKind::Validation, "unknown instance '" + name + "' (known: " + known + ")");
}

std::string emit_catalog() {
    std::string out;
    for (const auto& inst : catalog()) {
        out += inst.name + "\t" + inst.description + "\t" +
               (inst.expected_recurrent ? "recurrent" : "not recurrent") + "\t" + inst.basis + "\n";
    }
    return out;
}

} // namespace reclab
