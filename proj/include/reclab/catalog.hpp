#pragma once

#include <string>
#include <vector>

#include "reclab/config.hpp"

namespace reclab {

struct CatalogInstance {
    std::string name;
    std::string description;
    bool expected_recurrent = false;
    /// How the expected verdict is known.
    std::string basis;
    ExperimentConfig config;
};

/// The built-in instances, in listing order.
const std::vector<CatalogInstance>& catalog();
/// Throws ErrorKind::Validation for an unknown name.
const CatalogInstance& catalog_instance(const std::string& name);
/// One line per instance: name, description, expected verdict, basis.
std::string emit_catalog();

} // namespace reclab
