#pragma once

#include <string>
#include <vector>

#include "porecouple/component/component.hpp"
#include "porecouple/core/types.hpp"

namespace porecouple::component {

/// Helpers that read typed values out of a ConfigTree, raising InvalidArgument with the
/// offending key on failure.

double number_at(const ConfigTree& node, const std::string& key);
double number_or(const ConfigTree& node, const std::string& key, double fallback);
int integer_or(const ConfigTree& node, const std::string& key, int fallback);

/// A scalar (uniform) or an array of n values.
VectorXd uniform_or_array(const ConfigTree& value, Index n, const std::string& what);

/// Per-entity rows of `names.size()` values: either an object {name: value} applied
/// uniformly, or an array of n arrays ordered like `names`.
MatrixXd rows_by_name(const ConfigTree& value, Index n, const std::vector<std::string>& names,
                      const std::string& what);

}  // namespace porecouple::component
