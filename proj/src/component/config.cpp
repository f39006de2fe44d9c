#include "porecouple/component/config.hpp"

#include <algorithm>
#include <cmath>

#include "porecouple/core/error.hpp"

namespace porecouple::component {

namespace {

double as_number(const ConfigTree& v, const std::string& what) {
  if (!v.is_number()) throw InvalidArgument(what + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidArgument(what + ": value is not finite");
  return x;
}

}  // namespace

double number_at(const ConfigTree& node, const std::string& key) {
  if (!node.is_object() || !node.contains(key)) {
    throw InvalidArgument("missing required key '" + key + "'");
  }
  return as_number(node.at(key), key);
}

double number_or(const ConfigTree& node, const std::string& key, double fallback) {
  if (!node.is_object() || !node.contains(key)) return fallback;
  return as_number(node.at(key), key);
}

int integer_or(const ConfigTree& node, const std::string& key, int fallback) {
  if (!node.is_object() || !node.contains(key)) return fallback;
  const auto& v = node.at(key);
  if (!v.is_number_integer()) throw InvalidArgument(key + ": expected an integer");
  return v.get<int>();
}

VectorXd uniform_or_array(const ConfigTree& value, Index n, const std::string& what) {
  if (value.is_number()) {
    return VectorXd::Constant(n, as_number(value, what));
  }
  if (!value.is_array() || static_cast<Index>(value.size()) != n) {
    throw InvalidArgument(what + ": expected a number or an array of " + std::to_string(n) +
                          " numbers");
  }
  VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    out[i] = as_number(value[static_cast<std::size_t>(i)], what);
  }
  return out;
}

MatrixXd rows_by_name(const ConfigTree& value, Index n, const std::vector<std::string>& names,
                      const std::string& what) {
  const auto m = static_cast<Index>(names.size());
  MatrixXd out = MatrixXd::Zero(n, m);
  if (value.is_object()) {
    for (const auto& [key, _] : value.items()) {
      if (std::find(names.begin(), names.end(), key) == names.end()) {
        throw InvalidArgument(what + ": unknown name '" + key + "'");
      }
    }
    for (Index j = 0; j < m; ++j) {
      const auto& name = names[static_cast<std::size_t>(j)];
      if (value.contains(name)) {
        out.col(j).setConstant(as_number(value.at(name), what + "." + name));
      }
    }
    return out;
  }
  if (!value.is_array() || static_cast<Index>(value.size()) != n) {
    throw InvalidArgument(what + ": expected an object keyed by name or an array of " +
                          std::to_string(n) + " rows");
  }
  for (Index i = 0; i < n; ++i) {
    const auto& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != m) {
      throw InvalidArgument(what + ": row " + std::to_string(i) + " must hold " +
                            std::to_string(m) + " numbers");
    }
    for (Index j = 0; j < m; ++j) out(i, j) = as_number(row[static_cast<std::size_t>(j)], what);
  }
  return out;
}

}  // namespace porecouple::component
