#include "porecouple/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "porecouple/core/error.hpp"
#include "porecouple/meshfield/mesh.hpp"

namespace porecouple::cli {

namespace {

const std::vector<std::string> kTags = {"LEFT", "RIGHT", "BOTTOM", "TOP"};

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

std::vector<std::string> names_of(const Json& array) {
  std::vector<std::string> out;
  if (!array.is_array()) return out;
  for (const auto& e : array) {
    if (e.is_object() && e.contains("name") && e.at("name").is_string()) out.push_back(e.at("name").get<std::string>());
  }
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

class Checker {
 public:
  std::vector<Diagnostic> diagnostics;

  void error(const std::string& path, const std::string& message) { diagnostics.push_back({path, message}); }

  const Json* require(const Json& node, const std::string& key, const std::string& path) {
    if (!node.is_object() || !node.contains(key)) {
      error(path + "." + key, "missing");
      return nullptr;
    }
    return &node.at(key);
  }

  /// Number at node[key] satisfying `ok`; optional keys may be absent.
  void number(const Json& node, const std::string& key, const std::string& path, bool required,
              bool (*ok)(double), const char* rule) {
    const std::string p = path + "." + key;
    if (!node.is_object() || !node.contains(key)) {
      if (required) error(p, "missing");
      return;
    }
    const Json& v = node.at(key);
    if (!v.is_number()) {
      error(p, "must be a number");
    } else if (!std::isfinite(v.get<double>()) || !ok(v.get<double>())) {
      error(p, std::string("must be ") + rule);
    }
  }

  void integer(const Json& node, const std::string& key, const std::string& path, bool required, long long min) {
    const std::string p = path + "." + key;
    if (!node.is_object() || !node.contains(key)) {
      if (required) error(p, "missing");
      return;
    }
    const Json& v = node.at(key);
    if (!v.is_number_integer()) {
      error(p, "must be an integer");
    } else if (v.get<long long>() < min) {
      error(p, "must be at least " + std::to_string(min));
    }
  }

  void boolean(const Json& node, const std::string& key, const std::string& path) {
    if (node.is_object() && node.contains(key) && !node.at(key).is_boolean()) error(path + "." + key, "must be true or false");
  }

  /// A number or an array of n numbers, each satisfying `ok`.
  void per_cell(const Json& v, const std::string& path, Index n, bool (*ok)(double), const char* rule) {
    if (v.is_number()) {
      if (!ok(v.get<double>())) error(path, std::string("must be ") + rule);
      return;
    }
    if (!v.is_array() || static_cast<Index>(v.size()) != n) {
      error(path, "must be a number or an array of " + std::to_string(n) + " numbers");
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !ok(v[i].get<double>())) {
        error(path + "[" + std::to_string(i) + "]", std::string("must be ") + rule);
      }
    }
  }

  /// {name: number} with every name in `known` and values satisfying `ok`.
  void named_values(const Json& v, const std::string& path, const std::vector<std::string>& known, const char* kind,
                    bool (*ok)(double), const char* rule) {
    if (!v.is_object()) {
      error(path, std::string("must map ") + kind + " names to numbers");
      return;
    }
    for (const auto& [name, value] : v.items()) {
      if (!contains(known, name)) {
        error(path + "." + name, std::string("unknown ") + kind + " '" + name + "' (known: " + join(known) + ")");
      } else if (!value.is_number() || !ok(value.get<double>())) {
        error(path + "." + name, std::string("must be ") + rule);
      }
    }
  }
};

bool positive(double x) { return x > 0.0; }
bool non_negative(double x) { return x >= 0.0; }
bool any_finite(double) { return true; }
bool at_least_one(double x) { return x >= 1.0; }
bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }
bool porosity_range(double x) { return x > 0.0 && x <= 1.0; }

void check_implementation(Checker& ck, const component::Registry& registry, const Json& block,
                          const std::string& application, const std::string& fallback) {
  std::string impl = fallback;
  if (block.contains("implementation")) {
    if (!block.at("implementation").is_string()) {
      ck.error(application + ".implementation", "must be a string");
      return;
    }
    impl = block.at("implementation").get<std::string>();
  }
  if (!registry.contains(application, impl)) {
    std::vector<std::string> known;
    for (const auto& [app, name] : registry.entries()) {
      if (app == application) known.push_back(name);
    }
    ck.error(application + ".implementation", "unknown implementation '" + impl + "' (registered: " + join(known) + ")");
  }
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

struct PathStep {
  std::string key;
  std::optional<std::size_t> index;
};

std::vector<PathStep> parse_path(const std::string& path) {
  std::vector<PathStep> steps;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    const auto bracket = part.find('[');
    PathStep head{part.substr(0, bracket), std::nullopt};
    if (head.key.empty()) throw InvalidArgument("override path '" + path + "' has an empty segment");
    steps.push_back(head);
    std::size_t pos = bracket;
    while (pos != std::string::npos) {
      const auto close = part.find(']', pos);
      if (close == std::string::npos) throw InvalidArgument("override path '" + path + "' has an unclosed '['");
      const std::string digits = part.substr(pos + 1, close - pos - 1);
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
        throw InvalidArgument("override path '" + path + "' has a bad index '" + digits + "'");
      }
      steps.push_back({"", static_cast<std::size_t>(std::stoull(digits))});
      pos = close + 1 < part.size() ? close + 1 : std::string::npos;
      if (pos != std::string::npos && part[pos] != '[') {
        throw InvalidArgument("override path '" + path + "' has text after ']'");
      }
    }
  }
  if (steps.empty()) throw InvalidArgument("empty override path");
  return steps;
}

Json strip_implementation(Json block) {
  if (block.is_object()) block.erase("implementation");
  return block;
}

std::string implementation_of(const Json& block, const std::string& fallback) {
  return block.contains("implementation") ? block.at("implementation").get<std::string>() : fallback;
}

bool region_contains(const Json& region, const meshfield::Mesh& mesh, Index cell) {
  if (region.contains("cells")) {
    for (const auto& id : region.at("cells")) {
      if (id.get<Index>() == cell) return true;
    }
    return false;
  }
  if (!region.contains("box")) return true;
  const auto& box = region.at("box");
  const auto& p = mesh.cell(cell).centroid;
  for (const auto& [axis, value] : {std::pair{"x", p.x()}, std::pair{"y", p.y()}}) {
    if (!box.contains(axis)) continue;
    const auto range = box.at(axis).get<std::vector<double>>();
    if (value < range[0] || value > range[1]) return false;
  }
  return true;
}

}  // namespace

std::string to_string(const Diagnostic& d) { return d.path + ": " + d.message; }

Json parse_scenario_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw ParseError("invalid JSON: " + std::string(e.what()), line, column);
  }
}

Json load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path.string() + "'", 0, 0);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario_text(text);
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidArgument("override '" + assignment + "' must look like key=value");
  }
  const auto steps = parse_path(assignment.substr(0, eq));
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  for (const auto& step : steps) {
    if (step.index) {
      if (!node->is_array() || *step.index >= node->size()) {
        throw InvalidArgument("override '" + assignment + "': index " + std::to_string(*step.index) +
                              " is out of range");
      }
      node = &(*node)[*step.index];
    } else {
      if (node->is_null()) *node = Json::object();
      if (!node->is_object()) {
        throw InvalidArgument("override '" + assignment + "': '" + step.key + "' is not inside an object");
      }
      node = &(*node)[step.key];
    }
  }
  *node = std::move(value);
}

std::vector<Diagnostic> validate_scenario(const Json& doc, const component::Registry& registry) {
  Checker ck;
  if (!doc.is_object()) {
    ck.error("", "scenario must be a JSON object");
    return ck.diagnostics;
  }
  for (const auto& [key, _] : doc.items()) {
    static const std::set<std::string> known = {"mesh", "flow", "transport", "chemistry",
                                                "coupling", "waste_packages", "output"};
    if (!known.count(key)) ck.error(key, "unknown block");
  }

  // mesh
  Index n_cells = 0;
  std::optional<meshfield::Mesh> mesh;
  if (const Json* m = ck.require(doc, "mesh", "")) {
    const std::size_t before = ck.diagnostics.size();
    ck.integer(*m, "nx", "mesh", true, 1);
    ck.integer(*m, "ny", "mesh", true, 1);
    ck.number(*m, "dx", "mesh", true, positive, "positive");
    ck.number(*m, "dy", "mesh", true, positive, "positive");
    if (ck.diagnostics.size() == before) {
      mesh.emplace(meshfield::build_structured_mesh(m->at("nx").get<Index>(), m->at("ny").get<Index>(),
                                                    m->at("dx").get<double>(), m->at("dy").get<double>()));
      n_cells = mesh->n_cells();
    }
  }
  // transport
  std::vector<std::string> species;
  std::vector<double> retardation;
  if (const Json* t = ck.require(doc, "transport", "")) {
    check_implementation(ck, registry, *t, "transport", "fv-reference");
    if (!t->contains("species") || !t->at("species").is_array() || t->at("species").empty()) {
      ck.error("transport.species", "must be a non-empty array");
    } else {
      const auto& sp = t->at("species");
      species = names_of(sp);
      if (species.size() != sp.size()) ck.error("transport.species", "every entry needs a string 'name'");
      std::set<std::string> seen;
      for (std::size_t i = 0; i < sp.size(); ++i) {
        const std::string p = "transport.species[" + std::to_string(i) + "]";
        const Json& e = sp[i];
        if (e.contains("name") && e.at("name").is_string() && !seen.insert(e.at("name").get<std::string>()).second) {
          ck.error(p + ".name", "duplicate species '" + e.at("name").get<std::string>() + "'");
        }
        ck.number(e, "diffusion", p, false, non_negative, "non-negative");
        ck.number(e, "retardation", p, false, at_least_one, "at least 1");
        ck.number(e, "decay_rate", p, false, non_negative, "non-negative");
        retardation.push_back(e.contains("retardation") && e.at("retardation").is_number()
                                  ? e.at("retardation").get<double>()
                                  : 1.0);
        if (e.contains("parent")) {
          if (!e.at("parent").is_string() || !contains(species, e.at("parent").get<std::string>())) {
            ck.error(p + ".parent", "must name another species (known: " + join(species) + ")");
          }
        }
      }
      // Acyclic chain, one daughter per parent.
      std::map<std::string, std::string> parent_of;
      std::map<std::string, int> daughters;
      for (const auto& e : sp) {
        if (e.contains("name") && e.contains("parent") && e.at("parent").is_string() && e.at("name").is_string()) {
          parent_of[e.at("name").get<std::string>()] = e.at("parent").get<std::string>();
          if (++daughters[e.at("parent").get<std::string>()] == 2) {
            ck.error("transport.species", "species '" + e.at("parent").get<std::string>() +
                                              "' is the parent of more than one species");
          }
        }
      }
      for (const auto& [start, _] : parent_of) {
        std::string cur = start;
        for (std::size_t hops = 0; parent_of.count(cur); ++hops) {
          cur = parent_of[cur];
          if (cur == start || hops > parent_of.size()) {
            ck.error("transport.species", "decay chain through '" + start + "' forms a cycle");
            break;
          }
        }
      }
    }
    ck.number(*t, "dispersivity", "transport", false, non_negative, "non-negative");
    ck.number(*t, "theta", "transport", false, unit_interval, "in [0, 1]");
    if (t->contains("porosity") && n_cells > 0) ck.per_cell(t->at("porosity"), "transport.porosity", n_cells, porosity_range, "in (0, 1]");
    if (t->contains("boundary_concentrations")) {
      const auto& bc = t->at("boundary_concentrations");
      if (!bc.is_object()) {
        ck.error("transport.boundary_concentrations", "must map boundary tags to {species: value}");
      } else {
        for (const auto& [tag, values] : bc.items()) {
          const std::string p = "transport.boundary_concentrations." + tag;
          if (!contains(kTags, tag)) ck.error(p, "unknown boundary tag '" + tag + "' (known: " + join(kTags) + ")");
          ck.named_values(values, p, species, "species", non_negative, "non-negative");
        }
      }
    }
    if (t->contains("initial")) {
      const auto& init = t->at("initial");
      if (init.is_object()) {
        ck.named_values(init, "transport.initial", species, "species", non_negative, "non-negative");
      } else if (!init.is_array() || static_cast<Index>(init.size()) != n_cells) {
        ck.error("transport.initial", "must be {species: value} or one row per cell");
      }
    }
  }

  // flow
  if (doc.contains("flow")) {
    const Json& f = doc.at("flow");
    check_implementation(ck, registry, f, "flow", "darcy-reference");
    if (!f.contains("conductivity")) {
      ck.error("flow.conductivity", "missing");
    } else if (n_cells > 0) {
      ck.per_cell(f.at("conductivity"), "flow.conductivity", n_cells, positive, "positive");
    }
    if (!f.contains("boundary_heads") || !f.at("boundary_heads").is_object() || f.at("boundary_heads").empty()) {
      ck.error("flow.boundary_heads", "needs at least one fixed-head boundary tag");
    } else {
      ck.named_values(f.at("boundary_heads"), "flow.boundary_heads", kTags, "boundary tag", any_finite, "a number");
    }
    if (f.contains("reference_porosity") && n_cells > 0) {
      ck.per_cell(f.at("reference_porosity"), "flow.reference_porosity", n_cells, porosity_range, "in (0, 1]");
    }
  }

  // chemistry
  if (doc.contains("chemistry")) {
    const Json& c = doc.at("chemistry");
    check_implementation(ck, registry, c, "chemistry", "equilibrium-reference");
    std::vector<std::string> primaries;
    if (!c.contains("primaries") || !c.at("primaries").is_array()) {
      ck.error("chemistry.primaries", "must be an array of names");
    } else {
      for (const auto& p : c.at("primaries")) {
        if (p.is_string()) primaries.push_back(p.get<std::string>());
      }
      if (primaries.size() != c.at("primaries").size()) ck.error("chemistry.primaries", "names must be strings");
      if (!species.empty() && primaries != species) {
        ck.error("chemistry.primaries", "must list the transported species in the same order (" + join(species) + ")");
      }
    }
    std::set<std::string> reaction_names(primaries.begin(), primaries.end());
    auto check_reactions = [&](const char* key, const char* log_key, bool mineral) {
      if (!c.contains(key)) return;
      if (!c.at(key).is_array()) {
        ck.error(std::string("chemistry.") + key, "must be an array");
        return;
      }
      for (std::size_t i = 0; i < c.at(key).size(); ++i) {
        const Json& r = c.at(key)[i];
        const std::string p = std::string("chemistry.") + key + "[" + std::to_string(i) + "]";
        if (!r.contains("name") || !r.at("name").is_string()) {
          ck.error(p + ".name", "missing");
        } else if (!reaction_names.insert(r.at("name").get<std::string>()).second) {
          ck.error(p + ".name", "duplicate species name '" + r.at("name").get<std::string>() + "'");
        }
        if (!r.contains("stoichiometry") || !r.at("stoichiometry").is_object() || r.at("stoichiometry").empty()) {
          ck.error(p + ".stoichiometry", "must map primaries to coefficients");
        } else {
          ck.named_values(r.at("stoichiometry"), p + ".stoichiometry", primaries, "primary", any_finite, "a number");
        }
        ck.number(r, log_key, p, true, any_finite, "finite");
        if (mineral) ck.number(r, "molar_volume", p, true, positive, "positive");
      }
    };
    check_reactions("complexes", "logK", false);
    check_reactions("minerals", "logKsp", true);
    const std::vector<std::string> minerals = c.contains("minerals") ? names_of(c.at("minerals")) : std::vector<std::string>{};
    ck.number(c, "tolerance", "chemistry", false, positive, "positive");

    // Mineral-forming species must not sorb; the split would not conserve mass.
    if (c.contains("minerals") && c.at("minerals").is_array()) {
      for (const auto& m : c.at("minerals")) {
        if (!m.contains("stoichiometry") || !m.at("stoichiometry").is_object()) continue;
        for (const auto& [name, _] : m.at("stoichiometry").items()) {
          auto it = std::find(species.begin(), species.end(), name);
          if (it == species.end()) continue;
          const auto i = static_cast<std::size_t>(it - species.begin());
          if (i < retardation.size() && retardation[i] != 1.0) {
            ck.error("transport.species[" + std::to_string(i) + "].retardation",
                     "must be 1 for '" + name + "', which takes part in a mineral reaction");
          }
        }
      }
    }

    if (!c.contains("regions") || !c.at("regions").is_array() || c.at("regions").empty()) {
      ck.error("chemistry.regions", "must be a non-empty array");
    } else {
      const auto& regions = c.at("regions");
      bool regions_ok = true;
      for (std::size_t i = 0; i < regions.size(); ++i) {
        const Json& r = regions[i];
        const std::string p = "chemistry.regions[" + std::to_string(i) + "]";
        const std::size_t before = ck.diagnostics.size();
        if (!r.is_object()) {
          ck.error(p, "must be an object");
          regions_ok = false;
          continue;
        }
        if (r.contains("cells")) {
          if (!r.at("cells").is_array()) {
            ck.error(p + ".cells", "must be an array of cell ids");
          } else {
            for (const auto& id : r.at("cells")) {
              if (!id.is_number_integer() || id.get<Index>() < 0 || id.get<Index>() >= n_cells) {
                ck.error(p + ".cells", "cell ids must lie in [0, " + std::to_string(n_cells) + ")");
                break;
              }
            }
          }
        } else if (r.contains("box")) {
          const Json& box = r.at("box");
          for (const char* axis : {"x", "y"}) {
            if (!box.is_object() || !box.contains(axis)) continue;
            const Json& range = box.at(axis);
            if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number() ||
                range[0].get<double>() > range[1].get<double>()) {
              ck.error(p + ".box." + axis, "must be [min, max]");
            }
          }
        }
        if (!r.contains("totals")) {
          ck.error(p + ".totals", "missing");
        } else {
          ck.named_values(r.at("totals"), p + ".totals", primaries, "primary", non_negative, "non-negative");
        }
        if (r.contains("minerals")) {
          ck.named_values(r.at("minerals"), p + ".minerals", minerals, "mineral", non_negative, "non-negative");
        }
        if (ck.diagnostics.size() != before) regions_ok = false;
      }
      if (regions_ok && mesh) {
        for (Index cell = 0; cell < n_cells; ++cell) {
          const bool covered = std::any_of(regions.begin(), regions.end(),
                                           [&](const Json& r) { return region_contains(r, *mesh, cell); });
          if (!covered) {
            ck.error("chemistry.regions", "cell " + std::to_string(cell) + " is not covered by any region");
            break;
          }
        }
      }
    }
  }

  // coupling
  if (const Json* cp = ck.require(doc, "coupling", "")) {
    if (cp->contains("mode")) {
      const Json& mode = cp->at("mode");
      try {
        if (!mode.is_string()) throw InvalidArgument("");
        coupling::splitting_mode_from_string(mode.get<std::string>());
      } catch (const InvalidArgument&) {
        ck.error("coupling.mode", "must be \"SNIA\" or \"SIA\"");
      }
    }
    ck.number(*cp, "dt", "coupling", true, positive, "positive");
    ck.number(*cp, "t_end", "coupling", true, positive, "positive");
    if (cp->contains("dt") && cp->contains("t_end") && cp->at("dt").is_number() && cp->at("t_end").is_number() &&
        cp->at("t_end").get<double>() < cp->at("dt").get<double>()) {
      ck.error("coupling.t_end", "must be at least dt");
    }
    ck.integer(*cp, "sia_max_iters", "coupling", false, 1);
    ck.number(*cp, "sia_tol", "coupling", false, positive, "positive");
    ck.number(*cp, "reflow_threshold", "coupling", false, positive, "positive");
    ck.boolean(*cp, "porosity_feedback", "coupling");
    ck.boolean(*cp, "sia_warm_start", "coupling");
  }

  // waste packages
  if (doc.contains("waste_packages")) {
    const Json& wps = doc.at("waste_packages");
    if (!wps.is_array()) {
      ck.error("waste_packages", "must be an array");
    } else {
      for (std::size_t i = 0; i < wps.size(); ++i) {
        const std::string p = "waste_packages[" + std::to_string(i) + "]";
        const Json& wp = wps[i];
        ck.integer(wp, "cell", p, true, 0);
        if (wp.contains("cell") && wp.at("cell").is_number_integer() && wp.at("cell").get<Index>() >= n_cells &&
            n_cells > 0) {
          ck.error(p + ".cell", "must be below the cell count " + std::to_string(n_cells));
        }
        ck.number(wp, "rate", p, true, non_negative, "non-negative");
        if (!wp.contains("inventory")) {
          ck.error(p + ".inventory", "missing");
        } else {
          ck.named_values(wp.at("inventory"), p + ".inventory", species, "species", non_negative, "non-negative");
        }
      }
    }
  }

  // output
  if (doc.contains("output")) {
    const Json& o = doc.at("output");
    ck.integer(o, "cadence", "output", false, 1);
    if (o.contains("directory") && !o.at("directory").is_string()) ck.error("output.directory", "must be a string");
    if (o.contains("formats")) {
      const Json& formats = o.at("formats");
      if (!formats.is_array()) {
        ck.error("output.formats", "must be an array");
      } else {
        for (std::size_t i = 0; i < formats.size(); ++i) {
          if (!formats[i].is_string() || (formats[i] != "csv" && formats[i] != "mff")) {
            ck.error("output.formats[" + std::to_string(i) + "]", "must be \"csv\" or \"mff\"");
          }
        }
      }
    }
  }

  for (auto& d : ck.diagnostics) {
    if (!d.path.empty() && d.path[0] == '.') d.path.erase(0, 1);
  }
  return ck.diagnostics;
}

std::vector<Diagnostic> validate(const std::filesystem::path& path) { return validate_scenario(load_scenario(path)); }

coupling::SimulationSetup setup_from_scenario(const Json& doc) {
  coupling::SimulationSetup s;
  const Json& m = doc.at("mesh");
  s.nx = m.at("nx").get<Index>();
  s.ny = m.at("ny").get<Index>();
  s.dx = m.at("dx").get<double>();
  s.dy = m.at("dy").get<double>();
  const auto mesh = meshfield::build_structured_mesh(s.nx, s.ny, s.dx, s.dy);
  const Index n = mesh.n_cells();

  s.transport = strip_implementation(doc.at("transport"));
  s.transport_impl = implementation_of(doc.at("transport"), s.transport_impl);
  const auto species = names_of(s.transport.at("species"));

  if (doc.contains("flow")) {
    s.flow = strip_implementation(doc.at("flow"));
    s.flow_impl = implementation_of(doc.at("flow"), s.flow_impl);
  }

  if (doc.contains("chemistry")) {
    const Json& c = doc.at("chemistry");
    s.chemistry_impl = implementation_of(c, s.chemistry_impl);
    Json cc = Json::object();
    for (const char* key : {"primaries", "complexes", "minerals", "tolerance"}) {
      if (c.contains(key)) cc[key] = c.at(key);
    }
    const auto primaries = c.at("primaries").get<std::vector<std::string>>();
    const auto minerals = c.contains("minerals") ? names_of(c.at("minerals")) : std::vector<std::string>{};
    Json totals = Json::array();
    Json mineral_rows = Json::array();
    const auto& regions = c.at("regions");
    for (Index cell = 0; cell < n; ++cell) {
      const Json* region = nullptr;
      for (const auto& r : regions) {
        if (region_contains(r, mesh, cell)) region = &r;
      }
      Json trow = Json::array();
      Json mrow = Json::array();
      for (const auto& p : primaries) trow.push_back(region && region->at("totals").contains(p) ? region->at("totals").at(p).get<double>() : 0.0);
      for (const auto& k : minerals) {
        mrow.push_back(region && region->contains("minerals") && region->at("minerals").contains(k)
                           ? region->at("minerals").at(k).get<double>()
                           : 0.0);
      }
      totals.push_back(std::move(trow));
      mineral_rows.push_back(std::move(mrow));
    }
    cc["initial_totals"] = std::move(totals);
    cc["initial_minerals"] = std::move(mineral_rows);
    s.chemistry = std::move(cc);
  }

  const Json& cp = doc.at("coupling");
  if (cp.contains("mode")) s.coupling.mode = coupling::splitting_mode_from_string(cp.at("mode").get<std::string>());
  s.coupling.dt = cp.at("dt").get<double>();
  s.coupling.t_end = cp.at("t_end").get<double>();
  s.coupling.sia_max_iters = cp.value("sia_max_iters", s.coupling.sia_max_iters);
  s.coupling.sia_tol = cp.value("sia_tol", s.coupling.sia_tol);
  s.coupling.porosity_feedback = cp.value("porosity_feedback", s.coupling.porosity_feedback);
  s.coupling.reflow_threshold = cp.value("reflow_threshold", s.coupling.reflow_threshold);
  s.coupling.sia_warm_start = cp.value("sia_warm_start", s.coupling.sia_warm_start);

  if (doc.contains("waste_packages")) {
    for (const auto& wp : doc.at("waste_packages")) {
      coupling::WastePackageState st;
      st.host_cell = wp.at("cell").get<Index>();
      st.rate = wp.at("rate").get<double>();
      st.inventory = VectorXd::Zero(static_cast<Index>(species.size()));
      for (std::size_t i = 0; i < species.size(); ++i) {
        if (wp.at("inventory").contains(species[i])) {
          st.inventory[static_cast<Index>(i)] = wp.at("inventory").at(species[i]).get<double>();
        }
      }
      s.packages.push_back(std::move(st));
    }
  }

  if (doc.contains("output")) {
    const Json& o = doc.at("output");
    s.output.cadence = o.value("cadence", 1);
    if (o.contains("directory")) s.output.directory = o.at("directory").get<std::string>();
    if (o.contains("formats")) {
      const auto formats = o.at("formats").get<std::vector<std::string>>();
      s.output.csv = contains(formats, "csv");
      s.output.mff = contains(formats, "mff");
    }
  }
  return s;
}

}  // namespace porecouple::cli
