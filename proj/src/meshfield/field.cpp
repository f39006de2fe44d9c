#include "porecouple/meshfield/field.hpp"

namespace porecouple::meshfield {

const char* to_string(Support support) {
  return support == Support::Cells ? "CELLS" : "FACES";
}

Support support_from_string(const std::string& text) {
  if (text == "CELLS") return Support::Cells;
  if (text == "FACES") return Support::Faces;
  throw InvalidArgument("unknown field support '" + text + "'");
}

}  // namespace porecouple::meshfield
