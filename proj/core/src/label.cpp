#include "seadsc/label.hpp"

#include "seadsc/error.hpp"

namespace seadsc {

std::string_view to_string(Label label) {
  return label == Label::changed ? "changed" : "not_changed";
}

Label label_from_string(std::string_view text) {
  if (text == "changed") return Label::changed;
  if (text == "not_changed") return Label::not_changed;
  throw FormatError("unknown label '" + std::string(text) + "', expected changed or not_changed");
}

}  // namespace seadsc
