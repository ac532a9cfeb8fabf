#include "aami.hpp"

#include "common.hpp"

namespace selfonn {

char aami_letter(AamiClass c) {
  switch (c) {
    case AamiClass::N: return 'N';
    case AamiClass::S: return 'S';
    case AamiClass::V: return 'V';
    case AamiClass::F: return 'F';
    case AamiClass::Q: return 'Q';
  }
  throw Error::config("bad AAMI class value");
}

AamiClass aami_from_index(std::size_t idx) {
  if (idx >= kAamiClasses)
    throw Error::config(strfmt("AAMI class index %zu out of range", idx));
  return static_cast<AamiClass>(idx);
}

std::optional<AamiClass> try_map_to_aami(char symbol) {
  switch (symbol) {
    // normal and bundle branch block beats, escapes
    case 'N':
    case 'L':
    case 'R':
    case 'e':
    case 'j':
      return AamiClass::N;
    // atrial and nodal premature beats
    case 'a':
    case 'A':
    case 'S':
    case 'J':
      return AamiClass::S;
    // ventricular ectopy and flutter waves
    case 'V':
    case 'E':
    case '!':
      return AamiClass::V;
    case 'F':
      return AamiClass::F;
    // paced, fusion-of-paced, unclassifiable
    case '/':
    case 'f':
    case 'Q':
      return AamiClass::Q;
    default:
      return std::nullopt;
  }
}

AamiClass map_to_aami(char symbol) {
  const auto c = try_map_to_aami(symbol);
  if (!c) throw Error::data(strfmt("unknown beat symbol '%c'", symbol));
  return *c;
}

}  // namespace selfonn
