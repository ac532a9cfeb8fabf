#pragma once

#include <optional>

#include "types.hpp"

namespace selfonn {

// MIT-BIH beat symbol to AAMI class.  Returns nothing for symbols outside
// the mapping table (non-beat annotations included); callers decide whether
// to skip or fail.
std::optional<AamiClass> try_map_to_aami(char symbol);

// throwing variant: unknown symbol is a data error naming the symbol
AamiClass map_to_aami(char symbol);

}  // namespace selfonn
