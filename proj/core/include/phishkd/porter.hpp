#pragma once

#include <string>
#include <string_view>

namespace phishkd {

// Porter (1980) suffix-stripping stemmer, original rule set. Input is a
// lowercase ASCII word; words of one or two letters are returned unchanged.
std::string stem(std::string_view word);

}  // namespace phishkd
