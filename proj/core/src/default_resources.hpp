#pragma once

#include <string_view>

namespace phishkd::resources {

extern const std::string_view kEnglishStopWords;
extern const std::string_view kBundledSynonyms;

}  // namespace phishkd::resources
