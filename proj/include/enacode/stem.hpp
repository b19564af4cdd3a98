#pragma once

#include <string>
#include <string_view>

namespace enacode {

/// One pass of Porter's original (1980) suffix-stripping algorithm. Words
/// containing anything other than ASCII a-z are returned unchanged.
std::string porter_stem(std::string_view word);

/// Porter applied until the output stops changing, so stem(stem(w)) == stem(w)
/// ("agreed" -> "agre" -> "agr").
std::string stem(std::string_view word);

} // namespace enacode
