#pragma once

#include <string>
#include <vector>

#include "varicart/common.hpp"

namespace varicart::testing {

// Random tweet built from pieces that exercise every rule.
inline std::string random_tweet(SplitMix64& rng) {
  static const std::vector<std::string> pieces = {
      "hola", "Holaaaa", "jajajaja", "JAJAJ", "jejeje", "jiji", "ja", "jaaaa", "jjjj", "aaaa", "buenooooo",
      "@pepe", "@Maria_22", "@", "a@b.com", "#SOSCuba", "#CubaIslaBella", "#cuba", "#", "#2021Libre",
      "#abc_DEF", "#!!", "http://t.co/xyz", "https://www.cubadebate.cu/a?b=1", "www.granma.cu", "htttp://x.y",
      "wwww.foo", "\xF0\x9F\x98\x82", "\xF0\x9F\x98\x82\xF0\x9F\x98\x82", "\xE2\x9D\xA4\xEF\xB8\x8F",
      "\xF0\x9F\x87\xA8\xF0\x9F\x87\xBA", "\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD", "\xF0\x9F\xA6\x84", "\n", "\r\n",
      "  ", "\t", ".", "!!!", "¿qué?", "ñññ", "ÁÁÁá", "Cuba", "libertad", "123", "1111", "x", "@usuario",
      "url", "emoji", "jaja", "SOS"};
  const int n = 1 + static_cast<int>(rng.next_below(14));
  std::string out;
  for (int i = 0; i < n; ++i) {
    out += pieces[rng.next_below(pieces.size())];
    if (rng.next_below(3) != 0) out += ' ';
  }
  return out;
}

}  // namespace varicart::testing
