#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace replivol {

enum class Ambient { TxI, SolidTorus, S3, S2xS1 };

inline const char* to_string(Ambient a) {
  switch (a) {
    case Ambient::TxI: return "TxI";
    case Ambient::SolidTorus: return "SolidTorus";
    case Ambient::S3: return "S3";
    case Ambient::S2xS1: return "S2xS1";
  }
  return "?";
}

inline std::optional<Ambient> parse_ambient(std::string_view s) {
  if (s == "TxI") return Ambient::TxI;
  if (s == "SolidTorus") return Ambient::SolidTorus;
  if (s == "S3") return Ambient::S3;
  if (s == "S2xS1") return Ambient::S2xS1;
  return std::nullopt;
}

}  // namespace replivol
