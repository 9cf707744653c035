#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hklab/colength.hpp"
#include "hklab/graded_hypersurface.hpp"
#include "hklab/hk_formulas.hpp"

namespace hklab {

/// Named ring/ideal pairs used by the experiments, all with the maximal ideal.
struct Family {
  enum class Kind { fermat_quartic, chang_quartic, diagonal, buchweitz_chen };

  Kind kind = Kind::fermat_quartic;
  std::vector<int> exponents;  // diagonal exponents of the defining relation

  HypersurfaceRing ring(std::uint64_t p) const { return HypersurfaceRing::diagonal(p, exponents); }
  IdealSpec ideal(const HypersurfaceRing& r) const { return IdealSpec::maximal(r); }

  std::optional<ReferenceFamily> reference() const {
    if (kind == Kind::fermat_quartic) return ReferenceFamily::fermat_quartic;
    if (kind == Kind::chang_quartic) return ReferenceFamily::chang_quartic;
    return std::nullopt;
  }

  bool is_plane_curve() const { return exponents.size() == 3; }

  std::string name() const {
    switch (kind) {
      case Kind::fermat_quartic: return "fermat-quartic";
      case Kind::chang_quartic: return "chang-quartic";
      case Kind::buchweitz_chen: return "buchweitz-chen";
      case Kind::diagonal: break;
    }
    std::string out = "diagonal:";
    for (std::size_t i = 0; i < exponents.size(); ++i) out += (i ? "," : "") + std::to_string(exponents[i]);
    return out;
  }

  static Family fermat_quartic() { return {Kind::fermat_quartic, {4, 4, 4}}; }
  static Family chang_quartic() { return {Kind::chang_quartic, {4, 4, 4, 4}}; }
  static Family buchweitz_chen() { return {Kind::buchweitz_chen, {1, 1, 1}}; }
  static Family diagonal(std::vector<int> d) { return {Kind::diagonal, std::move(d)}; }

  /// fermat-quartic | chang-quartic | buchweitz-chen | diagonal:d1,..,ds
  static Family parse(std::string_view text) {
    if (text == "fermat-quartic") return fermat_quartic();
    if (text == "chang-quartic") return chang_quartic();
    if (text == "buchweitz-chen") return buchweitz_chen();
    if (text.starts_with("diagonal:")) {
      std::vector<int> d;
      std::string list(text.substr(9));
      std::size_t start = 0;
      while (start <= list.size()) {
        auto comma = list.find(',', start);
        std::string piece = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
          std::size_t used = 0;
          d.push_back(std::stoi(piece, &used));
          if (used != piece.size()) throw ParseError("");
        } catch (const std::exception&) {
          throw ParseError("bad diagonal exponent '" + piece + "'");
        }
        if (d.back() < 1) throw ParseError("diagonal exponents must be positive");
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (d.size() < 2) throw ParseError("diagonal family needs at least two exponents");
      return diagonal(std::move(d));
    }
    throw ParseError("unknown family '" + std::string(text) + "'");
  }
};

}  // namespace hklab
