#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "hklab/colength.hpp"

namespace hklab::cli {

/// Bumped whenever a change could alter stored colength records.
inline constexpr const char* kArtifactVersion = "hklab-0.1.0";

/// On-disk cache of ColengthRecords, one JSON file per key.
///
/// Writes go to a private temp file that is renamed into place, so readers
/// see either nothing or a complete entry. Unreadable entries count as
/// misses and are reported through the warning hook.
class ResultStore {
 public:
  using Warn = std::function<void(const std::string&)>;

  explicit ResultStore(std::filesystem::path root, Warn warn = {});

  /// SHA-256 hex digest over (p, n, ring, ideal, version).
  static std::string key(std::uint64_t p, int n, const std::string& ring_canonical, const std::string& ideal_canonical,
                         const std::string& version = kArtifactVersion);

  std::optional<ColengthRecord> get(const std::string& key) const;
  void put(const std::string& key, const ColengthRecord& record);

  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::mutex& stripe(const std::string& key);

  std::filesystem::path root_;
  Warn warn_;
  std::array<std::mutex, 16> stripes_;
};

}  // namespace hklab::cli
