#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "noisyldpc/exit.hpp"

namespace noisyldpc {

/// Environment variable naming the default cache directory.
inline constexpr const char* kCacheEnv = "NOISYLDPC_CACHE_DIR";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Content key of an EXIT curve: kind, degree, sigma2_d, snr_db, rate, grid,
/// trial count and seed.
std::string curve_key(const exit::CurveMeta& meta, const std::vector<double>& grid);

/// On-disk store of EXIT curves, one JSON file per key. Writes go to a
/// temporary file that is renamed into place, so concurrent writers of the
/// same key never leave a torn file behind.
class CurveCache {
 public:
  explicit CurveCache(std::filesystem::path dir);

  /// Directory from an explicit path if non-empty, else from the environment;
  /// nullopt when neither is set.
  static std::optional<CurveCache> open(const std::string& explicit_dir = {});

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<exit::ExitCurve> load(const exit::CurveMeta& meta, const std::vector<double>& grid) const;
  void store(const exit::ExitCurve& curve) const;

  exit::ExitCurve get_or_compute(const exit::CurveMeta& meta, const std::vector<double>& grid,
                                 const std::function<exit::ExitCurve()>& compute);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::filesystem::path path_for(const std::string& key, exit::NodeKind kind) const;

  std::filesystem::path dir_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace noisyldpc
