#include "noisyldpc/cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace noisyldpc {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string curve_key(const exit::CurveMeta& meta, const std::vector<double>& grid) {
  std::ostringstream os;
  os.precision(17);
  os << exit::to_string(meta.kind) << '|' << meta.degree << '|' << meta.sigma2_d << '|';
  if (meta.snr_db) os << *meta.snr_db << '|' << meta.rate;
  os << '|' << meta.trials << '|' << meta.seed << '|';
  for (double g : grid) os << g << ',';
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

CurveCache::CurveCache(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::optional<CurveCache> CurveCache::open(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return CurveCache(explicit_dir);
  if (const char* env = std::getenv(kCacheEnv); env && *env) return CurveCache(env);
  return std::nullopt;
}

fs::path CurveCache::path_for(const std::string& key, exit::NodeKind kind) const {
  return dir_ / (exit::to_string(kind) + "-" + key + ".json");
}

std::optional<exit::ExitCurve> CurveCache::load(const exit::CurveMeta& meta, const std::vector<double>& grid) const {
  std::ifstream in(path_for(curve_key(meta, grid), meta.kind));
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    exit::ExitCurve c;
    c.meta = meta;
    c.grid = j.at("grid").get<std::vector<double>>();
    c.ie = j.at("ie").get<std::vector<double>>();
    if (c.grid != grid || c.ie.size() != grid.size()) return std::nullopt;
    return c;
  } catch (const json::exception&) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

void CurveCache::store(const exit::ExitCurve& curve) const {
  const auto& m = curve.meta;
  json j;
  j["kind"] = exit::to_string(m.kind);
  j["degree"] = m.degree;
  j["sigma2_d"] = m.sigma2_d;
  j["snr_db"] = m.snr_db ? json(*m.snr_db) : json(nullptr);
  j["rate"] = m.rate;
  j["trials"] = m.trials;
  j["seed"] = m.seed;
  j["grid"] = curve.grid;
  j["ie"] = curve.ie;

  const fs::path target = path_for(curve_key(m, curve.grid), m.kind);
  std::random_device rd;
  const fs::path tmp = target.string() + ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp);
    out.precision(17);
    out << j.dump();
    if (!out) throw std::runtime_error("curve cache: cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

exit::ExitCurve CurveCache::get_or_compute(const exit::CurveMeta& meta, const std::vector<double>& grid,
                                           const std::function<exit::ExitCurve()>& compute) {
  if (auto hit = load(meta, grid)) {
    ++hits_;
    return *hit;
  }
  ++misses_;
  exit::ExitCurve c = compute();
  store(c);
  return c;
}

}  // namespace noisyldpc
