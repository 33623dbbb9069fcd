// iotc/mapper.hpp - seeded assignment of computational services to devices
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iotc/analyzer.hpp"
#include "iotc/diagnostics.hpp"

namespace iotc
{

/// 64-bit LCG used by the mapper. Every conforming implementation yields the
/// same sequence for the same seed.
class Lcg
{
public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next()
  {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }
  /// Index in [0, n): high 32 bits of the next state, mod n.
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>((next() >> 32) % n); }
  std::uint64_t state() const { return state_; }

private:
  std::uint64_t state_;
};

struct MappingTable
{
  /// Non-service component -> devices listing it (sorted).
  std::map<std::string, std::vector<std::string>> fixed;
  /// Computational service -> device.
  std::map<std::string, std::string> assigned;
  std::uint64_t seed = 0;
  std::string program_hash;

  bool operator==(const MappingTable &) const = default;
};

/// Platforms that may host unpinned computational services.
inline const std::vector<std::string> kComputePlatforms{"JavaSE", "NodeJS"};

/// Devices eligible for `service`: the devices that pin it, else every
/// compute-capable device. Sorted by name.
std::vector<std::string> eligible_devices(const ValidatedProgram & vp, const std::string & service);

/// Walks services in name order; each (pinned or not) advances the LCG once
/// and takes eligible[pick(|eligible|)].
Result<MappingTable> map_services(const ValidatedProgram & vp, std::uint64_t seed);

/// `service -> device` lines, sorted.
std::string format_mapping(const MappingTable & mt);

std::string mapping_to_json(const MappingTable & mt);
/// Throws std::runtime_error on malformed input.
MappingTable mapping_from_json(const std::string & text);

}  // namespace iotc
