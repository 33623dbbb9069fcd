#include "iotc/mapper.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace iotc
{

std::vector<std::string> eligible_devices(const ValidatedProgram & vp, const std::string & service)
{
  if (auto it = vp.pins().find(service); it != vp.pins().end() && !it->second.empty()) {
    return it->second;
  }
  std::vector<std::string> out;
  for (const auto & d : vp.model().deploy.devices) {
    if (std::find(kComputePlatforms.begin(), kComputePlatforms.end(), d.platform) != kComputePlatforms.end()) {
      out.push_back(d.name);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Result<MappingTable> map_services(const ValidatedProgram & vp, std::uint64_t seed)
{
  Result<MappingTable> result;
  MappingTable mt;
  mt.seed = seed;
  mt.program_hash = vp.hash();
  mt.fixed = vp.placements();

  Lcg rng(seed);
  for (const auto & [name, kind] : vp.components()) {
    if (!is_service(kind)) continue;
    const auto eligible = eligible_devices(vp, name);
    if (eligible.empty()) {
      result.diagnostics.push_back(
        {Severity::Error, diag::NoEligibleDevice,
         "no device can host service '" + name + "' (pin it or add a JavaSE/NodeJS device)",
         vp.model().span_of(span_key::decl("component", name), "arch.spec")});
      continue;
    }
    mt.assigned[name] = eligible[rng.pick(eligible.size())];
  }
  if (!has_errors(result.diagnostics)) result.value = std::move(mt);
  return result;
}

std::string format_mapping(const MappingTable & mt)
{
  std::string out;
  for (const auto & [service, device] : mt.assigned) out += service + " -> " + device + "\n";
  return out;
}

std::string mapping_to_json(const MappingTable & mt)
{
  nlohmann::ordered_json j;
  j["manifestVersion"] = 1;
  j["programHash"] = mt.program_hash;
  j["seed"] = mt.seed;
  j["fixed"] = mt.fixed;
  j["assigned"] = mt.assigned;
  return j.dump(2) + "\n";
}

MappingTable mapping_from_json(const std::string & text)
{
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("manifestVersion").get<int>() != 1) throw std::runtime_error("unsupported manifestVersion");
    MappingTable mt;
    mt.program_hash = j.at("programHash").get<std::string>();
    mt.seed = j.at("seed").get<std::uint64_t>();
    mt.fixed = j.at("fixed").get<std::map<std::string, std::vector<std::string>>>();
    mt.assigned = j.at("assigned").get<std::map<std::string, std::string>>();
    return mt;
  } catch (const nlohmann::json::exception & e) {
    throw std::runtime_error(std::string("malformed mapping: ") + e.what());
  }
}

}  // namespace iotc
