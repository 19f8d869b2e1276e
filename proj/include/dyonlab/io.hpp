#pragma once

#include <string>

#include "json.hpp"

#include "dyonlab/fixedpoint.hpp"
#include "dyonlab/verify.hpp"

namespace dyonlab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Profile table with header rho,F,dF,h,dh,J,dJ; 17 significant digits so
/// binary64 round-trips losslessly.
void write_profiles_csv(const std::string& path, const Profile& F,
                        const Profile& h, const Profile& J);

struct LoadedProfiles {
    std::shared_ptr<const RadialGrid> grid;
    Profile F, h, J;
};

/// Parses a profile CSV; malformed input raises ConfigError with a line
/// diagnostic.
LoadedProfiles read_profiles_csv(const std::string& path);

/// FNV-1a hash of the canonical flag string, recorded in manifests.
std::string input_hash(const std::string& canonical);

nlohmann::json manifest_json(const DyonSolution& sol, const SolveOptions& opts,
                             double wall_time_s,
                             const std::string& input_hash_hex);

nlohmann::json report_json(const PropertyReport& rep);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace dyonlab
