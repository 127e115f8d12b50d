#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "expanderlab/analysis.hpp"
#include "expanderlab/core.hpp"
#include "expanderlab/entropy.hpp"
#include "expanderlab/experiments.hpp"

namespace expanderlab {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// `r,u,du` rows at %.17g, preceded by one `#` line carrying metadata.
void write_profile_csv(const Profile& p, const fs::path& path);
Profile read_profile_csv(const fs::path& path);

json to_json(const ConeSpec& cone);
json to_json(const Profile& p);
Profile profile_from_json(const json& j);

json to_json(const CheckReport& r);
CheckReport check_report_from_json(const json& j);
json to_json(const ShootingResult& r, int n, double tau, double decay_M);
json to_json(const EntropyReport& r);
json to_json(const Dossier& d);

void write_sweep_csv(const SweepTable& t, const fs::path& path);
SweepTable read_sweep_csv(const fs::path& path);
json to_json(const SweepTable& t);
SweepTable sweep_from_json(const json& j);

/// Long format `t,r,u`.
void write_flow_csv(const std::vector<FlowState>& states, const fs::path& path);

/// `r,W,kappa_m,kappa_p,H,A2,ratio`.
void write_curvature_csv(const SurfaceSample& s, const fs::path& path);

void write_json(const json& j, const fs::path& path);
json read_json(const fs::path& path);

/// Whitespace-separated columns for gnuplot. kind: profile, sweep, flow or
/// curvature.
void emit_plot_data(const fs::path& artifact, std::string_view kind, const fs::path& out);

}  // namespace expanderlab
