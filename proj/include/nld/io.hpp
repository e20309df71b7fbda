#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "nld/grid.hpp"
#include "nld/jko.hpp"
#include "nld/particle_flow.hpp"

namespace nld {

// Column orders:
//   trajectory.csv   t,id,x[,y]
//   diagnostics.csv  t,energy,m2,com_x[,com_y],w2_increment
//   jko_steps.csv    n,t,energy,dw2,entropy,dissipation,m2,grad_norm,iterations
//   jko_final.csv    id,x
//   <field>.csv      x[,y],value  with <field>.json holding {dim, origin, h, shape}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_jko_steps_csv(const std::filesystem::path& path, const JkoChain& chain);
void write_jko_final_csv(const std::filesystem::path& path, const JkoChain& chain);
void write_field_csv(const std::filesystem::path& path, const GridField& field);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Reads trajectory.csv back as one ensemble per distinct time, in file order.
std::vector<ParticleEnsemble> read_trajectory_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form, so reruns produce identical files.
std::string format_double(double v);

}  // namespace nld
