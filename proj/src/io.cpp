#include "nld/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nld/errors.hpp"

namespace nld {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  const int d = traj.snapshots.empty() ? 1 : traj.snapshots.front().ensemble.dim();
  out << "t,id,x" << (d == 2 ? ",y" : "") << "\n";
  for (const auto& s : traj.snapshots) {
    const auto t = format_double(s.ensemble.time());
    for (std::size_t i = 0; i < s.ensemble.size(); ++i) {
      out << t << "," << i;
      for (double c : s.ensemble.position(i)) out << "," << format_double(c);
      out << "\n";
    }
  }
}

void write_diagnostics_csv(const fs::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  const int d = traj.snapshots.empty() ? 1 : traj.snapshots.front().ensemble.dim();
  out << "t,energy,m2,com_x" << (d == 2 ? ",com_y" : "") << ",w2_increment\n";
  for (const auto& s : traj.snapshots) {
    const auto& g = s.diag;
    out << format_double(g.t) << "," << format_double(g.energy) << "," << format_double(g.m2) << ","
        << format_double(g.com[0]);
    if (d == 2) out << "," << format_double(g.com[1]);
    out << "," << format_double(g.w2_increment) << "\n";
  }
}

void write_jko_steps_csv(const fs::path& path, const JkoChain& chain) {
  auto out = open_out(path);
  out << "n,t,energy,dw2,entropy,dissipation,m2,grad_norm,iterations\n";
  for (const auto& r : chain.records) {
    out << r.n << "," << format_double(r.t) << "," << format_double(r.energy) << ","
        << format_double(r.dw2) << "," << format_double(r.entropy) << ","
        << format_double(r.dissipation) << "," << format_double(r.m2) << ","
        << format_double(r.grad_norm) << "," << r.iterations << "\n";
  }
}

void write_jko_final_csv(const fs::path& path, const JkoChain& chain) {
  auto out = open_out(path);
  out << "id,x\n";
  const auto& x = chain.states.back().positions;
  for (std::size_t i = 0; i < x.size(); ++i) out << i << "," << format_double(x[i]) << "\n";
}

void write_field_csv(const fs::path& path, const GridField& field) {
  auto out = open_out(path);
  const int d = field.dim();
  out << "x" << (d == 2 ? ",y" : "") << ",value\n";
  for (std::size_t i = 0; i < field.shape()[0]; ++i)
    for (std::size_t j = 0; j < field.shape()[1]; ++j) {
      out << format_double(field.node(0, i));
      if (d == 2) out << "," << format_double(field.node(1, j));
      out << "," << format_double(field(i, j)) << "\n";
    }
  nlohmann::json meta;
  meta["dim"] = d;
  meta["h"] = field.spacing();
  meta["origin"] = std::vector<double>(field.origin().begin(), field.origin().begin() + d);
  meta["shape"] = std::vector<std::size_t>(field.shape().begin(), field.shape().begin() + d);
  fs::path side = path;
  side.replace_extension(".json");
  write_json(side, meta);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

std::vector<ParticleEnsemble> read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
  int d = 0;
  if (line == "t,id,x") d = 1;
  else if (line == "t,id,x,y") d = 2;
  else throw Error(path.string() + ": unexpected header '" + line + "'");

  std::vector<ParticleEnsemble> out;
  std::vector<double> xs;
  double cur_t = 0;
  bool have = false;
  std::size_t lineno = 1;
  auto flush = [&] {
    if (have) out.emplace_back(d, std::move(xs), cur_t);
    xs.clear();
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc()) throw Error(path.string() + ":" + std::to_string(lineno) + ": bad number");
      cols.push_back(v);
    }
    if (cols.size() != static_cast<std::size_t>(2 + d)) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    }
    if (!have || cols[0] != cur_t) {
      flush();
      cur_t = cols[0];
      have = true;
    }
    for (int k = 0; k < d; ++k) xs.push_back(cols[2 + k]);
  }
  flush();
  return out;
}

}  // namespace nld
