#include "cylflow/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cylflow {

std::string format_real(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw solver_error("io: cannot open \"" + tmp.string() + "\" for writing");
    out << content;
    out.flush();
    if (!out) throw solver_error("io: short write to \"" + tmp.string() + "\"");
  }
  fs::rename(tmp, target);
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t,E,sup_grad,sup_ut,c_est,max_w,max_phi,bc_residual\n";
  for (const DiagnosticsRecord& r : traj.records) {
    out << format_real(r.t) << ',' << format_real(r.E) << ',' << format_real(r.sup_grad)
        << ',' << format_real(r.sup_ut) << ',' << format_real(r.c_inst) << ','
        << format_real(r.max_w) << ',' << format_real(r.max_phi) << ','
        << format_real(r.bc_residual) << '\n';
  }
  return out.str();
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  atomic_write(path, trajectory_csv(traj));
}

std::string grid_dump(const DomainGeometry& geom,
                      const std::map<std::string, Vector>& fields) {
  for (const auto& [name, f] : fields) {
    if (f.size() != geom.n_nodes)
      throw solver_error("io: field \"" + name + "\" does not match the node count");
  }
  // Boundary data per node (zero off the boundary), for the dump only.
  Vector bflag = Vector::Zero(geom.n_nodes);
  Eigen::Matrix<Real, Eigen::Dynamic, 2> normal =
      Eigen::Matrix<Real, Eigen::Dynamic, 2>::Zero(geom.n_nodes, 2);
  Vector curv = Vector::Zero(geom.n_nodes);
  for (const BoundaryNode& b : geom.boundary) {
    bflag[b.node] = 1;
    normal(b.node, 0) = b.inner_normal.x();
    normal(b.node, 1) = b.inner_normal.y();
    curv[b.node] = b.curvature;
  }

  std::ostringstream out;
  out << "# node i j x y dist boundary normal_x normal_y curvature";
  for (const auto& [name, f] : fields) out << ' ' << name;
  out << '\n';
  auto emit = [&](int node, int i, int j) {
    out << node << ' ' << i << ' ' << j << ' ' << format_real(geom.coords(node, 0))
        << ' ' << format_real(geom.coords(node, 1)) << ' '
        << format_real(geom.dist[node]) << ' ' << static_cast<int>(bflag[node]) << ' '
        << format_real(normal(node, 0)) << ' ' << format_real(normal(node, 1)) << ' '
        << format_real(curv[node]);
    for (const auto& [name, f] : fields) out << ' ' << format_real(f[node]);
    out << '\n';
  };
  if (geom.dim == 1) {
    for (int i = 0; i < geom.nx; ++i) emit(i, i, 0);
  } else {
    emit(0, 0, 0);
    for (int i = 1; i < geom.n_xi; ++i)
      for (int j = 0; j < geom.n_eta; ++j) emit(geom.node_index(i, j), i, j);
  }
  return out.str();
}

void write_grid_dump(const std::string& path, const DomainGeometry& geom,
                     const std::map<std::string, Vector>& fields) {
  atomic_write(path, grid_dump(geom, fields));
}

void write_json(const std::string& path, const Json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

std::string prepare_output(const ScenarioConfig& cfg, const std::string& override_dir) {
  namespace fs = std::filesystem;
  fs::path dir;
  if (!override_dir.empty()) {
    dir = override_dir;
  } else {
    dir = cfg.output.directory;
    if (const char* root = std::getenv("CYLFLOW_OUTPUT_ROOT"); root && *root)
      dir = fs::path(root) / dir;
  }
  fs::create_directories(dir);
  return (dir / cfg.output.prefix).string();
}

}  // namespace cylflow
