#include "terracelab/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace terracelab {

using json = nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out.good()) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {
constexpr const char* kEol = "\r\n";
}

std::string field_to_csv(const Field& f) {
  std::ostringstream out;
  out << "x,u" << kEol;
  for (int i = 0; i < f.grid.n_x; ++i)
    out << format_double(f.grid.x(i)) << "," << format_double(f.values[i])
        << kEol;
  return out.str();
}

std::string level_track_to_csv(const LevelTrack& t, double T) {
  std::ostringstream out;
  out << "k,t,a_k" << kEol;
  for (size_t i = 0; i < t.k.size(); ++i)
    out << t.k[i] << "," << format_double(t.k[i] * T) << ","
        << format_double(t.a_k[i]) << kEol;
  return out.str();
}

std::string zero_number_to_csv(const ZeroNumberSeries& z) {
  std::ostringstream out;
  out << "t,Z" << kEol;
  for (size_t i = 0; i < z.t.size(); ++i)
    out << format_double(z.t[i]) << "," << z.z[i] << kEol;
  return out.str();
}

std::string shift_track_to_csv(const ShiftTrack& s) {
  std::ostringstream out;
  out << "t,eta" << kEol;
  for (size_t i = 0; i < s.t.size(); ++i)
    out << format_double(s.t[i]) << "," << format_double(s.eta[i]) << kEol;
  return out.str();
}

std::string level_track_to_json(const LevelTrack& t, double T) {
  json j;
  j["alpha"] = t.alpha;
  j["period_T"] = T;
  j["k"] = t.k;
  j["a_k"] = t.a_k;
  j["truncated"] = t.truncated;
  return j.dump();
}

std::string limit_profile_to_json(const LimitProfile& lp) {
  json j;
  j["anchor_alpha"] = lp.anchor_alpha;
  j["convergence_defect"] = lp.convergence_defect;
  j["variation"] = lp.variation;
  j["verdict"] = lp.verdict == ProfileVerdict::wave        ? "wave"
                 : lp.verdict == ProfileVerdict::platform ? "platform"
                                                          : "undecided";
  j["x"] = json::array();
  j["u"] = json::array();
  for (int i = 0; i < lp.profile.grid.n_x; ++i) {
    j["x"].push_back(lp.profile.grid.x(i));
    j["u"].push_back(lp.profile.values[i]);
  }
  return j.dump();
}

std::string terrace_to_json(const Terrace& t,
                            const std::vector<std::string>& profile_refs) {
  json j;
  j["platforms"] = json::array();
  for (const auto& p : t.platforms) j["platforms"].push_back(json::parse(p.to_json()));
  j["waves"] = json::array();
  for (int i = 0; i < t.n_waves(); ++i) {
    json w;
    w["c"] = t.waves[i].c;
    w["stderr_c"] = t.waves[i].stderr_c;
    w["anchor"] = t.waves[i].anchor_level;
    w["profile_ref"] =
        i < static_cast<int>(profile_refs.size()) ? profile_refs[i] : "";
    j["waves"].push_back(w);
  }
  j["log"] = t.log;
  return j.dump(2);
}

std::vector<std::string> write_trajectory_csv(const Trajectory& traj,
                                              const std::filesystem::path& dir,
                                              const std::string& stem) {
  std::vector<std::string> files;
  json index;
  index["n_snapshots"] = traj.snapshots.size();
  index["dt"] = traj.dt;
  index["period_T"] = traj.spec.period();
  index["snapshots"] = json::array();
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%05zu.csv", stem.c_str(), i);
    write_text_file(dir / name, field_to_csv(traj.snapshots[i]));
    files.push_back(name);
    json meta;
    meta["file"] = name;
    meta["t"] = traj.snapshots[i].t;
    index["snapshots"].push_back(meta);
  }
  index["period_snapshot_indices"] = traj.period_snapshot_indices;
  const std::string index_name = stem + "_index.json";
  write_text_file(dir / index_name, index.dump(2));
  files.push_back(index_name);
  return files;
}

namespace {

void put_u64(std::ofstream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ofstream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

uint64_t get_u64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::ifstream& in) {
  const uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_trajectory_columnar(const Trajectory& traj,
                               const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open: " + path.string());
  out.write("TRL1", 4);
  const Grid& g = traj.snapshots.front().grid;
  put_u64(out, static_cast<uint64_t>(g.n_x));
  put_u64(out, traj.snapshots.size());
  put_f64(out, g.xmin);
  put_f64(out, g.dx());
  for (const Field& f : traj.snapshots) {
    put_f64(out, f.t);
    for (double v : f.values) put_f64(out, v);
  }
}

Trajectory read_trajectory_columnar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (std::string(magic, 4) != "TRL1")
    throw std::runtime_error("bad columnar magic in " + path.string());
  const uint64_t n_x = get_u64(in);
  const uint64_t n_snap = get_u64(in);
  const double xmin = get_f64(in);
  const double dx = get_f64(in);
  Grid g(xmin, xmin + dx * (n_x - 1), static_cast<int>(n_x));
  Trajectory traj;
  for (uint64_t s = 0; s < n_snap; ++s) {
    Field f(g, get_f64(in));
    for (uint64_t i = 0; i < n_x; ++i) f.values[i] = get_f64(in);
    traj.snapshots.push_back(std::move(f));
  }
  if (!in.good()) throw std::runtime_error("truncated columnar file " + path.string());
  return traj;
}

void write_wave_profile_columnar(const WaveProfile& w,
                                 const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open: " + path.string());
  out.write("TRL1", 4);
  put_u64(out, static_cast<uint64_t>(w.n_xi));
  put_u64(out, w.rows.size());
  put_f64(out, w.xi0);
  put_f64(out, w.dxi);
  for (size_t r = 0; r < w.rows.size(); ++r) {
    put_f64(out, w.taus[r]);
    for (double v : w.rows[r]) put_f64(out, v);
  }
}

}  // namespace terracelab
