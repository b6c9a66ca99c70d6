#include "invasion/io.hpp"

#include "invasion/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace invasion {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <class T>
void put(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& is, const fs::path& path) {
  T value{};
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw IoError("snapshot " + path.string() + ": truncated header");
  }
  return value;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  return os;
}

std::string snapshot_name(std::size_t index, Component c) {
  std::ostringstream name;
  name << "snap_" << std::setw(4) << std::setfill('0') << index << '_' << component_name(c) << ".bin";
  return name.str();
}

std::string indexed_name(const char* prefix, std::size_t index, const char* ext) {
  std::ostringstream name;
  name << prefix << std::setw(4) << std::setfill('0') << index << ext;
  return name.str();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(std::string("config: unknown key '") + key + "' in " + where);
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

FreezePolicy freeze_from_name(const std::string& s) {
  if (s == "previous_stage") return FreezePolicy::PreviousStage;
  if (s == "step_start") return FreezePolicy::StepStart;
  throw ConfigError("config: unknown freeze policy '" + s + "'");
}

FluxUpwinding upwinding_from_name(const std::string& s) {
  if (s == "upwind") return FluxUpwinding::Upwind;
  if (s == "as_printed") return FluxUpwinding::AsPrinted;
  throw ConfigError("config: unknown upwinding '" + s + "'");
}

InitialProfile profile_from_name(const std::string& s) {
  if (s == "exp0") return InitialProfile::Exp0;
  if (s == "exp1") return InitialProfile::Exp1;
  throw ConfigError("config: unknown initial profile '" + s + "'");
}

}  // namespace

void write_snapshot(const fs::path& path, const GridSpec& grid, double t, std::span<const double> values) {
  if (values.size() != grid.n_cells()) throw IoError("snapshot: field size does not match grid");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  put(os, kSnapshotVersion);
  put(os, static_cast<std::uint32_t>(grid.nx()));
  put(os, static_cast<std::uint32_t>(grid.ny()));
  put(os, std::uint32_t{0});
  put(os, grid.a());
  put(os, grid.b());
  put(os, t);
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!os) throw IoError("write failed for " + path.string());
}

SnapshotFile read_snapshot(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
    throw IoError("snapshot " + path.string() + ": bad magic");
  }
  if (get<std::uint32_t>(is, path) != kSnapshotVersion) {
    throw IoError("snapshot " + path.string() + ": unsupported version");
  }
  SnapshotFile s;
  s.nx = get<std::uint32_t>(is, path);
  s.ny = get<std::uint32_t>(is, path);
  (void)get<std::uint32_t>(is, path);
  s.a = get<double>(is, path);
  s.b = get<double>(is, path);
  s.t = get<double>(is, path);
  s.values.resize(static_cast<std::size_t>(s.nx) * s.ny);
  if (!is.read(reinterpret_cast<char*>(s.values.data()),
               static_cast<std::streamsize>(s.values.size() * sizeof(double)))) {
    throw IoError("snapshot " + path.string() + ": truncated payload");
  }
  return s;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  try {
    reject_unknown(j, {"experiment", "initial_profile", "grid", "params", "epsilon", "t_final",
                       "snapshot_times", "tau_sweep", "output", "step_control", "solver", "front"},
                   "top level");
    const ExperimentId id = experiment_from_name(j.value("experiment", std::string("exp1")));
    ExperimentConfig cfg = id == ExperimentId::Exp0 ? experiment0_config() : experiment1_config();
    cfg.experiment = id;
    if (j.contains("initial_profile")) cfg.profile = profile_from_name(j.at("initial_profile").get<std::string>());

    if (j.contains("grid")) {
      const json& g = j.at("grid");
      reject_unknown(g, {"a", "b", "n", "nx", "ny"}, "grid");
      read_opt(g, "a", cfg.a);
      read_opt(g, "b", cfg.b);
      if (g.contains("n")) cfg.nx = cfg.ny = g.at("n").get<std::size_t>();
      read_opt(g, "nx", cfg.nx);
      read_opt(g, "ny", cfg.ny);
    }
    if (j.contains("params")) {
      const json& p = j.at("params");
      reject_unknown(p, {"mu_c", "eta_1", "gamma", "lambda", "D_c", "D_h", "delta_v", "mu_v", "eta_2",
                         "k_1", "k_m1", "q", "M_rate", "chi", "tau"},
                     "params");
      ModelParams& m = cfg.params;
      read_opt(p, "mu_c", m.mu_c);
      read_opt(p, "eta_1", m.eta_1);
      read_opt(p, "gamma", m.gamma);
      read_opt(p, "lambda", m.lambda);
      read_opt(p, "D_c", m.D_c);
      read_opt(p, "D_h", m.D_h);
      read_opt(p, "delta_v", m.delta_v);
      read_opt(p, "mu_v", m.mu_v);
      read_opt(p, "eta_2", m.eta_2);
      read_opt(p, "k_1", m.k_1);
      read_opt(p, "k_m1", m.k_m1);
      read_opt(p, "q", m.q);
      read_opt(p, "M_rate", m.M_rate);
      read_opt(p, "chi", m.chi);
      read_opt(p, "tau", m.tau);
    }
    read_opt(j, "epsilon", cfg.epsilon);
    read_opt(j, "t_final", cfg.t_final);
    read_opt(j, "snapshot_times", cfg.snapshot_times);
    read_opt(j, "tau_sweep", cfg.tau_sweep);
    if (j.contains("output")) {
      const json& o = j.at("output");
      reject_unknown(o, {"dir", "csv"}, "output");
      read_opt(o, "dir", cfg.output_dir);
      read_opt(o, "csv", cfg.csv);
    }
    if (j.contains("step_control")) {
      const json& s = j.at("step_control");
      reject_unknown(s, {"cfl_limit", "kappa_rel_limit", "dt_max", "dt_min", "fixed_dt", "max_retries"},
                     "step_control");
      read_opt(s, "cfl_limit", cfg.step_control.cfl_limit);
      read_opt(s, "kappa_rel_limit", cfg.step_control.kappa_rel_limit);
      read_opt(s, "dt_min", cfg.step_control.dt_min);
      read_opt(s, "max_retries", cfg.max_retries);
      if (s.contains("dt_max") && !s.at("dt_max").is_null()) cfg.dt_max = s.at("dt_max").get<double>();
      if (s.contains("fixed_dt") && !s.at("fixed_dt").is_null()) cfg.fixed_dt = s.at("fixed_dt").get<double>();
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      reject_unknown(s, {"rel_tol", "abs_floor", "max_iter", "jacobi", "freeze", "upwinding"}, "solver");
      read_opt(s, "rel_tol", cfg.stepper.krylov.rel_tol);
      read_opt(s, "abs_floor", cfg.stepper.krylov.abs_floor);
      read_opt(s, "max_iter", cfg.stepper.krylov.max_iter);
      read_opt(s, "jacobi", cfg.stepper.krylov.jacobi);
      if (s.contains("freeze")) cfg.stepper.freeze = freeze_from_name(s.at("freeze").get<std::string>());
      if (s.contains("upwinding")) cfg.stepper.upwinding = upwinding_from_name(s.at("upwinding").get<std::string>());
    }
    if (j.contains("front")) {
      const json& f = j.at("front");
      reject_unknown(f, {"threshold"}, "front");
      read_opt(f, "threshold", cfg.front_threshold);
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& cfg) {
  const ModelParams& m = cfg.params;
  json j;
  j["experiment"] = std::string(experiment_name(cfg.experiment));
  j["initial_profile"] = cfg.profile == InitialProfile::Exp0 ? "exp0" : "exp1";
  j["grid"] = {{"a", cfg.a}, {"b", cfg.b}, {"nx", cfg.nx}, {"ny", cfg.ny}};
  j["params"] = {{"mu_c", m.mu_c},   {"eta_1", m.eta_1}, {"gamma", m.gamma},     {"lambda", m.lambda},
                 {"D_c", m.D_c},     {"D_h", m.D_h},     {"delta_v", m.delta_v}, {"mu_v", m.mu_v},
                 {"eta_2", m.eta_2}, {"k_1", m.k_1},     {"k_m1", m.k_m1},       {"q", m.q},
                 {"M_rate", m.M_rate}, {"chi", m.chi},   {"tau", m.tau}};
  j["epsilon"] = cfg.epsilon;
  j["t_final"] = cfg.t_final;
  j["snapshot_times"] = cfg.snapshot_times;
  j["tau_sweep"] = cfg.tau_sweep;
  j["output"] = {{"dir", cfg.output_dir}, {"csv", cfg.csv}};
  json sc = {{"cfl_limit", cfg.step_control.cfl_limit},
             {"kappa_rel_limit", cfg.step_control.kappa_rel_limit},
             {"dt_min", cfg.step_control.dt_min},
             {"max_retries", cfg.max_retries}};
  sc["dt_max"] = cfg.dt_max ? json(*cfg.dt_max) : json(nullptr);
  sc["fixed_dt"] = cfg.fixed_dt ? json(*cfg.fixed_dt) : json(nullptr);
  j["step_control"] = sc;
  j["solver"] = {{"rel_tol", cfg.stepper.krylov.rel_tol},
                 {"abs_floor", cfg.stepper.krylov.abs_floor},
                 {"max_iter", cfg.stepper.krylov.max_iter},
                 {"jacobi", cfg.stepper.krylov.jacobi},
                 {"freeze", cfg.stepper.freeze == FreezePolicy::PreviousStage ? "previous_stage" : "step_start"},
                 {"upwinding", cfg.stepper.upwinding == FluxUpwinding::Upwind ? "upwind" : "as_printed"}};
  j["front"] = {{"threshold", cfg.front_threshold}};
  return j;
}

void write_state_csv(const fs::path& path, const GridSpec& grid, const StateField& w) {
  std::ofstream os = open_out(path);
  os << "x1,x2,c1,c2,v,y,kappa\n";
  for (std::size_t j = 0; j < grid.ny(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const CellState s = w.cell(i + j * grid.nx());
      os << grid.x1_center(i) << ',' << grid.x2_center(j) << ',' << s.c1 << ',' << s.c2 << ',' << s.v
         << ',' << s.y << ',' << s.kappa << '\n';
    }
  }
}

void write_radial_cut_csv(const fs::path& path, const std::vector<RadialCutRow>& cut) {
  std::ofstream os = open_out(path);
  os << "r,c1,c2,v,y,kappa\n";
  for (const auto& row : cut) {
    os << row.r << ',' << row.state.c1 << ',' << row.state.c2 << ',' << row.state.v << ','
       << row.state.y << ',' << row.state.kappa << '\n';
  }
}

void write_report_csv(const fs::path& path, const RunReport& report) {
  std::ofstream os = open_out(path);
  os << "step,t,dt,bound,krylov_iterations,retries,mass_c1,mass_c2,min_c2\n";
  for (const auto& r : report.steps) {
    os << r.step << ',' << r.t << ',' << r.dt << ',' << bound_name(r.bound) << ',' << r.krylov_iterations
       << ',' << r.retries << ',' << r.mass_c1 << ',' << r.mass_c2 << ',' << r.min_c2 << '\n';
  }
}

void write_eoc_csv(const fs::path& path, const EocStudy& study) {
  std::ofstream os = open_out(path);
  os << "coarse,fine,component,l1_error,l1_eoc,l2_error,l2_eoc\n";
  auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& row : study.rows) {
    for (const auto& e : row.entries) {
      os << row.coarse << ',' << row.fine << ',' << component_name(e.component) << ',' << e.l1 << ','
         << opt(e.eoc_l1) << ',' << e.l2 << ',' << opt(e.eoc_l2) << '\n';
    }
  }
}

void write_sweep_csv(const fs::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream os = open_out(path);
  os << "tau,status,front_position,front_height,mass_c1,mass_c2,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ' ';
    }
    os << r.tau << ',' << (r.ok ? "ok" : "failed") << ',' << r.metrics.front_position << ','
       << r.metrics.front_height << ',' << r.metrics.mass_c1 << ',' << r.metrics.mass_c2 << ',' << err
       << '\n';
  }
}

void write_run(const fs::path& dir, const ExperimentConfig& cfg, const RunResult& run) {
  fs::create_directories(dir);
  {
    std::ofstream os = open_out(dir / "config.json");
    os << config_to_json(cfg).dump(2) << '\n';
  }
  std::ofstream index = open_out(dir / "snapshots.csv");
  index << "index,t\n";
  std::ofstream metrics = open_out(dir / "metrics.csv");
  metrics << "index,t,front_position,front_height,mass_c1,mass_c2\n";
  for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
    const Snapshot& snap = run.snapshots[s];
    index << s << ',' << snap.t << '\n';
    for (Component c : kAllComponents) {
      write_snapshot(dir / snapshot_name(s, c), run.grid, snap.t, snap.state[c]);
    }
    write_radial_cut_csv(dir / indexed_name("cut_", s, ".csv"), radial_cut(run.grid, snap.state));
    if (cfg.csv) write_state_csv(dir / indexed_name("snap_", s, ".csv"), run.grid, snap.state);
    const FrontMetrics m = front_metrics(snap.state, run.grid, cfg.front_threshold);
    metrics << s << ',' << snap.t << ',' << m.front_position << ',' << m.front_height << ','
            << m.mass_c1 << ',' << m.mass_c2 << '\n';
  }
  write_report_csv(dir / "report.csv", run.report);
}

StoredRun read_run(const fs::path& dir) {
  std::ifstream index(dir / "snapshots.csv");
  if (!index) throw IoError("no snapshots.csv in " + dir.string());
  std::string line;
  std::getline(index, line);
  std::vector<Snapshot> snaps;
  std::optional<GridSpec> grid;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    const std::size_t s = std::stoul(line.substr(0, line.find(',')));
    Snapshot snap;
    for (Component c : kAllComponents) {
      SnapshotFile f = read_snapshot(dir / snapshot_name(s, c));
      if (!grid) grid.emplace(f.a, f.b, f.nx, f.ny);
      if (f.nx != grid->nx() || f.ny != grid->ny()) throw IoError("inconsistent grids in " + dir.string());
      if (snap.state.size() == 0) snap.state = StateField(grid->n_cells());
      snap.t = f.t;
      snap.state[c] = std::move(f.values);
    }
    snaps.push_back(std::move(snap));
  }
  if (!grid) throw IoError("run directory " + dir.string() + " holds no snapshots");
  return {*grid, std::move(snaps)};
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> out;
  try {
    if (spec.find(':') != std::string::npos) {
      std::vector<double> parts;
      std::stringstream ss(spec);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
      if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
        throw ConfigError("range '" + spec + "' must be start:stop:step with step > 0");
      }
      const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
      for (std::size_t k = 0; k <= count; ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    } else {
      std::stringstream ss(spec);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse range '" + spec + "'");
  }
  if (out.empty()) throw ConfigError("empty range '" + spec + "'");
  return out;
}

std::vector<std::size_t> parse_levels(const std::string& spec) {
  std::vector<std::size_t> out;
  std::stringstream ss(spec);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse levels '" + spec + "'");
  }
  if (out.empty()) throw ConfigError("empty level list");
  return out;
}

}  // namespace invasion
