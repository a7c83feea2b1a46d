#include "claimsim/runner.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>

#include "claimsim/analytics.hpp"
#include "claimsim/config.hpp"
#include "claimsim/error.hpp"

#ifndef CLAIMSIM_VERSION
#define CLAIMSIM_VERSION "0.0.0"
#endif

namespace claimsim {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, path.string() + ": cannot open for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, path.string() + ": write failed");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json error_json(const std::string& kind, const std::string& message) {
  return json{{"error", {{"kind", kind}, {"message", message}}}};
}

template <class F>
json section(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return error_json(std::string(to_string(e.kind())), e.what());
  }
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Analyze: return "analyze";
    case Command::Verify: return "verify";
  }
  return "?";
}

void simulate(RunManifest& m, std::ostream& log) {
  const auto& c = m.config;
  const double t = c.horizons.back();
  RngStream rng(c.master_seed, stream_id(purpose::kPaths, 0, 0));
  const ProcessPath path = c.stationary ? simulate_stationary_path(c.spec, t, c.burnin, rng)
                                        : simulate_path(c.spec, t, rng);
  {
    std::ofstream out(m.out_dir / "path.csv", std::ios::binary);
    if (!out) fail(ErrorKind::Io, (m.out_dir / "path.csv").string() + ": cannot open");
    write_path_csv(path, out);
  }
  m.outputs.push_back("path.csv");
  json rows = json::array();
  for (double h : c.horizons) {
    json r;
    r["t"] = h;
    r["S"] = total_claim(path, h);
    r["N"] = event_count(path, h);
    r["residue"] = residue(path, h);
    r["tau"] = tau(path, h);
    r["clusters_before_tau"] = clusters_before_tau(path, h);
    if (c.stationary) {
      r["eps_star"] = eps_star(path, h);
      r["eps_tilde"] = eps_tilde(path, h);
    }
    rows.push_back(r);
  }
  json summary;
  summary["events"] = path.events.size();
  summary["immigrants"] = path.immigrants.size();
  summary["horizons"] = rows;
  write_json(m.out_dir / "summary.json", summary);
  m.outputs.push_back("summary.json");
  log << "simulate: " << path.events.size() << " events, " << path.immigrants.size()
      << " immigrants\n";
}

int verify(RunManifest& m, bool strict, std::ostream& log) {
  const auto rep = run_experiment(m.config);
  write_json(m.out_dir / "report.json", to_json(rep));
  m.outputs.push_back("report.json");
  if (m.config.keep_raw) {
    std::ofstream out(m.out_dir / "raw.csv", std::ios::binary);
    if (!out) fail(ErrorKind::Io, (m.out_dir / "raw.csv").string() + ": cannot open");
    write_raw_csv(rep, out);
    m.outputs.push_back("raw.csv");
  }
  for (const auto& ch : rep.checks)
    log << (ch.pass ? "PASS " : "FAIL ") << ch.name << " t=" << ch.horizon << " "
        << ch.statistic << " " << ch.relation << " " << ch.threshold
        << (ch.informational ? " (informational)" : "") << "\n";
  log << "verify " << to_string(rep.regime) << ": " << rep.label << ", "
      << (rep.passed() ? "all checks passed" : "some checks failed") << " ("
      << rep.wall_clock_seconds << " s)\n";
  if (rep.passed() || m.config.exploratory) return 0;
  return rep.binding() || strict ? 1 : 0;
}

}  // namespace

std::string tool_version() { return CLAIMSIM_VERSION; }

json to_json(const RunManifest& m) {
  json j;
  j["tool"] = "claimsim";
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["config"] = to_json(m.config);
  j["out_dir"] = m.out_dir.string();
  j["outputs"] = m.outputs;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["exit_status"] = m.exit_status;
  return j;
}

json analyze(const ExperimentConfig& c) {
  const auto& spec = c.spec;
  json j;
  j["model"] = to_json(spec);
  j["moments"] = section([&] { return to_json(compound_moments(spec)); });
  j["tail"] = section([&] { return to_json(tail_prediction(spec)); });
  j["residue_conditions"] = {
      {"clt", section([&] { return to_json(residue_condition_check(spec, ResidueRegime::Clt)); })},
      {"stable12",
       section([&] { return to_json(residue_condition_check(spec, ResidueRegime::Stable12)); })},
      {"stable01",
       section([&] { return to_json(residue_condition_check(spec, ResidueRegime::Stable01)); })},
  };
  if (std::holds_alternative<Hawkes>(spec.mechanism)) {
    j["laplace_fixed_point"] = section([&] {
      json rows = json::array();
      for (double s : {0.5, 1.0, 2.0})
        rows.push_back({{"s", s}, {"value", laplace_fixed_point(spec, s)}});
      return rows;
    });
  }
  j["residue_mean"] = section([&] {
    json rows = json::array();
    for (double t : c.horizons) {
      const auto rm = residue_mean(spec, t);
      if (rm) {
        rows.push_back({{"t", t}, {"value", rm->value}, {"exact", rm->exact}});
      } else {
        rows.push_back({{"t", t}, {"value", nullptr}, {"exact", false}});
      }
    }
    return rows;
  });
  return j;
}

int run(RunManifest& m, Command command, bool strict, std::ostream& log) {
  m.command = command_name(command);
  m.tool_version = tool_version();
  if (m.started.empty()) m.started = utc_now();
  try {
    fs::create_directories(m.out_dir);
  } catch (const fs::filesystem_error& e) {
    log << error_json("io", e.what()).dump() << "\n";
    return 2;
  }
  int status = 0;
  try {
    switch (command) {
      case Command::Simulate: simulate(m, log); break;
      case Command::Analyze:
        write_json(m.out_dir / "analysis.json", analyze(m.config));
        m.outputs.push_back("analysis.json");
        break;
      case Command::Verify: status = verify(m, strict, log); break;
    }
  } catch (const Error& e) {
    const auto err = error_json(std::string(to_string(e.kind())), e.what());
    log << err.dump() << "\n";
    try {
      write_json(m.out_dir / "error.json", err);
      m.outputs.push_back("error.json");
    } catch (const Error&) {
    }
    status = 2;
  } catch (const std::exception& e) {
    const auto err = error_json("internal", e.what());
    log << err.dump() << "\n";
    try {
      write_json(m.out_dir / "error.json", err);
      m.outputs.push_back("error.json");
    } catch (const Error&) {
    }
    status = 2;
  }
  m.exit_status = status;
  m.finished = utc_now();
  try {
    write_json(m.out_dir / "manifest.json", to_json(m));
  } catch (const Error& e) {
    log << error_json("io", e.what()).dump() << "\n";
    return 2;
  }
  return status;
}

int run(const RunOptions& o, std::ostream& log) {
  RunManifest m;
  m.started = utc_now();
  m.config_path = o.config_path;
  m.out_dir = o.out_dir;
  try {
    m.config = parse_config(o.config_path);
    if (o.regime && *o.regime != m.config.regime)
      fail(ErrorKind::Config, "experiment.regime: config names " + to_string(m.config.regime) +
                                  " but " + to_string(*o.regime) + " was requested");
    if (o.threads) m.config.threads = *o.threads;
    if (o.seed) m.config.master_seed = *o.seed;
  } catch (const Error& e) {
    const auto err = error_json(std::string(to_string(e.kind())), e.what());
    log << err.dump() << "\n";
    try {
      fs::create_directories(m.out_dir);
      write_json(m.out_dir / "error.json", err);
    } catch (...) {
    }
    return 2;
  }
  return run(m, o.command, o.strict, log);
}

}  // namespace claimsim
