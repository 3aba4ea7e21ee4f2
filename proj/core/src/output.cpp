#include "discharge/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "discharge/config.hpp"
#include "discharge/error.hpp"

#ifndef DISCHARGE_VERSION
#define DISCHARGE_VERSION "unknown"
#endif

namespace discharge {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string timeseries_csv(std::span<const MonitorRecord> records) {
  std::ostringstream o;
  o << kTimeseriesHeader << '\n';
  for (const MonitorRecord& r : records) {
    o << format_number(r.t) << ',' << format_number(r.min_p) << ',' << format_number(r.min_n)
      << ',' << format_number(r.L2_p) << ',' << format_number(r.L2_n) << ','
      << format_number(r.H1_p) << ',' << format_number(r.H1_n) << ','
      << format_number(r.charge_residual) << ',' << format_number(r.Y) << ','
      << format_number(r.bihari_bound) << ',' << (r.clamp_active ? 1 : 0) << ','
      << (r.source_finite ? 1 : 0) << '\n';
  }
  return o.str();
}

std::string fields_csv(const Mesh& mesh, const State& state) {
  std::ostringstream o;
  o << kFieldsHeader << '\n';
  for (int j = 0; j <= mesh.ny(); ++j) {
    for (int i = 0; i <= mesh.nx(); ++i) {
      const std::size_t k = mesh.index(i, j);
      o << i << ',' << j << ',' << format_number(mesh.x(k)) << ',' << format_number(mesh.y(k))
        << ',' << format_number(state.p[k]) << ',' << format_number(state.n[k]) << ','
        << format_number(state.phi[k]) << '\n';
    }
  }
  return o.str();
}

std::string fields_filename(std::size_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "fields_%06zu.csv", step);
  return buf;
}

std::string convergence_csv(const ConvergenceReport& rep) {
  std::ostringstream o;
  o << "level,nx,ny,dt,err_p,err_n,err_phi,order_p,order_n,order_phi\n";
  auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : kNaN; };
  for (std::size_t l = 0; l < rep.nx.size(); ++l) {
    // Orders are reported on the finer level of each pair.
    const std::size_t pi = l == 0 ? static_cast<std::size_t>(-1) : l - 1;
    o << l << ',' << rep.nx[l] << ',' << rep.ny[l] << ',' << format_number(at(rep.dt, l)) << ','
      << format_number(at(rep.err_p, l)) << ',' << format_number(at(rep.err_n, l)) << ','
      << format_number(at(rep.err_phi, l)) << ',' << format_number(at(rep.order_p, pi)) << ','
      << format_number(at(rep.order_n, pi)) << ',' << format_number(at(rep.order_phi, pi))
      << '\n';
  }
  return o.str();
}

std::string sweep_csv(const SweepReport& rep) {
  std::ostringstream o;
  o << "level,M,ok,clamp_active,diff_p,diff_n,ratio_p,ratio_n,error\n";
  auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : kNaN; };
  for (std::size_t l = 0; l < rep.levels.size(); ++l) {
    const SweepLevel& s = rep.levels[l];
    std::string err = s.error;
    for (char& c : err) {
      if (c == ',' || c == '\n' || c == '\r') c = ' ';
    }
    o << l << ',' << format_number(s.M) << ',' << (s.ok ? 1 : 0) << ',' << (s.clamp_active ? 1 : 0)
      << ',' << format_number(at(rep.diff_p, l)) << ',' << format_number(at(rep.diff_n, l)) << ','
      << format_number(at(rep.ratio_p, l)) << ',' << format_number(at(rep.ratio_n, l)) << ','
      << err << '\n';
  }
  return o.str();
}

std::string tail_csv(const TailReport& rep) {
  std::ostringstream o;
  o << "delta,w,envelope\n";
  for (std::size_t i = 0; i < rep.delta.size(); ++i) {
    o << format_number(rep.delta[i]) << ',' << format_number(rep.w[i]) << ','
      << format_number(rep.a1 * std::exp(-rep.a2 * rep.delta[i])) << '\n';
  }
  return o.str();
}

std::string dependence_csv(const DependenceReport& rep) {
  std::ostringstream o;
  o << "t,D\n";
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    o << format_number(rep.t[i]) << ',' << format_number(rep.D[i]) << '\n';
  }
  return o.str();
}

std::string meta_json(const RunConfig& config, const MetaInfo& info) {
  nlohmann::ordered_json j;
  j["version"] = DISCHARGE_VERSION;
  j["subcommand"] = info.subcommand;
  j["stop_cause"] = info.stop_cause;
  j["exit_code"] = info.exit_code;
  j["wall_time_s"] = info.wall_time_s;
  if (!info.error.empty()) j["error"] = info.error;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  for (const auto& [key, value] : info.results) {
    if (std::isfinite(value)) {
      results[key] = value;
    } else {
      results[key] = format_number(value);
    }
  }
  j["results"] = results;
  j["config"] = serialize_config(config);
  return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace discharge
