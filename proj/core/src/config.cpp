#include "discharge/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "discharge/error.hpp"
#include "discharge/model.hpp"

namespace discharge {

const char* to_string(Scheme s) { return s == Scheme::OriginalF ? "original" : "auxiliary"; }
const char* to_string(SourceTreatment s) {
  return s == SourceTreatment::Explicit ? "explicit" : "semi_implicit";
}
const char* to_string(DensityBoundary b) {
  return b == DensityBoundary::Dirichlet ? "dirichlet" : "zero_flux";
}
const char* to_string(MmsKind k) {
  switch (k) {
    case MmsKind::Poisson: return "poisson";
    case MmsKind::Diffusion: return "diffusion";
    case MmsKind::Coupled: return "coupled";
  }
  return "poisson";
}

void TruncationConfig::validate() const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0) || !std::isfinite(levels[i])) {
      throw ValidationError("truncation.levels must be finite and > 0");
    }
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw ValidationError("truncation.levels must be strictly increasing");
    }
  }
}

void MonitorConstants::validate() const {
  if (!(H4 >= 0.0) || !std::isfinite(H4)) throw ValidationError("monitors.H4 must be >= 0");
  if (!(H5 >= 0.0) || !std::isfinite(H5)) throw ValidationError("monitors.H5 must be >= 0");
  if (!(H6 >= 0.0) || !std::isfinite(H6)) throw ValidationError("monitors.H6 must be >= 0");
}

void RunConfig::validate() const {
  domain.validate();
  params.validate();
  velocity.validate();
  step.validate();
  truncation.validate();
  if (monitors.constants) monitors.constants->validate();
  if (monitors.blowup_threshold && !(*monitors.blowup_threshold > 0.0)) {
    throw ValidationError("monitors.blowup_threshold must be > 0");
  }
  if (output.stride < 0) throw ValidationError("output.stride must be >= 0");
  if (output.dir.empty()) throw ValidationError("output.dir must not be empty");
  if (!std::isfinite(initial.amplitude) ||
      initial.amplitude < -std::min(params.theta_p, params.theta_n)) {
    throw ValidationError("initial.amplitude must be >= -min(theta_p, theta_n)");
  }
  if (galerkin.modes_x < 1) throw ValidationError("galerkin.modes_x must be >= 1");
  if (galerkin.modes_y < 1) throw ValidationError("galerkin.modes_y must be >= 1");
  if (galerkin.quad_n < 0) throw ValidationError("galerkin.quad_n must be >= 0");
  if (!(galerkin.dt >= 0.0)) throw ValidationError("galerkin.dt must be >= 0");
  if (verify.levels < 2) throw ValidationError("verify.levels must be >= 2");

  // Step bound from the vacuum field scale |V| / min w; the stepper repeats
  // the check with the actual field.
  if (step.source_enabled) {
    double wmin = std::numeric_limits<double>::infinity();
    const int samples = 64;
    for (int i = 0; i <= samples; ++i) {
      wmin = std::min(wmin, gap_profile(-domain.r + 2.0 * domain.r * i / samples, domain));
    }
    const double e_est = std::abs(params.V) / wmin;
    const double rate = params.mu_minus * e_est * std::max(params.alpha1, params.eta0);
    if (step.dt * rate > 1.0) {
      throw ValidationError("step.dt violates the source step bound dt * mu_minus * |V|/min(w) * "
                            "max(alpha1, eta0) <= 1");
    }
  }
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double to_double(const std::string& v, const std::string& key) {
  std::istringstream in(v);
  in.imbue(std::locale::classic());
  double d = 0.0;
  std::string rest;
  const std::string lv = lower(v);
  if (lv == "inf" || lv == "+inf" || lv == "infinity") return std::numeric_limits<double>::infinity();
  if (!(in >> d) || (in >> rest)) throw ValidationError(key + ": expected a number, got '" + v + "'");
  return d;
}

int to_int(const std::string& v, const std::string& key) {
  const double d = to_double(v, key);
  if (d != std::floor(d) || std::abs(d) > 1e9) {
    throw ValidationError(key + ": expected an integer, got '" + v + "'");
  }
  return static_cast<int>(d);
}

bool to_bool(const std::string& v, const std::string& key) {
  const std::string lv = lower(v);
  if (lv == "true" || lv == "on" || lv == "1" || lv == "yes") return true;
  if (lv == "false" || lv == "off" || lv == "0" || lv == "no") return false;
  throw ValidationError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) throw ValidationError(key + ": empty list entry");
    out.push_back(to_double(t, key));
  }
  return out;
}

struct Profiles {
  std::string kind = "rectangle";
  Rectangle rect;
  TouchDown td;
};

using Setter = std::function<void(RunConfig&, Profiles&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    // domain
    t["domain.r"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.domain.r = to_double(v, k);
    };
    t["domain.profile"] = [](RunConfig&, Profiles& p, const std::string& v, const std::string& k) {
      const std::string lv = lower(v);
      if (lv != "rectangle" && lv != "touchdown") {
        throw ValidationError(k + ": expected rectangle or touchdown, got '" + v + "'");
      }
      p.kind = lv;
    };
    t["domain.h"] = [](RunConfig&, Profiles& p, const std::string& v, const std::string& k) {
      p.rect.h = to_double(v, k);
    };
    t["domain.g0"] = [](RunConfig&, Profiles& p, const std::string& v, const std::string& k) {
      p.td.g0 = to_double(v, k);
    };
    t["domain.c"] = [](RunConfig&, Profiles& p, const std::string& v, const std::string& k) {
      p.td.c = to_double(v, k);
    };
    t["domain.exponent"] = [](RunConfig&, Profiles& p, const std::string& v, const std::string& k) {
      p.td.exponent = to_double(v, k);
    };
    t["domain.nx"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.domain.nx = to_int(v, k);
    };
    t["domain.ny"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.domain.ny = to_int(v, k);
    };
    // params
    const std::pair<const char*, double PhysParams::*> params[] = {
        {"eps0", &PhysParams::eps0},         {"eps_plus", &PhysParams::eps_plus},
        {"eps_minus", &PhysParams::eps_minus}, {"mu_plus", &PhysParams::mu_plus},
        {"mu_minus", &PhysParams::mu_minus}, {"alpha1", &PhysParams::alpha1},
        {"alpha2", &PhysParams::alpha2},     {"eta0", &PhysParams::eta0},
        {"V", &PhysParams::V},               {"theta_p", &PhysParams::theta_p},
        {"theta_n", &PhysParams::theta_n},   {"R_a", &PhysParams::R_a},
        {"R_b", &PhysParams::R_b}};
    for (const auto& [name, member] : params) {
      t[std::string("params.") + name] = [member](RunConfig& c, Profiles&, const std::string& v,
                                                  const std::string& k) {
        c.params.*member = to_double(v, k);
      };
    }
    // velocity
    t["velocity.kind"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      const std::string lv = lower(v);
      if (lv == "zero") {
        c.velocity.kind = VelocitySpec::Kind::Zero;
      } else if (lv == "stream") {
        c.velocity.kind = VelocitySpec::Kind::StreamFunction;
      } else {
        throw ValidationError(k + ": expected zero or stream, got '" + v + "'");
      }
    };
    t["velocity.v0"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.velocity.v0 = to_double(v, k);
    };
    t["velocity.kx"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.velocity.kx = to_int(v, k);
    };
    t["velocity.ky"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.velocity.ky = to_int(v, k);
    };
    // step
    t["step.dt"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.step.dt = to_double(v, k);
    };
    t["step.t_end"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.step.t_end = to_double(v, k);
    };
    t["step.scheme"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      const std::string lv = lower(v);
      if (lv == "original") {
        c.step.scheme = Scheme::OriginalF;
      } else if (lv == "auxiliary") {
        c.step.scheme = Scheme::AuxiliaryM;
      } else {
        throw ValidationError(k + ": expected original or auxiliary, got '" + v + "'");
      }
    };
    t["step.source_treatment"] = [](RunConfig& c, Profiles&, const std::string& v,
                                    const std::string& k) {
      const std::string lv = lower(v);
      if (lv == "explicit") {
        c.step.source_treatment = SourceTreatment::Explicit;
      } else if (lv == "semi_implicit") {
        c.step.source_treatment = SourceTreatment::SemiImplicitSink;
      } else {
        throw ValidationError(k + ": expected explicit or semi_implicit, got '" + v + "'");
      }
    };
    t["step.tol"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.step.poisson_tol = to_double(v, k);
    };
    t["step.source"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.step.source_enabled = to_bool(v, k);
    };
    t["step.density_bc"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      const std::string lv = lower(v);
      if (lv == "dirichlet") {
        c.step.density_bc = DensityBoundary::Dirichlet;
      } else if (lv == "zero_flux") {
        c.step.density_bc = DensityBoundary::ZeroFlux;
      } else {
        throw ValidationError(k + ": expected dirichlet or zero_flux, got '" + v + "'");
      }
    };
    t["initial.amplitude"] = [](RunConfig& c, Profiles&, const std::string& v,
                                const std::string& k) { c.initial.amplitude = to_double(v, k); };
    t["truncation.M"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.step.M = to_double(v, k);
    };
    t["truncation.levels"] = [](RunConfig& c, Profiles&, const std::string& v,
                                const std::string& k) { c.truncation.levels = to_list(v, k); };
    auto constant = [](double MonitorConstants::*member) {
      return [member](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
        if (!c.monitors.constants) c.monitors.constants = MonitorConstants{};
        c.monitors.constants.value().*member = to_double(v, k);
      };
    };
    t["monitors.H4"] = constant(&MonitorConstants::H4);
    t["monitors.H5"] = constant(&MonitorConstants::H5);
    t["monitors.H6"] = constant(&MonitorConstants::H6);
    t["monitors.blowup_threshold"] = [](RunConfig& c, Profiles&, const std::string& v,
                                        const std::string& k) {
      c.monitors.blowup_threshold = to_double(v, k);
    };
    t["output.dir"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string&) {
      c.output.dir = v;
    };
    t["output.stride"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.output.stride = to_int(v, k);
    };
    t["galerkin.modes_x"] = [](RunConfig& c, Profiles&, const std::string& v,
                               const std::string& k) { c.galerkin.modes_x = to_int(v, k); };
    t["galerkin.modes_y"] = [](RunConfig& c, Profiles&, const std::string& v,
                               const std::string& k) { c.galerkin.modes_y = to_int(v, k); };
    t["galerkin.quad_n"] = [](RunConfig& c, Profiles&, const std::string& v,
                              const std::string& k) { c.galerkin.quad_n = to_int(v, k); };
    t["galerkin.dt"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.galerkin.dt = to_double(v, k);
    };
    t["verify.kind"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      const std::string lv = lower(v);
      if (lv == "poisson") {
        c.verify.kind = MmsKind::Poisson;
      } else if (lv == "diffusion") {
        c.verify.kind = MmsKind::Diffusion;
      } else if (lv == "coupled") {
        c.verify.kind = MmsKind::Coupled;
      } else {
        throw ValidationError(k + ": expected poisson, diffusion or coupled, got '" + v + "'");
      }
    };
    t["verify.levels"] = [](RunConfig& c, Profiles&, const std::string& v, const std::string& k) {
      c.verify.levels = to_int(v, k);
    };
    return t;
  }();
  return table;
}

bool known_section(const std::string& s) {
  static const char* names[] = {"domain", "params",   "velocity", "step",     "initial",
                                "truncation", "monitors", "output", "galerkin", "verify"};
  return std::any_of(std::begin(names), std::end(names), [&](const char* n) { return s == n; });
}

std::string at_line(int line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  Profiles profiles;
  std::map<std::string, int> seen;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(at_line(line_no, "unterminated section header"));
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_section(section)) {
        throw ValidationError(at_line(line_no, "unknown section [" + section + "]"));
      }
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ValidationError(at_line(line_no, "expected 'key = value', got '" + line + "'"));
      }
      if (section.empty()) throw ValidationError(at_line(line_no, "key outside of any section"));
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const std::string value = trim(std::string_view(line).substr(eq + 1));
      const std::string path = section + "." + key;
      const auto it = setters().find(path);
      if (it == setters().end()) throw ValidationError(at_line(line_no, "unknown key " + path));
      if (seen.count(path) != 0) throw ValidationError(at_line(line_no, "duplicate key " + path));
      if (value.empty()) throw ValidationError(at_line(line_no, path + ": missing value"));
      seen[path] = line_no;
      try {
        it->second(config, profiles, value, path);
      } catch (const ValidationError& e) {
        throw ValidationError(at_line(line_no, e.what()));
      }
    }
    if (eol == text.size()) break;
  }

  if (profiles.kind == "rectangle") {
    for (const char* k : {"domain.g0", "domain.c", "domain.exponent"}) {
      if (seen.count(k)) throw ValidationError(at_line(seen[k], std::string(k) + " requires profile = touchdown"));
    }
    config.domain.profile = profiles.rect;
  } else {
    if (seen.count("domain.h")) {
      throw ValidationError(at_line(seen["domain.h"], "domain.h requires profile = rectangle"));
    }
    config.domain.profile = profiles.td;
  }
  if (config.monitors.constants) {
    for (const char* k : {"monitors.H4", "monitors.H5", "monitors.H6"}) {
      if (!seen.count(k)) throw ValidationError(std::string(k) + " is required when any of H4, H5, H6 is set");
    }
  }

  try {
    config.validate();
  } catch (const ValidationError& e) {
    // Attach the line of the key the message names, if it was set explicitly.
    const std::string msg = e.what();
    int best = 0;
    std::size_t best_len = 0;
    for (const auto& [path, line] : seen) {
      if (msg.find(path) != std::string::npos && path.size() > best_len) {
        best = line;
        best_len = path.size();
      }
    }
    if (best > 0) throw ValidationError(at_line(best, msg));
    throw;
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[domain]\n";
  o << "r = " << num(c.domain.r) << "\n";
  if (const auto* rect = std::get_if<Rectangle>(&c.domain.profile)) {
    o << "profile = rectangle\n";
    o << "h = " << num(rect->h) << "\n";
  } else {
    const auto& td = std::get<TouchDown>(c.domain.profile);
    o << "profile = touchdown\n";
    o << "g0 = " << num(td.g0) << "\n";
    o << "c = " << num(td.c) << "\n";
    o << "exponent = " << num(td.exponent) << "\n";
  }
  o << "nx = " << c.domain.nx << "\n";
  o << "ny = " << c.domain.ny << "\n";

  const PhysParams& p = c.params;
  o << "\n[params]\n";
  o << "eps0 = " << num(p.eps0) << "\n";
  o << "eps_plus = " << num(p.eps_plus) << "\n";
  o << "eps_minus = " << num(p.eps_minus) << "\n";
  o << "mu_plus = " << num(p.mu_plus) << "\n";
  o << "mu_minus = " << num(p.mu_minus) << "\n";
  o << "alpha1 = " << num(p.alpha1) << "\n";
  o << "alpha2 = " << num(p.alpha2) << "\n";
  o << "eta0 = " << num(p.eta0) << "\n";
  o << "V = " << num(p.V) << "\n";
  o << "theta_p = " << num(p.theta_p) << "\n";
  o << "theta_n = " << num(p.theta_n) << "\n";
  o << "R_a = " << num(p.R_a) << "\n";
  o << "R_b = " << num(p.R_b) << "\n";

  o << "\n[velocity]\n";
  o << "kind = " << (c.velocity.kind == VelocitySpec::Kind::Zero ? "zero" : "stream") << "\n";
  o << "v0 = " << num(c.velocity.v0) << "\n";
  o << "kx = " << c.velocity.kx << "\n";
  o << "ky = " << c.velocity.ky << "\n";

  o << "\n[step]\n";
  o << "dt = " << num(c.step.dt) << "\n";
  o << "t_end = " << num(c.step.t_end) << "\n";
  o << "scheme = " << to_string(c.step.scheme) << "\n";
  o << "source_treatment = " << to_string(c.step.source_treatment) << "\n";
  o << "tol = " << num(c.step.poisson_tol) << "\n";
  o << "source = " << (c.step.source_enabled ? "true" : "false") << "\n";
  o << "density_bc = " << to_string(c.step.density_bc) << "\n";

  o << "\n[initial]\n";
  o << "amplitude = " << num(c.initial.amplitude) << "\n";

  o << "\n[truncation]\n";
  o << "M = " << num(c.step.M) << "\n";
  if (!c.truncation.levels.empty()) {
    o << "levels = ";
    for (std::size_t i = 0; i < c.truncation.levels.size(); ++i) {
      o << (i ? ", " : "") << num(c.truncation.levels[i]);
    }
    o << "\n";
  }

  o << "\n[monitors]\n";
  if (c.monitors.constants) {
    o << "H4 = " << num(c.monitors.constants->H4) << "\n";
    o << "H5 = " << num(c.monitors.constants->H5) << "\n";
    o << "H6 = " << num(c.monitors.constants->H6) << "\n";
  }
  if (c.monitors.blowup_threshold) {
    o << "blowup_threshold = " << num(*c.monitors.blowup_threshold) << "\n";
  }

  o << "\n[output]\n";
  o << "dir = " << c.output.dir << "\n";
  o << "stride = " << c.output.stride << "\n";

  o << "\n[galerkin]\n";
  o << "modes_x = " << c.galerkin.modes_x << "\n";
  o << "modes_y = " << c.galerkin.modes_y << "\n";
  o << "quad_n = " << c.galerkin.quad_n << "\n";
  o << "dt = " << num(c.galerkin.dt) << "\n";

  o << "\n[verify]\n";
  o << "kind = " << to_string(c.verify.kind) << "\n";
  o << "levels = " << c.verify.levels << "\n";
  return o.str();
}

}  // namespace discharge
