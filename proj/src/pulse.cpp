#include "qoc/pulse.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qoc/pauli.hpp"
#include "qoc/rng.hpp"

namespace qoc {

void validate_pulse(const ControlPulse& pulse, std::optional<double> u_max) {
  if (pulse.ux.size() != pulse.uy.size()) {
    throw ConfigError("pulse: ux and uy lengths differ (" +
                      std::to_string(pulse.ux.size()) + " vs " +
                      std::to_string(pulse.uy.size()) + ")");
  }
  if (pulse.slices() < 1) throw ConfigError("pulse: M must be >= 1");
  if (!(pulse.tau > 0.0) || !std::isfinite(pulse.tau)) {
    throw ConfigError("pulse: tau must be positive and finite");
  }
  for (int m = 0; m < pulse.slices(); ++m) {
    const double x = pulse.ux[static_cast<std::size_t>(m)];
    const double y = pulse.uy[static_cast<std::size_t>(m)];
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw ConfigError("pulse: non-finite amplitude at slice " + std::to_string(m + 1));
    }
    if (u_max && (std::abs(x) > *u_max || std::abs(y) > *u_max)) {
      throw ConfigError("pulse: amplitude at slice " + std::to_string(m + 1) +
                        " exceeds the configured bound " + std::to_string(*u_max));
    }
  }
}

long discretize_duration(double t_s, double tau_s) {
  if (!(t_s >= 0.0) || !std::isfinite(t_s)) {
    throw ConfigError("discretize_duration: t must be >= 0");
  }
  if (!(tau_s > 0.0) || !std::isfinite(tau_s)) {
    throw ConfigError("discretize_duration: tau must be > 0");
  }
  return std::lround(t_s / tau_s);  // lround ties go away from zero
}

ControlPulse zeros_pulse(double tau, int m) {
  ControlPulse p;
  p.tau = tau;
  p.ux.assign(static_cast<std::size_t>(m), 0.0);
  p.uy.assign(static_cast<std::size_t>(m), 0.0);
  validate_pulse(p);
  return p;
}

ControlPulse random_pulse(double tau, int m, double lo, double hi,
                          std::uint64_t seed) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("random pulse: need finite lo <= hi, got [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  ControlPulse p;
  p.tau = tau;
  p.ux.resize(static_cast<std::size_t>(m));
  p.uy.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int channel = 0; channel < 2; ++channel) {
      SplitMix rng(derive_seed({seed, kSeedInitPulse,
                                static_cast<std::uint64_t>(channel),
                                static_cast<std::uint64_t>(i)}));
      const double u = lo + (hi - lo) * rng.uniform01();
      (channel == 0 ? p.ux : p.uy)[static_cast<std::size_t>(i)] = u;
    }
  }
  validate_pulse(p);
  return p;
}

Eigen::VectorXd flatten(const ControlPulse& pulse) {
  const int m = pulse.slices();
  Eigen::VectorXd u(2 * m);
  for (int i = 0; i < m; ++i) {
    u[i] = pulse.ux[static_cast<std::size_t>(i)];
    u[m + i] = pulse.uy[static_cast<std::size_t>(i)];
  }
  return u;
}

ControlPulse with_amplitudes(const ControlPulse& like, const Eigen::VectorXd& u) {
  const int m = like.slices();
  if (u.size() != 2 * m) {
    throw std::invalid_argument("with_amplitudes: expected a vector of length " +
                                std::to_string(2 * m) + ", got " +
                                std::to_string(u.size()));
  }
  ControlPulse p = like;
  for (int i = 0; i < m; ++i) {
    p.ux[static_cast<std::size_t>(i)] = u[i];
    p.uy[static_cast<std::size_t>(i)] = u[m + i];
  }
  return p;
}

std::string pulse_sidecar_path(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".json";
  }
  return csv_path + ".json";
}

void write_pulse_csv(const std::string& csv_path, const ControlPulse& pulse) {
  validate_pulse(pulse);
  std::ofstream out(csv_path);
  if (!out) throw ConfigError("cannot write pulse file: " + csv_path);
  out << "m,ux,uy\n";
  char row[96];
  for (int i = 0; i < pulse.slices(); ++i) {
    std::snprintf(row, sizeof row, "%d,%.17g,%.17g\n", i + 1,
                  pulse.ux[static_cast<std::size_t>(i)],
                  pulse.uy[static_cast<std::size_t>(i)]);
    out << row;
  }
  if (!out) throw ConfigError("failed writing pulse file: " + csv_path);

  nlohmann::json sidecar = {{"tau_s", pulse.tau}, {"M", pulse.slices()}};
  std::ofstream side(pulse_sidecar_path(csv_path));
  if (!side) throw ConfigError("cannot write pulse sidecar: " + pulse_sidecar_path(csv_path));
  side << sidecar.dump(2) << "\n";
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double_field(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse number \"" + text + "\"");
  }
  if (used != text.size()) {
    throw ConfigError(where + ": trailing characters in \"" + text + "\"");
  }
  return v;
}

}  // namespace

ControlPulse read_pulse_csv(const std::string& csv_path,
                            std::optional<double> tau_override) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open pulse file: " + csv_path);
  std::string line;
  if (!std::getline(in, line) || strip(line) != "m,ux,uy") {
    throw ConfigError("pulse file " + csv_path + ": expected header \"m,ux,uy\"");
  }
  ControlPulse p;
  int expect_m = 1;
  while (std::getline(in, line)) {
    const std::string row = strip(line);
    if (row.empty()) continue;
    std::stringstream ss(row);
    std::string mf, xf, yf;
    if (!std::getline(ss, mf, ',') || !std::getline(ss, xf, ',') ||
        !std::getline(ss, yf)) {
      throw ConfigError("pulse file " + csv_path + ": malformed row \"" + row + "\"");
    }
    const std::string where = csv_path + " row " + std::to_string(expect_m);
    const double mval = parse_double_field(strip(mf), where + " (m)");
    if (mval != static_cast<double>(expect_m)) {
      throw ConfigError(where + ": expected m=" + std::to_string(expect_m));
    }
    p.ux.push_back(parse_double_field(strip(xf), where + " (ux)"));
    p.uy.push_back(parse_double_field(strip(yf), where + " (uy)"));
    ++expect_m;
  }
  if (p.ux.empty()) throw ConfigError("pulse file " + csv_path + ": no slices");

  if (tau_override) {
    p.tau = *tau_override;
  } else {
    const std::string side_path = pulse_sidecar_path(csv_path);
    std::ifstream side(side_path);
    if (!side) {
      throw ConfigError("pulse file " + csv_path +
                        ": tau not given and sidecar missing (" + side_path + ")");
    }
    nlohmann::json doc;
    try {
      side >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("pulse sidecar " + side_path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("tau_s") || !doc["tau_s"].is_number()) {
      throw ConfigError("pulse sidecar " + side_path + ": missing numeric \"tau_s\"");
    }
    p.tau = doc["tau_s"].get<double>();
    if (doc.contains("M")) {
      if (!doc["M"].is_number_integer() || doc["M"].get<long>() != p.slices()) {
        throw ConfigError("pulse sidecar " + side_path + ": M does not match the " +
                          std::to_string(p.slices()) + " CSV rows");
      }
    }
  }
  validate_pulse(p);
  return p;
}

}  // namespace qoc
