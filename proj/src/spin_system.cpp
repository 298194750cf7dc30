#include "qoc/spin_system.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>

namespace qoc {

namespace {

void check_n(int n) {
  if (n < 1) throw ConfigError("spin system: n must be >= 1, got " + std::to_string(n));
  if (n > kDimCap) {
    throw ConfigError("spin system: n=" + std::to_string(n) +
                      " exceeds the dense-operator cap of " + std::to_string(kDimCap));
  }
}

}  // namespace

SpinSystem make_term_system(int n, std::vector<LocalTerm> terms, int locality_bound) {
  SpinSystem sys;
  sys.n = n;
  sys.terms = std::move(terms);
  sys.locality_bound = locality_bound;
  validate_system(sys);
  return sys;
}

SpinSystem make_nmr_system(int n, std::vector<double> offsets_hz,
                           std::vector<std::vector<double>> couplings_hz) {
  SpinSystem sys;
  sys.n = n;
  sys.nmr = NmrParams{std::move(offsets_hz), std::move(couplings_hz)};
  validate_system(sys);
  return sys;
}

void validate_system(const SpinSystem& sys) {
  check_n(sys.n);
  const bool has_terms = !sys.terms.empty();
  const bool has_nmr = sys.nmr.has_value();
  if (has_terms == has_nmr) {
    throw ConfigError("spin system: exactly one of terms/nmr must be populated");
  }
  if (has_terms) {
    for (std::size_t l = 0; l < sys.terms.size(); ++l) {
      const LocalTerm& t = sys.terms[l];
      const std::string where = "terms[" + std::to_string(l) + "]";
      if (!std::isfinite(t.coeff)) {
        throw ConfigError(where + ".coeff is not finite");
      }
      if (t.pauli.n() != sys.n) {
        throw ConfigError(where + ".pauli \"" + t.pauli.letters + "\": length " +
                          std::to_string(t.pauli.n()) + " does not match n=" +
                          std::to_string(sys.n));
      }
      if (t.pauli.weight() > sys.locality_bound) {
        throw ConfigError(where + ".pauli \"" + t.pauli.letters + "\": weight " +
                          std::to_string(t.pauli.weight()) +
                          " exceeds the locality bound of " +
                          std::to_string(sys.locality_bound));
      }
    }
  } else {
    const NmrParams& nmr = *sys.nmr;
    const std::size_t un = static_cast<std::size_t>(sys.n);
    if (nmr.offsets_hz.size() != un) {
      throw ConfigError("nmr.offsets_hz: expected " + std::to_string(sys.n) +
                        " entries, got " + std::to_string(nmr.offsets_hz.size()));
    }
    for (std::size_t k = 0; k < un; ++k) {
      if (!std::isfinite(nmr.offsets_hz[k])) {
        throw ConfigError("nmr.offsets_hz[" + std::to_string(k) + "] is not finite");
      }
    }
    if (nmr.couplings_hz.size() != un) {
      throw ConfigError("nmr.couplings_hz: expected " + std::to_string(sys.n) +
                        " rows, got " + std::to_string(nmr.couplings_hz.size()));
    }
    for (std::size_t k = 0; k < un; ++k) {
      if (nmr.couplings_hz[k].size() != un) {
        throw ConfigError("nmr.couplings_hz[" + std::to_string(k) + "]: expected " +
                          std::to_string(sys.n) + " entries, got " +
                          std::to_string(nmr.couplings_hz[k].size()));
      }
      for (std::size_t j = 0; j < un; ++j) {
        if (!std::isfinite(nmr.couplings_hz[k][j])) {
          throw ConfigError("nmr.couplings_hz[" + std::to_string(k) + "][" +
                            std::to_string(j) + "] is not finite");
        }
      }
      if (nmr.couplings_hz[k][k] != 0.0) {
        throw ConfigError("nmr.couplings_hz[" + std::to_string(k) + "][" +
                          std::to_string(k) + "]: diagonal must be zero");
      }
      for (std::size_t j = k + 1; j < un; ++j) {
        if (std::abs(nmr.couplings_hz[k][j] - nmr.couplings_hz[j][k]) > 1e-12) {
          throw ConfigError("nmr.couplings_hz[" + std::to_string(k) + "][" +
                            std::to_string(j) + "] vs [" + std::to_string(j) + "][" +
                            std::to_string(k) + "]: asymmetric couplings");
        }
      }
    }
  }
}

SpinSystem load_system(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("system config: expected a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw ConfigError("system config: missing integer field \"n\"");
  }
  const int n = doc["n"].get<int>();
  const bool has_terms = doc.contains("terms");
  const bool has_nmr = doc.contains("nmr");
  if (has_terms == has_nmr) {
    throw ConfigError("system config: exactly one of \"nmr\"/\"terms\" must be present");
  }
  if (has_nmr) {
    const auto& nmr = doc["nmr"];
    if (!nmr.is_object() || !nmr.contains("offsets_hz") || !nmr.contains("couplings_hz")) {
      throw ConfigError("system config: nmr must hold \"offsets_hz\" and \"couplings_hz\"");
    }
    std::vector<double> offsets;
    std::vector<std::vector<double>> couplings;
    try {
      offsets = nmr["offsets_hz"].get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("system config: nmr.offsets_hz must be an array of numbers");
    }
    try {
      couplings = nmr["couplings_hz"].get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("system config: nmr.couplings_hz must be an array of number arrays");
    }
    return make_nmr_system(n, std::move(offsets), std::move(couplings));
  }
  const auto& terms = doc["terms"];
  if (!terms.is_array() || terms.empty()) {
    throw ConfigError("system config: terms must be a non-empty array");
  }
  std::vector<LocalTerm> parsed;
  parsed.reserve(terms.size());
  for (std::size_t l = 0; l < terms.size(); ++l) {
    const auto& t = terms[l];
    const std::string where = "system config: terms[" + std::to_string(l) + "]";
    if (!t.is_object() || !t.contains("coeff") || !t.contains("pauli")) {
      throw ConfigError(where + ": expected {\"coeff\", \"pauli\"}");
    }
    if (!t["coeff"].is_number() || !t["pauli"].is_string()) {
      throw ConfigError(where + ": coeff must be a number and pauli a string");
    }
    parsed.push_back(LocalTerm{t["coeff"].get<double>(),
                               parse_label(t["pauli"].get<std::string>(), n)});
  }
  return make_term_system(n, std::move(parsed));
}

SpinSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open system file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("system file " + path + ": " + e.what());
  }
  return load_system(doc);
}

Mat build_drift(const SpinSystem& sys) {
  validate_system(sys);
  const std::int64_t dim = std::int64_t{1} << sys.n;
  if (sys.nmr) {
    // Both pieces are diagonal in the computational basis; fill the diagonal
    // from the sigma_z eigenvalues s_k = +1 (bit 0) / -1 (bit 1).
    const NmrParams& nmr = *sys.nmr;
    Mat h = Mat::Zero(dim, dim);
    for (std::int64_t b = 0; b < dim; ++b) {
      double val = 0.0;
      for (int k = 0; k < sys.n; ++k) {
        const double sk = ((b >> (sys.n - 1 - k)) & 1) ? -1.0 : 1.0;
        val += 2.0 * std::numbers::pi * nmr.offsets_hz[static_cast<std::size_t>(k)] *
               sk / 2.0;
        for (int j = k + 1; j < sys.n; ++j) {
          const double sj = ((b >> (sys.n - 1 - j)) & 1) ? -1.0 : 1.0;
          val += std::numbers::pi *
                 nmr.couplings_hz[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
                 sk * sj / 2.0;
        }
      }
      h(b, b) = val;
    }
    return h;
  }
  Mat h = Mat::Zero(dim, dim);
  for (const LocalTerm& t : sys.terms) {
    h += t.coeff * to_matrix(t.pauli);
  }
  return h;
}

ControlGenerators build_controls(int n) {
  check_n(n);
  const std::int64_t dim = std::int64_t{1} << n;
  ControlGenerators g{Mat::Zero(dim, dim), Mat::Zero(dim, dim)};
  for (int k = 0; k < n; ++k) {
    g.gx += embed_site(n, k, kAxisX);
    g.gy += embed_site(n, k, kAxisY);
  }
  return g;
}

}  // namespace qoc
