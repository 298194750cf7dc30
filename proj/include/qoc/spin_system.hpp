#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qoc/pauli.hpp"

namespace qoc {

// One drift term coeff * P (coeff in rad/s); weight is bounded by the
// system's locality bound.
struct LocalTerm {
  double coeff = 0.0;
  PauliString pauli;
};

// NMR Ising-form parameters; config files carry Hz, the drift builder applies
// the angular-frequency factors.
struct NmrParams {
  std::vector<double> offsets_hz;                // length n
  std::vector<std::vector<double>> couplings_hz;  // n x n, symmetric, zero diagonal
};

// Drift Hamiltonian data: exactly one of {terms, nmr} is populated.
struct SpinSystem {
  int n = 0;
  std::vector<LocalTerm> terms;
  std::optional<NmrParams> nmr;
  int locality_bound = 2;
};

SpinSystem make_term_system(int n, std::vector<LocalTerm> terms,
                            int locality_bound = 2);
SpinSystem make_nmr_system(int n, std::vector<double> offsets_hz,
                           std::vector<std::vector<double>> couplings_hz);

// Throws ConfigError with a field-path diagnostic when the structure is
// inconsistent.
void validate_system(const SpinSystem& sys);

// JSON schema: {"n": int, "nmr": {"offsets_hz": [...], "couplings_hz": [[...]]}}
// or {"n": int, "terms": [{"coeff": f, "pauli": "ZZI"}, ...]}.
SpinSystem load_system(const nlohmann::json& doc);
SpinSystem load_system_file(const std::string& path);

// Drift Hamiltonian in rad/s:
//   NMR form:   sum_k (2 pi offsets_hz[k]) sigma_z^k / 2
//             + sum_{k<j} pi couplings_hz[k][j] sigma_z^k sigma_z^j / 2
//   term form:  sum_l coeff_l P_l
Mat build_drift(const SpinSystem& sys);

// Collective transverse controls gx = sum_k sigma_x^k, gy = sum_k sigma_y^k.
struct ControlGenerators {
  Mat gx, gy;
};

ControlGenerators build_controls(int n);

}  // namespace qoc
