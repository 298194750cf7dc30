#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace qoc {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Largest spin count for which dense 2^n x 2^n operators may be built.
inline constexpr int kDimCap = 12;

// Axis indices used throughout for sigma_x / sigma_y / sigma_z.
inline constexpr int kAxisX = 0;
inline constexpr int kAxisY = 1;
inline constexpr int kAxisZ = 2;

// Invalid user-supplied configuration (files, flags, schemas). The CLI maps
// this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An n-letter word over {I,X,Y,Z} naming one tensor-product basis operator.
// Letters read left to right as spin 1..n; spin 1 is the most significant
// qubit of the computational basis index.
struct PauliString {
  std::string letters;

  int n() const { return static_cast<int>(letters.size()); }
  int weight() const;  // number of non-I letters
  bool operator==(const PauliString&) const = default;
};

// Parses a label, accepting lower case; rejects bad length or characters
// with position information.
PauliString parse_label(const std::string& text, int n);

// 2x2 matrix for a single letter.
Eigen::Matrix2cd pauli_matrix(char letter);

// Dense Kronecker-product matrix of the full string (signed-permutation
// construction, O(n 2^n)). Rejects n > kDimCap.
Mat to_matrix(const PauliString& p);

// Normalized Hilbert-Schmidt inner product Tr(a b) / dim. Both arguments are
// expected Hermitian, so the trace is real; a non-negligible imaginary
// residue indicates a bug and throws.
double hs_inner(const Mat& a, const Mat& b);

// hs_inner(rho, to_matrix(p)).
double expectation(const Mat& rho, const PauliString& p);

// A Hermitian operator given as a sparse real combination sum_s x_s P_s.
struct SparsePauliState {
  int n = 0;
  std::vector<std::pair<PauliString, double>> terms;  // unique labels, nonzero coeffs

  int size() const { return static_cast<int>(terms.size()); }
};

// JSON form: [{"label": "ZIZ", "coeff": 1.0}, ...]. If n_expected >= 0 the
// label length must match it.
SparsePauliState parse_state_json(const nlohmann::json& doc, int n_expected = -1);

// Inline form: comma-separated "LABEL:coeff" pairs, e.g. "ZZ:0.5,XX:-0.25".
SparsePauliState parse_state_inline(const std::string& spec, int n_expected = -1);

nlohmann::json state_to_json(const SparsePauliState& state);

// Dense matrix sum_s x_s P_s.
Mat state_matrix(const SparsePauliState& state);

// ---- structured single-site operations (k is a 0-based spin index) ----

// Dense sigma_axis acting on spin k, identity elsewhere.
Mat embed_site(int n, int k, int axis);

// [sigma_axis^k, rho] without forming the embedded matrix (O(4^n)).
Mat site_commutator(const Mat& rho, int n, int k, int axis);

// R rho R^dag with R = exp(-sign * i * (pi/4) * sigma_axis^k), sign in {+1,-1};
// i.e. the +/- pi/2 single-spin rotation used by the sampled gradient.
Mat site_pi2_conjugate(const Mat& rho, int n, int k, int axis, int sign);

}  // namespace qoc
