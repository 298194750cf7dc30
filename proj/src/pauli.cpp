#include "qoc/pauli.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <set>

namespace qoc {

namespace {

constexpr char kAlphabet[] = "IXYZ";

bool legal_letter(char c) {
  return c == 'I' || c == 'X' || c == 'Y' || c == 'Z';
}

int check_spin_index(int n, int k) {
  if (k < 0 || k >= n) {
    throw std::out_of_range("spin index " + std::to_string(k) +
                            " out of range for n=" + std::to_string(n));
  }
  return k;
}

int check_axis(int axis) {
  if (axis < kAxisX || axis > kAxisZ) {
    throw std::out_of_range("axis must be 0 (x), 1 (y) or 2 (z)");
  }
  return axis;
}

// Single-site Pauli matrices are signed permutations: column c has exactly one
// nonzero entry, at row c (Z) or row c with the site bit flipped (X, Y).
// bit: the site bit of the column index. Returns the nonzero entry value.
Complex site_entry(int axis, bool bit) {
  switch (axis) {
    case kAxisX:
      return Complex(1.0, 0.0);
    case kAxisY:
      return bit ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
    default:
      return bit ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
  }
}

// sigma_axis^k * a
Mat site_left(const Mat& a, int n, int k, int axis) {
  const std::int64_t dim = a.rows();
  const std::int64_t mask =
      (axis == kAxisZ) ? 0 : (std::int64_t{1} << (n - 1 - k));
  const std::int64_t bitmask = std::int64_t{1} << (n - 1 - k);
  Mat out(dim, a.cols());
  for (std::int64_t r = 0; r < dim; ++r) {
    const std::int64_t j = r ^ mask;  // sigma(r, j) is the only nonzero in row r
    out.row(r) = site_entry(axis, (j & bitmask) != 0) * a.row(j);
  }
  return out;
}

// a * sigma_axis^k
Mat site_right(const Mat& a, int n, int k, int axis) {
  const std::int64_t dim = a.cols();
  const std::int64_t mask =
      (axis == kAxisZ) ? 0 : (std::int64_t{1} << (n - 1 - k));
  const std::int64_t bitmask = std::int64_t{1} << (n - 1 - k);
  Mat out(a.rows(), dim);
  for (std::int64_t c = 0; c < dim; ++c) {
    const std::int64_t j = c ^ mask;  // sigma(j, c) is the only nonzero in column c
    out.col(c) = site_entry(axis, (c & bitmask) != 0) * a.col(j);
  }
  return out;
}

}  // namespace

int PauliString::weight() const {
  int w = 0;
  for (char c : letters) w += (c != 'I');
  return w;
}

PauliString parse_label(const std::string& text, int n) {
  if (n < 1) {
    throw ConfigError("pauli label: spin count must be >= 1, got " +
                      std::to_string(n));
  }
  if (static_cast<int>(text.size()) != n) {
    throw ConfigError("pauli label \"" + text + "\": length " +
                      std::to_string(text.size()) + " does not match n=" +
                      std::to_string(n));
  }
  PauliString p;
  p.letters.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
    if (!legal_letter(c)) {
      throw ConfigError("pauli label \"" + text + "\": illegal character '" +
                        text[i] + "' at index " + std::to_string(i));
    }
    p.letters.push_back(c);
  }
  return p;
}

Eigen::Matrix2cd pauli_matrix(char letter) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  const Complex i(0.0, 1.0);
  switch (letter) {
    case 'I':
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case 'X':
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 'Y':
      m(0, 1) = -i;
      m(1, 0) = i;
      break;
    case 'Z':
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    default:
      throw ConfigError(std::string("unknown pauli letter '") + letter + "'");
  }
  return m;
}

Mat to_matrix(const PauliString& p) {
  const int n = p.n();
  if (n < 1) throw ConfigError("pauli string is empty");
  if (n > kDimCap) {
    throw ConfigError("pauli string length " + std::to_string(n) +
                      " exceeds the dense-operator cap of " +
                      std::to_string(kDimCap));
  }
  for (char c : p.letters) {
    if (!legal_letter(c)) {
      throw ConfigError(std::string("pauli string holds illegal letter '") + c + "'");
    }
  }
  const std::int64_t dim = std::int64_t{1} << n;
  // The Kronecker product of signed permutations is a signed permutation:
  // column c maps to row c ^ xmask with phase = product of per-site entries.
  std::int64_t xmask = 0;
  for (int k = 0; k < n; ++k) {
    const char c = p.letters[static_cast<std::size_t>(k)];
    if (c == 'X' || c == 'Y') xmask |= std::int64_t{1} << (n - 1 - k);
  }
  Mat m = Mat::Zero(dim, dim);
  for (std::int64_t c = 0; c < dim; ++c) {
    Complex phase(1.0, 0.0);
    for (int k = 0; k < n; ++k) {
      const char letter = p.letters[static_cast<std::size_t>(k)];
      if (letter == 'I') continue;
      const bool bit = (c >> (n - 1 - k)) & 1;
      const int axis = (letter == 'X') ? kAxisX : (letter == 'Y') ? kAxisY : kAxisZ;
      phase *= site_entry(axis, bit);
    }
    m(c ^ xmask, c) = phase;
  }
  return m;
}

double hs_inner(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw std::invalid_argument(
        "hs_inner: dimension mismatch (" + std::to_string(a.rows()) + "x" +
        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
        std::to_string(b.cols()) + ")");
  }
  // Tr(a b) = sum_ij a_ij b_ji.
  const Complex tr = a.cwiseProduct(b.transpose()).sum();
  const double re = tr.real() / static_cast<double>(a.rows());
  const double im = tr.imag() / static_cast<double>(a.rows());
  if (std::abs(im) > 1e-12 * std::max(1.0, std::abs(re))) {
    throw std::runtime_error("hs_inner: non-Hermitian inputs (imaginary residue " +
                             std::to_string(im) + ")");
  }
  return re;
}

double expectation(const Mat& rho, const PauliString& p) {
  return hs_inner(rho, to_matrix(p));
}

namespace {

void check_state_term(SparsePauliState& state, const std::string& label,
                      double coeff, int n_expected, std::set<std::string>& seen,
                      const std::string& where) {
  if (!std::isfinite(coeff)) {
    throw ConfigError(where + ": coefficient for \"" + label + "\" is not finite");
  }
  if (coeff == 0.0) {
    throw ConfigError(where + ": coefficient for \"" + label +
                      "\" is exactly zero (drop the term instead)");
  }
  const int n = state.terms.empty() ? (n_expected >= 0 ? n_expected
                                                       : static_cast<int>(label.size()))
                                    : state.n;
  PauliString p = parse_label(label, n);
  if (!seen.insert(p.letters).second) {
    throw ConfigError(where + ": duplicate label \"" + p.letters + "\"");
  }
  state.n = n;
  state.terms.emplace_back(std::move(p), coeff);
}

}  // namespace

SparsePauliState parse_state_json(const nlohmann::json& doc, int n_expected) {
  if (!doc.is_array() || doc.empty()) {
    throw ConfigError("sparse state: expected a non-empty JSON array of "
                      "{\"label\", \"coeff\"} objects");
  }
  SparsePauliState state;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "sparse state [" + std::to_string(i) + "]";
    if (!item.is_object() || !item.contains("label") || !item.contains("coeff")) {
      throw ConfigError(where + ": expected {\"label\", \"coeff\"}");
    }
    if (!item["label"].is_string() || !item["coeff"].is_number()) {
      throw ConfigError(where + ": label must be a string and coeff a number");
    }
    check_state_term(state, item["label"].get<std::string>(),
                     item["coeff"].get<double>(), n_expected, seen, where);
  }
  return state;
}

SparsePauliState parse_state_inline(const std::string& spec, int n_expected) {
  SparsePauliState state;
  std::set<std::string> seen;
  std::size_t pos = 0;
  int index = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(pos, comma - pos);
    const std::string where = "target spec item " + std::to_string(index);
    const std::size_t colon = item.find(':');
    if (item.empty() || colon == std::string::npos || colon == 0) {
      throw ConfigError(where + ": expected \"LABEL:coeff\", got \"" + item + "\"");
    }
    const std::string label = item.substr(0, colon);
    const std::string num = item.substr(colon + 1);
    std::size_t used = 0;
    double coeff = 0.0;
    try {
      coeff = std::stod(num, &used);
    } catch (const std::exception&) {
      throw ConfigError(where + ": cannot parse coefficient \"" + num + "\"");
    }
    if (used != num.size()) {
      throw ConfigError(where + ": trailing characters in coefficient \"" + num + "\"");
    }
    check_state_term(state, label, coeff, n_expected, seen, where);
    ++index;
    pos = comma + 1;
    if (comma == spec.size()) break;
  }
  if (state.terms.empty()) {
    throw ConfigError("target spec is empty");
  }
  return state;
}

nlohmann::json state_to_json(const SparsePauliState& state) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [p, x] : state.terms) {
    arr.push_back({{"label", p.letters}, {"coeff", x}});
  }
  return arr;
}

Mat state_matrix(const SparsePauliState& state) {
  if (state.terms.empty()) throw ConfigError("sparse state has no terms");
  const std::int64_t dim = std::int64_t{1} << state.n;
  Mat m = Mat::Zero(dim, dim);
  for (const auto& [p, x] : state.terms) {
    m += x * to_matrix(p);
  }
  return m;
}

Mat embed_site(int n, int k, int axis) {
  check_spin_index(n, k);
  check_axis(axis);
  std::string letters(static_cast<std::size_t>(n), 'I');
  letters[static_cast<std::size_t>(k)] = kAlphabet[axis + 1];
  return to_matrix(PauliString{letters});
}

Mat site_commutator(const Mat& rho, int n, int k, int axis) {
  check_spin_index(n, k);
  check_axis(axis);
  return site_left(rho, n, k, axis) - site_right(rho, n, k, axis);
}

Mat site_pi2_conjugate(const Mat& rho, int n, int k, int axis, int sign) {
  check_spin_index(n, k);
  check_axis(axis);
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("site_pi2_conjugate: sign must be +1 or -1");
  }
  // R = (I - s i sigma)/sqrt(2)  =>  R rho R^dag = (rho + s rho s + s i (rho s - s rho))/2
  // where s i is the signed imaginary unit and "s rho s" uses sigma on site k.
  const Mat srho = site_left(rho, n, k, axis);
  const Mat rhos = site_right(rho, n, k, axis);
  const Mat srhos = site_right(srho, n, k, axis);
  const Complex si(0.0, static_cast<double>(sign));
  return 0.5 * (rho + srhos + si * (rhos - srho));
}

}  // namespace qoc
