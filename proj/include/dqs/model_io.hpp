#pragma once

// JSON model files:
//
//   {
//     "dimension": 2,
//     "basis": "gell-mann",            // or "pauli" (N = 2 only)
//     "hamiltonian": [[[re, im], ...], ...],      // N × N
//     "kossakowski": [[[re, im], ...], ...]       // (N²-1) × (N²-1)
//   }
//
// With basis "pauli" the Kossakowski entries are coefficients of the
// unnormalized Pauli matrices and are rescaled to the Gell-Mann basis on load.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dqs/gks.hpp"
#include "dqs/linalg.hpp"
#include "dqs/matrix.hpp"

namespace dqs {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFile {
  std::size_t dimension = 0;
  std::string basis = "gell-mann";
  ComplexMatrix hamiltonian;
  ComplexMatrix kossakowski;  // as written in the file

  KossakowskiMatrix gell_mann_kossakowski(double psd_tol = tolerance::psd) const {
    if (basis == "pauli") return KossakowskiMatrix(2, kossakowski * 2.0, psd_tol);
    return KossakowskiMatrix(dimension, kossakowski, psd_tol);
  }

  GksLiouvillian liouvillian(double psd_tol = tolerance::psd) const {
    return GksLiouvillian(HermitianMatrix(hamiltonian), gell_mann_kossakowski(psd_tol),
                          gell_mann_basis(dimension));
  }
};

namespace detail {

inline ComplexMatrix parse_complex_matrix(const nlohmann::json& j, std::size_t n,
                                          const std::string& field) {
  if (!j.is_array() || j.size() != n) {
    throw ModelError(field + ": expected an array of " + std::to_string(n) + " rows");
  }
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = j[r];
    const std::string where = field + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != n) {
      throw ModelError(where + ": expected " + std::to_string(n) + " entries");
    }
    for (std::size_t c = 0; c < n; ++c) {
      const auto& z = row[c];
      const std::string at = where + "[" + std::to_string(c) + "]";
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw ModelError(at + ": expected [re, im] pair of numbers");
      }
      m(r, c) = complex{z[0].get<double>(), z[1].get<double>()};
    }
  }
  return m;
}

/// One matrix row per line: [[re, im], [re, im], ...].
inline std::string complex_matrix_text(const ComplexMatrix& m, const std::string& indent) {
  std::string out = "[\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += indent + "  [";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ", ";
      out += "[" + nlohmann::json(m(r, c).real()).dump() + ", " + nlohmann::json(m(r, c).imag()).dump() + "]";
    }
    out += r + 1 < m.rows() ? "],\n" : "]\n";
  }
  return out + indent + "]";
}

/// nlohmann messages start with "[json.exception.parse_error.N] "; drop that tag.
inline std::string parse_error_message(const nlohmann::json::parse_error& e) {
  std::string msg = e.what();
  const auto close = msg.find("] ");
  if (msg.rfind("[json.exception", 0) == 0 && close != std::string::npos) msg = msg.substr(close + 2);
  return msg;
}

inline std::string model_text(std::size_t dim, const std::string& basis, const ComplexMatrix& h,
                              const ComplexMatrix& a) {
  return "{\n  \"dimension\": " + std::to_string(dim) + ",\n  \"basis\": " + nlohmann::json(basis).dump() +
         ",\n  \"hamiltonian\": " + complex_matrix_text(h, "  ") +
         ",\n  \"kossakowski\": " + complex_matrix_text(a, "  ") + "\n}\n";
}

}  // namespace detail

/// Parses and validates a model; throws ModelError with a line or field location.
inline ModelFile parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(detail::parse_error_message(e));
  }
  if (!j.is_object()) throw ModelError("model: top level must be an object");
  ModelFile m;
  if (!j.contains("dimension") || !j["dimension"].is_number_integer() ||
      j["dimension"].get<long long>() < 2) {
    throw ModelError("dimension: expected an integer >= 2");
  }
  m.dimension = j["dimension"].get<std::size_t>();
  if (m.dimension > 64) throw ModelError("dimension: at most 64 supported");
  if (j.contains("basis")) {
    if (!j["basis"].is_string()) throw ModelError("basis: expected a string");
    m.basis = j["basis"].get<std::string>();
  }
  if (m.basis != "gell-mann" && m.basis != "pauli") {
    throw ModelError("basis: unknown tag '" + m.basis + "' (expected gell-mann or pauli)");
  }
  if (m.basis == "pauli" && m.dimension != 2) throw ModelError("basis: 'pauli' requires dimension 2");
  if (!j.contains("hamiltonian")) throw ModelError("hamiltonian: missing");
  if (!j.contains("kossakowski")) throw ModelError("kossakowski: missing");
  m.hamiltonian = detail::parse_complex_matrix(j["hamiltonian"], m.dimension, "hamiltonian");
  m.kossakowski = detail::parse_complex_matrix(j["kossakowski"], m.dimension * m.dimension - 1,
                                               "kossakowski");
  try {
    HermitianMatrix h(m.hamiltonian);
    (void)h;
  } catch (const std::invalid_argument& e) {
    throw ModelError(std::string("hamiltonian: ") + e.what());
  }
  try {
    (void)m.gell_mann_kossakowski();
  } catch (const std::invalid_argument& e) {
    throw ModelError(std::string("kossakowski: ") + e.what());
  }
  return m;
}

inline ModelFile read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

/// Serializes in canonical form (Gell-Mann basis). Numbers use the shortest
/// representation that round-trips exactly.
inline std::string write_model(const GksLiouvillian& l) {
  return detail::model_text(l.dim(), "gell-mann", l.hamiltonian().matrix(), l.kossakowski().matrix());
}

inline std::string write_model(const ModelFile& m) {
  return detail::model_text(m.dimension, m.basis, m.hamiltonian, m.kossakowski);
}

/// printf("%.17g"); negative zero prints as 0.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace dqs
