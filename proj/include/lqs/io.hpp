#pragma once

/**
 * @file io.hpp
 * @brief System-file JSON parsing/serialization and CSV export.
 *
 * System files are JSON documents with fields `n`, `m`, `rep` in
 * {"slh", "complex", "quadrature"}, and either `omega_minus`/`omega_plus`/
 * `c_minus`/`c_plus` (rep = "slh") or `A`/`B`/`C`/`D`. Matrices are lists of
 * rows whose entries are `[re, im]` pairs; quadrature matrices may use plain
 * numbers. Parsed values round-trip bit-exactly (serialization uses
 * shortest-round-trip formatting).
 */

#include "lqs/invert.hpp"
#include "lqs/network.hpp"

#include "json.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

namespace lqs {

using Json = nlohmann::json;

/// @brief Shortest-round-trip-style fixed formatting for CSV output:
/// 17 significant digits reparse to the identical double; infinities are
/// serialized as `inf` / `-inf`.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json complex_list_to_json(const std::vector<Complex>& v) {
  Json arr = Json::array();
  for (const Complex& z : v) arr.push_back(complex_to_json(z));
  return arr;
}

/// @brief Serialize a matrix as rows of [re, im] pairs, or of plain numbers
/// when @p plain_real is set (quadrature-representation convention).
inline Json matrix_to_json(const CMat& m, bool plain_real = false) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (plain_real) {
        row.push_back(m(i, j).real());
      } else {
        row.push_back(complex_to_json(m(i, j)));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

namespace detail {

inline Complex entry_from_json(const Json& e, const std::string& name, Eigen::Index i,
                               Eigen::Index j) {
  if (e.is_number()) return Complex(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return Complex(e[0].get<double>(), e[1].get<double>());
  }
  throw std::invalid_argument("matrix \"" + name + "\" entry (" + std::to_string(i) + "," +
                              std::to_string(j) + "): expected a number or [re, im] pair");
}

}  // namespace detail

/// @brief Parse a matrix of the required shape; errors name the matrix and the
/// offending row/column.
inline CMat matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                             const std::string& name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw std::invalid_argument("matrix \"" + name + "\": expected " + std::to_string(rows) +
                                " rows, found " +
                                std::to_string(j.is_array() ? j.size() : 0));
  }
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("matrix \"" + name + "\" row " + std::to_string(i) +
                                  ": expected " + std::to_string(cols) + " entries, found " +
                                  std::to_string(row.is_array() ? row.size() : 0));
    }
    for (Eigen::Index jj = 0; jj < cols; ++jj) {
      m(i, jj) = detail::entry_from_json(row[static_cast<std::size_t>(jj)], name, i, jj);
    }
  }
  return m;
}

/// @brief Result of parsing a system file: either SLH parameters or a
/// state-space model, depending on the file's `rep` field.
struct ParsedSystem {
  bool is_slh = false;
  SlhParams slh;   ///< valid when is_slh
  StateSpace ss;   ///< valid when !is_slh

  /// Resolve to a quadrature state space regardless of source representation.
  StateSpace to_quadrature_ss() const {
    if (is_slh) return to_quadrature(build_complex_ss(slh));
    if (ss.rep == Rep::kComplex) return to_quadrature(ss);
    return ss;
  }
};

/// @brief Parse and validate a system JSON document.
inline ParsedSystem parse_system_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("system file: top-level JSON object expected");
  for (const char* field : {"n", "m", "rep"}) {
    if (!j.contains(field)) {
      throw std::invalid_argument(std::string("system file: missing field \"") + field + "\"");
    }
  }
  if (!j["n"].is_number_integer() || !j["m"].is_number_integer()) {
    throw std::invalid_argument("system file: \"n\" and \"m\" must be integers");
  }
  const Eigen::Index n = j["n"].get<Eigen::Index>(), m = j["m"].get<Eigen::Index>();
  if (n < 1 || m < 1) throw std::invalid_argument("system file: need n >= 1 and m >= 1");
  const std::string rep = j["rep"].get<std::string>();

  ParsedSystem out;
  if (rep == "slh") {
    out.is_slh = true;
    out.slh.n = n;
    out.slh.m = m;
    out.slh.omega_minus = matrix_from_json(j.value("omega_minus", Json::array()), n, n, "omega_minus");
    out.slh.omega_plus = matrix_from_json(j.value("omega_plus", Json::array()), n, n, "omega_plus");
    out.slh.c_minus = matrix_from_json(j.value("c_minus", Json::array()), m, n, "c_minus");
    out.slh.c_plus = matrix_from_json(j.value("c_plus", Json::array()), m, n, "c_plus");
    const double res = out.slh.structure_residual();
    if (res > 1e-12 * std::max({1.0, max_abs(out.slh.omega_minus), max_abs(out.slh.omega_plus)})) {
      throw std::invalid_argument(
          "system file: omega_minus must be Hermitian and omega_plus symmetric (residual " +
          format_double(res) + ")");
    }
    return out;
  }
  if (rep != "complex" && rep != "quadrature") {
    throw std::invalid_argument("system file: rep must be \"slh\", \"complex\" or \"quadrature\"");
  }
  out.ss.rep = rep == "complex" ? Rep::kComplex : Rep::kQuadrature;
  out.ss.n = n;
  out.ss.m = m;
  out.ss.A = matrix_from_json(j.value("A", Json::array()), 2 * n, 2 * n, "A");
  out.ss.B = matrix_from_json(j.value("B", Json::array()), 2 * n, 2 * m, "B");
  out.ss.C = matrix_from_json(j.value("C", Json::array()), 2 * m, 2 * n, "C");
  out.ss.D = matrix_from_json(j.value("D", Json::array()), 2 * m, 2 * m, "D");
  if (out.ss.rep == Rep::kComplex) {
    const double res = std::max({doubled_up_residual(out.ss.A), doubled_up_residual(out.ss.B),
                                 doubled_up_residual(out.ss.C), doubled_up_residual(out.ss.D)});
    const double scale = std::max({1.0, max_abs(out.ss.A), max_abs(out.ss.B), max_abs(out.ss.C)});
    if (res > 1e-12 * scale) {
      throw std::invalid_argument(
          "system file: complex-representation matrices must be doubled-up (residual " +
          format_double(res) + ")");
    }
  } else {
    double imres = 0.0;
    for (const CMat* mm : {&out.ss.A, &out.ss.B, &out.ss.C, &out.ss.D}) {
      imres = std::max(imres, mm->imag().size() > 0 ? mm->imag().cwiseAbs().maxCoeff() : 0.0);
    }
    if (imres > 1e-12) {
      throw std::invalid_argument(
          "system file: quadrature-representation matrices must be real (residual " +
          format_double(imres) + ")");
    }
  }
  return out;
}

inline ParsedSystem parse_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open system file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return parse_system_json(j);
}

inline Json system_to_json(const SlhParams& p) {
  Json j;
  j["rep"] = "slh";
  j["n"] = p.n;
  j["m"] = p.m;
  j["omega_minus"] = matrix_to_json(p.omega_minus);
  j["omega_plus"] = matrix_to_json(p.omega_plus);
  j["c_minus"] = matrix_to_json(p.c_minus);
  j["c_plus"] = matrix_to_json(p.c_plus);
  return j;
}

inline Json system_to_json(const StateSpace& ss) {
  Json j;
  j["rep"] = ss.rep == Rep::kComplex ? "complex" : "quadrature";
  j["n"] = ss.n;
  j["m"] = ss.m;
  const bool plain = ss.rep == Rep::kQuadrature;
  j["A"] = matrix_to_json(ss.A, plain);
  j["B"] = matrix_to_json(ss.B, plain);
  j["C"] = matrix_to_json(ss.C, plain);
  j["D"] = matrix_to_json(ss.D, plain);
  return j;
}

inline Json system_to_json(const ParsedSystem& ps) {
  return ps.is_slh ? system_to_json(ps.slh) : system_to_json(ps.ss);
}

namespace detail {

inline void csv_header_block(std::ostream& os, const char* stem, Eigen::Index count) {
  for (Eigen::Index i = 1; i <= count; ++i) os << ", " << stem << "_" << i;
}

inline void csv_row_block(std::ostream& os, const RMat& m, Eigen::Index row) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) os << ", " << format_double(m(row, j));
}

}  // namespace detail

/// @brief Trajectory CSV: header `t, x_1..x_2n, u_1..u_2m, y_1..y_2m`.
inline void write_trajectory_csv(std::ostream& os, const SimResult& sim) {
  os << "t";
  detail::csv_header_block(os, "x", sim.x.cols());
  detail::csv_header_block(os, "u", sim.u.cols());
  detail::csv_header_block(os, "y", sim.y.cols());
  os << "\n";
  for (std::size_t i = 0; i < sim.t.size(); ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    os << format_double(sim.t[i]);
    detail::csv_row_block(os, sim.x, row);
    detail::csv_row_block(os, sim.u, row);
    detail::csv_row_block(os, sim.y, row);
    os << "\n";
  }
}

/// @brief Reconstruction CSV: trajectory columns plus `uhat_1..uhat_2m,
/// err_norm`.
inline void write_reconstruction_csv(std::ostream& os, const ReconstructionResult& rec) {
  os << "t";
  detail::csv_header_block(os, "x", rec.plant.x.cols());
  detail::csv_header_block(os, "u", rec.plant.u.cols());
  detail::csv_header_block(os, "y", rec.plant.y.cols());
  detail::csv_header_block(os, "uhat", rec.uhat.cols());
  os << ", err_norm\n";
  for (std::size_t i = 0; i < rec.plant.t.size(); ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    os << format_double(rec.plant.t[i]);
    detail::csv_row_block(os, rec.plant.x, row);
    detail::csv_row_block(os, rec.plant.u, row);
    detail::csv_row_block(os, rec.plant.y, row);
    detail::csv_row_block(os, rec.uhat, row);
    os << ", " << format_double(rec.err[i]) << "\n";
  }
}

/// @brief Sweep CSV with the fixed 16-column header; divergent values appear
/// as `inf` with the corresponding flag bit set in the last column.
inline void write_sweep_csv(std::ostream& os, const SweepResult& sw) {
  os << "omega, Tq_re, Tq_im, Tp_re, Tp_im, Sq_re, Sq_im, Sp_re, Sp_im, "
        "SpTq_re, SpTq_im, SpTp_re, SpTp_im, ratio_q, ratio_p, flags\n";
  for (const SweepPoint& pt : sw.points) {
    os << format_double(pt.omega);
    for (const Complex* z : {&pt.tq, &pt.tp, &pt.sq, &pt.sp, &pt.stq, &pt.stp}) {
      os << ", " << format_double(z->real()) << ", " << format_double(z->imag());
    }
    os << ", " << format_double(pt.ratio_q) << ", " << format_double(pt.ratio_p) << ", "
       << pt.flags << "\n";
  }
}

}  // namespace lqs
