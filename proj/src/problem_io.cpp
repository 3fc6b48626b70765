#include "cvxkit/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "cvxkit/kernels.hpp"

namespace cvxkit {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_fields(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (item.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("problem file: unknown field \"" + item.key() + "\" in " + where);
    }
  }
}

Vec parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("problem file: " + where + " must be an array");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError("problem file: non-numeric entry in " + where);
    v.push_back(e.get<double>());
  }
  return v;
}

DenseMatrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("problem file: " + where + " must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Vec entries;
  for (std::size_t i = 0; i < rows; ++i) {
    Vec row = parse_vector(j[i], where + " row " + std::to_string(i));
    if (i == 0) {
      cols = row.size();
      entries.reserve(rows * cols);
    } else if (row.size() != cols) {
      throw ValidationError("problem file: ragged rows in " + where);
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }
  if (cols == 0) throw ValidationError("problem file: empty rows in " + where);
  return DenseMatrix(rows, cols, std::move(entries));
}

json matrix_to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ProblemFile parse_problem_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("problem file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("problem file: top-level document must be an object");
  reject_unknown_fields(doc, {"n", "objective", "inequalities", "equalities", "start"},
                        "the top level");

  ProblemFile pf;
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw ParseError("problem file: missing integer field n");
  }
  const long long n_raw = doc["n"].get<long long>();
  if (n_raw <= 0) throw ValidationError("problem file: n must be positive");
  pf.n = static_cast<std::size_t>(n_raw);

  if (!doc.contains("objective") || !doc["objective"].is_object()) {
    throw ParseError("problem file: missing objective object");
  }
  const json& obj = doc["objective"];
  reject_unknown_fields(obj, {"Q", "q", "c"}, "objective");
  if (!obj.contains("Q")) throw ParseError("problem file: objective.Q is required");
  pf.q_matrix = parse_matrix(obj["Q"], "objective.Q");
  pf.q_vector = obj.contains("q") ? parse_vector(obj["q"], "objective.q") : Vec(pf.n, 0.0);
  if (obj.contains("c")) {
    if (!obj["c"].is_number()) throw ParseError("problem file: objective.c must be a number");
    pf.constant = obj["c"].get<double>();
  }

  if (pf.q_matrix.rows() != pf.n || pf.q_matrix.cols() != pf.n) {
    throw ValidationError("problem file: Q must be n x n");
  }
  if (pf.q_vector.size() != pf.n) throw ValidationError("problem file: q must have length n");
  if (!pf.q_matrix.is_symmetric()) throw ValidationError("problem file: Q is not symmetric");
  if (!is_positive_semidefinite(pf.q_matrix)) {
    throw ValidationError("problem file: Q is not positive semidefinite");
  }

  if (doc.contains("inequalities")) {
    const json& ineq = doc["inequalities"];
    if (!ineq.is_object()) throw ParseError("problem file: inequalities must be an object");
    reject_unknown_fields(ineq, {"G", "h"}, "inequalities");
    if (!ineq.contains("G") || !ineq.contains("h")) {
      throw ParseError("problem file: inequalities need both G and h");
    }
    pf.ineq_matrix = parse_matrix(ineq["G"], "inequalities.G");
    pf.ineq_rhs = parse_vector(ineq["h"], "inequalities.h");
    if (pf.ineq_matrix->cols() != pf.n) {
      throw ValidationError("problem file: G must have n columns");
    }
    if (pf.ineq_rhs->size() != pf.ineq_matrix->rows()) {
      throw ValidationError("problem file: h length must match the rows of G");
    }
  }

  if (doc.contains("equalities")) {
    const json& eq = doc["equalities"];
    if (!eq.is_object()) throw ParseError("problem file: equalities must be an object");
    reject_unknown_fields(eq, {"A", "b"}, "equalities");
    if (!eq.contains("A") || !eq.contains("b")) {
      throw ParseError("problem file: equalities need both A and b");
    }
    pf.eq_matrix = parse_matrix(eq["A"], "equalities.A");
    pf.eq_rhs = parse_vector(eq["b"], "equalities.b");
    if (pf.eq_matrix->cols() != pf.n) {
      throw ValidationError("problem file: A must have n columns");
    }
    if (pf.eq_rhs->size() != pf.eq_matrix->rows()) {
      throw ValidationError("problem file: b length must match the rows of A");
    }
  }

  if (doc.contains("start")) {
    pf.start = parse_vector(doc["start"], "start");
    if (pf.start->size() != pf.n) throw ValidationError("problem file: start must have length n");
  }

  // Full construction catches the remaining validation failures
  // (rank-deficient A, p >= n) before the caller touches the file.
  build_problem(pf);
  return pf;
}

std::string serialize_problem_file(const ProblemFile& pf) {
  json doc;
  doc["n"] = pf.n;
  json obj;
  obj["Q"] = matrix_to_json(pf.q_matrix);
  obj["q"] = pf.q_vector;
  obj["c"] = pf.constant;
  doc["objective"] = std::move(obj);
  if (pf.ineq_matrix) {
    json ineq;
    ineq["G"] = matrix_to_json(*pf.ineq_matrix);
    ineq["h"] = *pf.ineq_rhs;
    doc["inequalities"] = std::move(ineq);
  }
  if (pf.eq_matrix) {
    json eq;
    eq["A"] = matrix_to_json(*pf.eq_matrix);
    eq["b"] = *pf.eq_rhs;
    doc["equalities"] = std::move(eq);
  }
  if (pf.start) doc["start"] = *pf.start;
  return doc.dump(2) + "\n";
}

ConvexProblem build_problem(const ProblemFile& pf) {
  auto objective = std::make_shared<QuadraticField>(pf.q_matrix, pf.q_vector, pf.constant);
  std::vector<FieldPtr> ineqs;
  if (pf.ineq_matrix) {
    const DenseMatrix& g = *pf.ineq_matrix;
    for (std::size_t i = 0; i < g.rows(); ++i) {
      Vec coeffs(g.row(i).begin(), g.row(i).end());
      ineqs.push_back(std::make_shared<AffineField>(std::move(coeffs), (*pf.ineq_rhs)[i]));
    }
  }
  DenseMatrix eq = pf.eq_matrix ? *pf.eq_matrix : DenseMatrix(0, pf.n);
  Vec rhs = pf.eq_rhs ? *pf.eq_rhs : Vec{};
  try {
    return ConvexProblem(std::move(objective), std::move(ineqs), std::move(eq), std::move(rhs));
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(std::string("problem file: ") + e.what());
  }
}

std::vector<Vec> parse_point_list(const std::string& text) {
  std::vector<Vec> points;
  std::istringstream stream(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Vec point;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        while (used < field.size() &&
               (field[used] == ' ' || field[used] == '\t' || field[used] == '\r')) {
          ++used;
        }
        if (used != field.size()) throw std::invalid_argument(field);
        point.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("point list line " + std::to_string(lineno) + ": bad coordinate \"" +
                         field + "\"");
      }
    }
    if (point.empty()) {
      throw ParseError("point list line " + std::to_string(lineno) + ": no coordinates");
    }
    if (!points.empty() && point.size() != points.front().size()) {
      throw ValidationError("point list line " + std::to_string(lineno) +
                            ": inconsistent dimension");
    }
    points.push_back(std::move(point));
  }
  return points;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::size_t write_trace(const std::vector<TraceRow>& rows, std::ostream& sink) {
  std::string out = "outer,t,inner,f0,barrier,step,gap_bound\n";
  for (const TraceRow& r : rows) {
    out += std::to_string(r.outer);
    out += ',';
    out += format_number(r.t);
    out += ',';
    out += std::to_string(r.inner);
    out += ',';
    out += format_number(r.f0);
    out += ',';
    out += format_number(r.barrier);
    out += ',';
    out += format_number(r.step);
    out += ',';
    out += format_number(r.gap_bound);
    out += '\n';
  }
  sink.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!sink) throw Error("write_trace: sink write failed");
  return out.size();
}

}  // namespace cvxkit
