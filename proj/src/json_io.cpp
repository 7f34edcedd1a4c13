#include "momx/json_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "momx/errors.hpp"

namespace momx::io {

namespace {

[[noreturn]] void bad(const std::string& what) { raise(ErrorKind::InputError, what); }

const json& field(const json& j, const char* name) {
  if (!j.is_object()) bad("expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) bad(std::string("missing field \"") + name + "\"");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(where + " is not finite");
  return v;
}

int non_negative_int(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    bad(where + " must be a non-negative integer");
  }
  return j.get<int>();
}

Complex complex_entry(const json& j, const std::string& where) {
  if (j.is_number()) return {number(j, where), 0.0};
  if (!j.is_array() || j.size() != 2) bad(where + " must be [re, im]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

}  // namespace

MomentTable table_from_json(const json& j) {
  const int max_m = non_negative_int(field(j, "max_m"), "max_m");
  const int max_n = non_negative_int(field(j, "max_n"), "max_n");
  const json& entries = field(j, "entries");
  if (!entries.is_array()) bad("entries must be an array");
  MomentTable table(max_m, max_n);
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    const json& e = entries[i];
    if (!e.is_array() || e.size() != 3) bad(where + " must be [m, n, s]");
    const int m = non_negative_int(e[0], where + "[0]");
    const int n = non_negative_int(e[1], where + "[1]");
    if (m > max_m || n > max_n) bad(where + " index lies outside the rectangle");
    if (!seen.emplace(m, n).second) bad(where + " duplicates an earlier index");
    table(m, n) = number(e[2], where + "[2]");
  }
  for (int m = 0; m <= max_m; ++m) {
    for (int n = 0; n <= max_n; ++n) {
      if (!seen.count({m, n})) {
        bad("entries: missing s_{" + std::to_string(m) + "," + std::to_string(n) + "}");
      }
    }
  }
  return table;
}

json to_json(const MomentTable& table) {
  json entries = json::array();
  for (int m = 0; m <= table.max_m(); ++m) {
    for (int n = 0; n <= table.max_n(); ++n) entries.push_back(json::array({m, n, table(m, n)}));
  }
  return {{"max_m", table.max_m()}, {"max_n", table.max_n()}, {"entries", entries}};
}

AtomicMeasure measure_from_json(const json& j) {
  const json& atoms = field(j, "atoms");
  if (!atoms.is_array()) bad("atoms must be an array");
  AtomicMeasure measure;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string where = "atoms[" + std::to_string(i) + "]";
    const json& a = atoms[i];
    if (!a.is_array() || a.size() != 3) bad(where + " must be [t1, t2, w]");
    measure.atoms.push_back(
        {number(a[0], where + "[0]"), number(a[1], where + "[1]"), number(a[2], where + "[2]")});
  }
  return measure;
}

json to_json(const AtomicMeasure& measure) {
  json atoms = json::array();
  for (const Atom& a : measure.atoms) atoms.push_back(json::array({a.t1, a.t2, a.w}));
  return {{"atoms", atoms}};
}

CMatrix cmatrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) bad(name + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  CMatrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string where = name + "[" + std::to_string(r) + "]";
    if (!row.is_array()) bad(where + " must be an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      bad(where + " has a different length than the first row");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = complex_entry(row[static_cast<std::size_t>(c)],
                              where + "[" + std::to_string(c) + "]");
    }
  }
  if (cols < 0) m.resize(0, 0);
  return m;
}

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

CVector cvector_from_json(const json& j, const std::string& name) {
  if (!j.is_array()) bad(name + " must be an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_entry(j[i], name + "[" + std::to_string(i) + "]");
  }
  return v;
}

json to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

SymmetricPair pair_from_json(const json& j) {
  SymmetricPair pair;
  pair.dim = non_negative_int(field(j, "dim"), "dim");
  auto op = [&](const char* dom, const char* act) {
    PartialOperator p;
    p.domain = cmatrix_from_json(field(j, dom), dom);
    p.action = cmatrix_from_json(field(j, act), act);
    // a domain with no columns may be written as [] or as dim empty rows
    if (p.domain.size() == 0) p.domain.resize(pair.dim, 0);
    if (p.action.size() == 0) p.action.resize(pair.dim, 0);
    return p;
  };
  pair.a1 = op("A1_domain", "A1_action");
  pair.a2 = op("A2_domain", "A2_action");
  pair.h00 = cvector_from_json(field(j, "h00"), "h00");
  pair.j_matrix = cmatrix_from_json(field(j, "J_matrix"), "J_matrix");
  const json& flag = field(j, "a2_selfadjoint");
  if (!flag.is_boolean()) bad("a2_selfadjoint must be a boolean");
  pair.a2_selfadjoint = flag.get<bool>();
  return pair;
}

json to_json(const SymmetricPair& pair) {
  return {{"dim", pair.dim},
          {"A1_domain", to_json(pair.a1.domain)},
          {"A1_action", to_json(pair.a1.action)},
          {"A2_domain", to_json(pair.a2.domain)},
          {"A2_action", to_json(pair.a2.action)},
          {"h00", to_json(pair.h00)},
          {"J_matrix", to_json(pair.j_matrix)},
          {"a2_selfadjoint", pair.a2_selfadjoint}};
}

json to_json(const SolutionReport& report) {
  json out = to_json(report.measure);
  out["max_abs_moment_error"] = report.max_abs_moment_error;
  out["degrees_checked"] = json::array({report.degrees_m, report.degrees_n});
  out["determinate"] = report.determinate;
  out["u2_seed"] = report.u2_seed;
  return out;
}

json to_json(const CarlemanReport& report) {
  json sums = json::array();
  for (double s : report.partial_sums) {
    sums.push_back(std::isfinite(s) ? json(s) : json("inf"));
  }
  return {{"m", report.m}, {"partial_sums", sums}, {"verdict", to_string(report.verdict)}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) bad("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace momx::io
