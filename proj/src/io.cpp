#include "opsys/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opsys/error.hpp"

namespace opsys::io {
namespace {

void dump_into(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
      break;
    }
    default:
      out += j.dump();
  }
}

[[noreturn]] void schema(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::SchemaError, field + ": " + what);
}

const json& member(const json& j, const std::string& key, const std::string& field) {
  if (!j.is_object()) schema(field, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema(field, "missing field \"" + key + "\"");
  return *it;
}

int positive_int(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) schema(field, "expected a positive integer");
  return j.get<int>();
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) schema(field, "expected a number");
  return j.get<double>();
}

std::vector<double> parse_number_list(const std::string& body) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad number \"" + item + "\" in matrix expression");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw Error(ErrorKind::InvalidArgument, "bad number \"" + item + "\" in matrix expression");
    out.push_back(v);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

json vector_to_json(const std::vector<double>& v) {
  json out = json::array();
  for (const double x : v) out.push_back(x);
  return out;
}

}  // namespace

std::string canonical_dump(const json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, origin + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SchemaError, path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, path + ": cannot write file");
  out << text;
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) schema(field, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) schema(field + "[1]", "expected a row array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rf = field + "[" + std::to_string(i + 1) + "]";
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) schema(rf, "rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::string ef = rf + "[" + std::to_string(c + 1) + "]";
      const json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(i, c) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(i, c) = cplx(number(e[0], ef), number(e[1], ef));
      } else {
        schema(ef, "expected [re, im]");
      }
    }
  }
  return m;
}

json opsys_to_json(const OperatorSystemSpace& v) {
  json basis = json::array();
  for (const CMatrix& b : v.basis()) basis.push_back(matrix_to_json(b));
  return json{{"dim", v.ambient_dim()}, {"basis", basis}, {"unit", matrix_to_json(identity(v.ambient_dim()))}};
}

OperatorSystemSpace opsys_from_json(const json& j) {
  const int d = positive_int(member(j, "dim", "opsys"), "opsys.dim");
  const json& basis = member(j, "basis", "opsys");
  if (!basis.is_array() || basis.empty()) schema("opsys.basis", "expected a non-empty array of matrices");
  std::vector<CMatrix> mats;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const std::string f = "opsys.basis[" + std::to_string(k + 1) + "]";
    CMatrix m = matrix_from_json(basis[k], f);
    if (m.rows() != d || m.cols() != d) schema(f, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
    if (!is_hermitian(m)) throw Error(ErrorKind::InvariantViolation, f + " is not Hermitian");
    mats.push_back(std::move(m));
  }
  if (j.contains("unit")) {
    const CMatrix u = matrix_from_json(j["unit"], "opsys.unit");
    if (u.rows() != d || u.cols() != d || (u - identity(d)).norm() > kHermitianTol)
      throw Error(ErrorKind::InvariantViolation, "opsys.unit must be the identity matrix");
  }
  return OperatorSystemSpace(std::move(mats));
}

OperatorSystemSpace load_opsys(const std::string& path) { return opsys_from_json(read_json_file(path)); }

json correlation_to_json(const Correlation& c) {
  json p = json::array();
  for (int x = 0; x < c.n(); ++x) {
    json px = json::array();
    for (int y = 0; y < c.n(); ++y) {
      json pxy = json::array();
      for (int a = 0; a < c.k(); ++a) {
        json row = json::array();
        for (int b = 0; b < c.k(); ++b) row.push_back(c(x, y, a, b));
        pxy.push_back(std::move(row));
      }
      px.push_back(std::move(pxy));
    }
    p.push_back(std::move(px));
  }
  return json{{"n", c.n()}, {"k", c.k()}, {"p", p}};
}

Correlation correlation_from_json(const json& j) {
  const int n = positive_int(member(j, "n", "correlation"), "correlation.n");
  const int k = positive_int(member(j, "k", "correlation"), "correlation.k");
  const json& p = member(j, "p", "correlation");
  Correlation c(n, k);
  auto sized = [](const json& a, int len, const std::string& f) {
    if (!a.is_array() || static_cast<int>(a.size()) != len) schema(f, "expected an array of length " + std::to_string(len));
  };
  sized(p, n, "correlation.p");
  for (int x = 0; x < n; ++x) {
    const std::string fx = "correlation.p[" + std::to_string(x + 1) + "]";
    sized(p[static_cast<std::size_t>(x)], n, fx);
    for (int y = 0; y < n; ++y) {
      const std::string fy = fx + "[" + std::to_string(y + 1) + "]";
      const json& pxy = p[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      sized(pxy, k, fy);
      for (int a = 0; a < k; ++a) {
        const std::string fa = fy + "[" + std::to_string(a + 1) + "]";
        sized(pxy[static_cast<std::size_t>(a)], k, fa);
        for (int b = 0; b < k; ++b)
          c.at(x, y, a, b) = number(pxy[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                                    fa + "[" + std::to_string(b + 1) + "]");
      }
    }
  }
  return c;
}

json pvm_to_json(const PVMFamily& f) {
  json measures = json::array();
  for (const auto& m : f.measures) {
    json list = json::array();
    for (const CMatrix& p : m) list.push_back(matrix_to_json(p));
    measures.push_back(std::move(list));
  }
  return json{{"dim", f.dim}, {"measures", measures}};
}

PVMFamily pvm_from_json(const json& j) {
  PVMFamily f;
  f.dim = positive_int(member(j, "dim", "pvm"), "pvm.dim");
  const json& measures = member(j, "measures", "pvm");
  if (!measures.is_array() || measures.empty()) schema("pvm.measures", "expected a non-empty array");
  for (std::size_t x = 0; x < measures.size(); ++x) {
    const std::string fx = "pvm.measures[" + std::to_string(x + 1) + "]";
    if (!measures[x].is_array() || measures[x].empty()) schema(fx, "expected a non-empty array of matrices");
    std::vector<CMatrix> list;
    for (std::size_t a = 0; a < measures[x].size(); ++a)
      list.push_back(matrix_from_json(measures[x][a], fx + "[" + std::to_string(a + 1) + "]"));
    f.measures.push_back(std::move(list));
  }
  return f;
}

json state_to_json(const StateFunctional& s) { return json{{"rho", matrix_to_json(s.rho)}}; }

StateFunctional state_from_json(const json& j) {
  return StateFunctional{matrix_from_json(member(j, "rho", "state"), "state.rho")};
}

json generators_to_json(int n, int k, const std::vector<CMatrix>& qs) {
  json g = json::array();
  std::size_t i = 0;
  for (int x = 0; x < n; ++x) {
    json gx = json::array();
    for (int y = 0; y < n; ++y) {
      json gxy = json::array();
      for (int a = 0; a < k; ++a) {
        json row = json::array();
        for (int b = 0; b < k; ++b) row.push_back(matrix_to_json(qs[i++]));
        gxy.push_back(std::move(row));
      }
      gx.push_back(std::move(gxy));
    }
    g.push_back(std::move(gx));
  }
  return json{{"n", n}, {"k", k}, {"generators", g}};
}

std::vector<CMatrix> generators_from_json(const json& j, int& n, int& k) {
  n = positive_int(member(j, "n", "generators"), "generators.n");
  k = positive_int(member(j, "k", "generators"), "generators.k");
  const json& g = member(j, "generators", "generators");
  std::vector<CMatrix> out;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const std::string f = "generators.generators[" + std::to_string(x + 1) + "][" + std::to_string(y + 1) + "][" +
                                std::to_string(a + 1) + "][" + std::to_string(b + 1) + "]";
          try {
            out.push_back(matrix_from_json(g.at(static_cast<std::size_t>(x)).at(static_cast<std::size_t>(y))
                                               .at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b)), f));
          } catch (const json::exception&) {
            schema(f, "missing entry");
          }
        }
  return out;
}

CMatrix parse_matrix_expr(const std::string& raw, int d) {
  const std::string expr = trim(raw);
  if (expr.empty()) throw Error(ErrorKind::InvalidArgument, "empty matrix expression");
  if (expr == "eye" || expr == "I") return identity(d);
  if (expr == "zero" || expr == "0") return CMatrix::Zero(d, d);
  if (expr.rfind("diag(", 0) == 0 && expr.back() == ')') {
    const std::vector<double> v = parse_number_list(expr.substr(5, expr.size() - 6));
    return diag(Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (expr.front() == '[') return matrix_from_json(parse_json_text(expr, "matrix expression"), "matrix");
  const json j = read_json_file(expr);
  return matrix_from_json(j.is_object() && j.contains("matrix") ? j["matrix"] : j, expr);
}

json certificate_to_json(const ConeCertificate& c) {
  json probes = json::array();
  for (const EpsilonProbe& p : c.probes)
    probes.push_back(json{{"epsilon", p.epsilon},
                          {"best_t", p.best_t},
                          {"lambda_min", p.lambda_min},
                          {"cap_reached", p.cap_reached},
                          {"iterations", p.iterations},
                          {"shift", vector_to_json(p.shift)}});
  return json{{"decision", std::string(to_string(c.decision))},
              {"tol", c.tol},
              {"method", c.method},
              {"marginal", c.marginal},
              {"probes", probes}};
}

json verdict_to_json(const ProjectionVerdict& v) {
  const bool cert = v.certified();
  json out{{"status", cert ? "CertifiedUpTo" : "Rejected"},
           {"verdict", cert ? "CertifiedUpTo(" + std::to_string(v.n_max) + ")" : std::string("Rejected")},
           {"n_max", v.n_max},
           {"candidates", v.candidates},
           {"prechecks", json{{"contraction_ok", v.prechecks.contraction_ok},
                              {"unit_norm_ok", v.prechecks.unit_norm_ok},
                              {"unitality_ok", v.prechecks.unitality_ok},
                              {"alpha_m", v.prechecks.alpha_m}}}};
  if (v.witness) {
    out["witness"] = json{{"level", v.witness->level},
                          {"x", matrix_to_json(v.witness->x)},
                          {"lambda_min", v.witness->lambda_min},
                          {"quotient", certificate_to_json(v.witness->quotient)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json iso_report_to_json(const IsoReport& r) {
  return json{{"instances", r.instances},         {"evaluated", r.evaluated},
              {"agreements", r.agreements},       {"worst_margin", r.worst_margin},
              {"j_instances", r.j_instances},     {"j_agreements", r.j_agreements},
              {"j_max_compressed", r.j_max_compressed}, {"all_agree", r.all_agree()}};
}

json marginals_to_json(const Marginals& m) {
  auto rows = [](const RMatrix& r) {
    json out = json::array();
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < r.cols(); ++j) row.push_back(r(i, j));
      out.push_back(std::move(row));
    }
    return out;
  };
  return json{{"alice", rows(m.alice)}, {"bob", rows(m.bob)}};
}

json ns_opsys_to_json(const NSOperatorSystem& ns) {
  json verdicts = json::array();
  for (const GeneratorVerdict& g : ns.verdicts) {
    json item{{"index", json::array({g.a + 1, g.b + 1, g.x + 1, g.y + 1})},
              {"certified", g.certified},
              {"method", g.method}};
    if (g.verdict) item["verdict"] = verdict_to_json(*g.verdict);
    verdicts.push_back(std::move(item));
  }
  return json{{"n", ns.n},
              {"k", ns.k},
              {"dim", ns.system->ambient_dim()},
              {"system_dim", ns.system->dim()},
              {"non_signalling_ok", ns.non_signalling_ok},
              {"quantum_commuting_ok", ns.quantum_commuting_ok},
              {"generators", verdicts}};
}

json error_to_json(const std::exception& e) {
  json out{{"error", e.what()}};
  if (const auto* oe = dynamic_cast<const Error*>(&e)) {
    out["kind"] = std::string(to_string(oe->kind()));
    if (oe->has_detail()) {
      const ViolationDetail& d = oe->detail();
      out["detail"] = json{{"quantity", d.quantity}, {"indices", d.indices}, {"magnitude", d.magnitude}};
    }
  }
  return out;
}

void validate_config(const RunConfig& c) {
  if (!(c.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (c.eps_schedule.empty()) throw Error(ErrorKind::InvalidArgument, "eps schedule is empty");
  for (std::size_t i = 0; i < c.eps_schedule.size(); ++i) {
    if (!(c.eps_schedule[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps schedule must be positive");
    if (i > 0 && !(c.eps_schedule[i] < c.eps_schedule[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "eps schedule must be strictly decreasing");
  }
  if (c.n_max < 1) throw Error(ErrorKind::InvalidArgument, "n-max must be at least 1");
  if (c.budget < 0) throw Error(ErrorKind::InvalidArgument, "budget must be non-negative");
}

json config_to_json(const RunConfig& c) {
  return json{{"tol", c.tol},
              {"eps_schedule", vector_to_json(c.eps_schedule)},
              {"n_max", c.n_max},
              {"budget", c.budget},
              {"seed", c.seed}};
}

}  // namespace opsys::io
