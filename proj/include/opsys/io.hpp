#pragma once

// JSON formats. Matrices are arrays of rows, complex entries [re, im].
// Indices in files are 1-based positions in nested arrays.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opsys/correlations.hpp"
#include "opsys/ucp.hpp"

namespace opsys::io {

using json = nlohmann::json;

/// Sorted keys, doubles as %.17g, non-finite numbers as null.
std::string canonical_dump(const json& j);
json parse_json_text(const std::string& text, const std::string& origin);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

json matrix_to_json(const CMatrix& m);
/// `field` names the location in error messages. Throws SchemaError.
CMatrix matrix_from_json(const json& j, const std::string& field);

json opsys_to_json(const OperatorSystemSpace& v);
/// {"dim": d, "basis": [matrix...], "unit": matrix}. Throws SchemaError or
/// InvariantViolation.
OperatorSystemSpace opsys_from_json(const json& j);
OperatorSystemSpace load_opsys(const std::string& path);

/// {"n": n, "k": k, "p": p[x][y][a][b]}.
json correlation_to_json(const Correlation& c);
Correlation correlation_from_json(const json& j);

/// {"dim": d, "measures": [[matrix...]...]}.
json pvm_to_json(const PVMFamily& f);
PVMFamily pvm_from_json(const json& j);

/// {"rho": matrix}.
json state_to_json(const StateFunctional& s);
StateFunctional state_from_json(const json& j);

/// {"n": n, "k": k, "generators": Q[x][y][a][b]}.
json generators_to_json(int n, int k, const std::vector<CMatrix>& qs);
std::vector<CMatrix> generators_from_json(const json& j, int& n, int& k);

/// "diag(1,0)", "eye", "zero", an inline JSON matrix, or a path to a JSON
/// matrix file. `d` sizes eye and zero.
CMatrix parse_matrix_expr(const std::string& expr, int d);

json certificate_to_json(const ConeCertificate& c);
json verdict_to_json(const ProjectionVerdict& v);
json iso_report_to_json(const IsoReport& r);
json marginals_to_json(const Marginals& m);
json ns_opsys_to_json(const NSOperatorSystem& ns);
json error_to_json(const std::exception& e);

struct RunConfig {
  double tol = kDefaultPsdTol;
  std::vector<double> eps_schedule = default_eps_schedule();
  int n_max = 3;
  int budget = 2000;
  std::uint64_t seed = 0;
  std::string output;
};

/// Throws InvalidArgument.
void validate_config(const RunConfig& c);
json config_to_json(const RunConfig& c);

}  // namespace opsys::io
