#pragma once

#include <string>
#include <vector>

namespace opsys {

enum class Decision { Member, NotMember };

inline const char* to_string(Decision d) { return d == Decision::Member ? "Member" : "NotMember"; }

/// Evidence gathered at one value of ε. For plain positivity tests ε = 0 and
/// `best_t` is unused.
struct EpsilonProbe {
  double epsilon = 0.0;
  double best_t = 0.0;
  double lambda_min = 0.0;  // best achieved smallest eigenvalue
  bool cap_reached = false;
  int iterations = 0;
  std::vector<double> shift;  // quotient shift coefficients, general path only
};

struct ConeCertificate {
  Decision decision = Decision::NotMember;
  double tol = 0.0;
  std::string method;
  std::vector<EpsilonProbe> probes;
  bool marginal = false;

  bool member() const { return decision == Decision::Member; }
  /// Achieved value at the smallest ε, which is what the decision rests on.
  double margin() const { return probes.empty() ? 0.0 : probes.back().lambda_min; }
};

}  // namespace opsys
