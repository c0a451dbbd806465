// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "opsys/cli.hpp"
#include "opsys/error.hpp"
#include "opsys/sampling.hpp"

using namespace opsys;

namespace {

constexpr double kMargin = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Hermitian x with λ_min of `shift_of(x)` moved to a random value in [-1, 1].
LevelElement shifted(const OperatorSystemSpace& v, int n, Rng& rng, const std::function<double(const LevelElement&)>& shift_of) {
  LevelElement x = random_hermitian_level(v, n, rng);
  return x + LevelElement::unit(v, n) * (uniform(rng, -1, 1) - shift_of(x));
}

Outcome cone_equivalence() {
  Rng rng(1001);
  int evaluated = 0, agree = 0;
  while (evaluated < 200) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 5);
    const ContractionData c(inst.v, inst.p);
    const int n = 1 + static_cast<int>(rng() % 3);
    const LevelElement x = shifted(*inst.v, n, rng, [&](const LevelElement& y) { return compressed_lambda_min(c, y); });
    if (std::abs(compressed_lambda_min(c, x)) <= kMargin) continue;
    ++evaluated;
    agree += abstract_cone_membership(c, x).member() == concrete_cone_membership(c, x);
  }
  return {agree == evaluated, fmt("%d/%d agree", agree, evaluated)};
}

Outcome forward() {
  Rng rng(1002);
  int evaluated = 0, agree = 0;
  while (evaluated < 200) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 4);
    const ProjectionContext ctx = make_projection_context(ContractionData(inst.v, inst.p));
    const int n = 1 + static_cast<int>(rng() % 2);
    const LevelElement x = shifted(*inst.v, n, rng, [](const LevelElement& y) { return lambda_min(y.block()); });
    if (std::abs(lambda_min(x.block())) <= kMargin) continue;
    ++evaluated;
    agree += forward_check(ctx, x).agree;
  }
  return {agree == evaluated, fmt("%d/%d agree", agree, evaluated)};
}

Outcome compression_iso() {
  Rng rng(1003);
  int instances = 0, agreements = 0, j_instances = 0, j_agreements = 0;
  for (std::uint64_t s = 0; instances < 100 || j_instances < 20; ++s) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 4);
    const QuotientSystem q = build_quotient(ContractionData(inst.v, inst.p));
    const IsoReport r = compression_iso_check(q, 3, 12, 2000 + s, kDefaultPsdTol, 3);
    instances += r.evaluated;
    agreements += r.agreements;
    j_instances += r.j_instances;
    j_agreements += r.j_agreements;
  }
  return {agreements == instances && j_agreements == j_instances,
          fmt("%d/%d agree, %d/%d in J", agreements, instances, j_agreements, j_instances)};
}

Outcome amplification() {
  Rng rng(1004);
  int cases = 0, good = 0;
  double worst = 0.0;
  for (; cases < 50; ++cases) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 4);
    const ContractionData c(inst.v, inst.p);
    const JSubspace j = compute_J(c);
    const int n = 2 + cases % 2;
    const AmplificationReport r = verify_amplification(c, j, n);
    worst = std::max({worst, r.amplified_in_direct, r.direct_in_amplified});
    good += r.dim_amplified == n * n * j.dim() && r.dim_amplified == r.dim_direct && r.amplified_in_direct <= 1e-8 &&
            r.direct_in_amplified <= 1e-8;
  }
  return {good == cases, fmt("%d/%d, worst residual %.2e", good, cases, worst)};
}

std::vector<ContractionData> honest_fixtures() {
  std::vector<ContractionData> out;
  const SpacePtr m2 = make_space(OperatorSystemSpace::full_matrix_algebra(2));
  const SpacePtr m3 = make_space(OperatorSystemSpace::full_matrix_algebra(3));
  out.emplace_back(m2, diag({1, 0}));
  out.emplace_back(m3, diag({1, 1, 0}));
  out.emplace_back(m3, diag({0, 1, 0}));
  Rng rng(1005);
  while (out.size() < 32) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 5);
    out.emplace_back(inst.v, inst.p);
  }
  return out;
}

Outcome detector() {
  int certified = 0, total = 0;
  for (const ContractionData& c : honest_fixtures()) {
    ++total;
    certified += is_abstract_projection(c).certified();
  }
  const SpacePtr m2 = make_space(OperatorSystemSpace::full_matrix_algebra(2));
  const SpacePtr m3 = make_space(OperatorSystemSpace::full_matrix_algebra(3));
  const std::vector<ContractionData> bad{ContractionData(m2, diag({0.5, 0.5})), ContractionData(m2, diag({1, 0.3})),
                                         ContractionData(m3, diag({1, 1, 0.7}))};
  int rejected = 0;
  for (const ContractionData& c : bad) {
    const ProjectionVerdict v = is_abstract_projection(c);
    if (v.certified() || !v.witness || v.witness->lambda_min > -1e-7) continue;
    rejected += verify_witness(make_projection_context(c), *v.witness);
  }
  return {certified == total && rejected == 3, fmt("%d/%d certified, %d/3 rejected with witness", certified, total, rejected)};
}

Outcome unit_norm() {
  int good = 0, total = 0;
  double worst = 0.0;
  for (const ContractionData& c : honest_fixtures()) {
    ++total;
    const LevelElement p = LevelElement::from_block(c.system(), c.p());
    const double alpha = minimal_order_norm_hermitian(c.system(), p);
    worst = std::max(worst, std::abs(alpha - 1.0));
    good += std::abs(alpha - 1.0) <= 1e-10 && !coset_reduce(build_quotient(c), p).is_zero(1e-8);
  }
  bool trivial = false;
  try {
    build_quotient(ContractionData(make_space(OperatorSystemSpace::full_matrix_algebra(2)), CMatrix::Zero(2, 2)));
  } catch (const Error& e) {
    trivial = e.kind() == ErrorKind::TrivialUnit;
  }
  return {good == total && trivial, fmt("%d/%d, worst |alpha-1| %.2e, zero raises %s", good, total, worst, trivial ? "TrivialUnit" : "nothing")};
}

Outcome rescaling() {
  Rng rng(1007);
  int maps = 0, good_maps = 0, evaluated = 0, agree = 0;
  for (; maps < 20; ++maps) {
    const int d = 2 + maps % 3;
    const SpacePtr v = make_space(OperatorSystemSpace::full_matrix_algebra(d));
    const ProjectionContext ctx = make_projection_context(ContractionData(v, random_projection(d, 1 + maps % (d - 1), rng)));
    const QuotientMap phi = random_admissible_ucp(ctx, 2 + maps % 3, rng);
    const RescaledMap psi = rescale_ucp(ctx, phi);
    const CMatrix zero = CMatrix::Zero(d, d);
    const CMatrix pp = psi.psi.apply(direct_sum(ctx.c.p(), zero));
    const CMatrix qq = psi.psi.apply(direct_sum(zero, ctx.c.q()));
    bool ok = (pp * pp - pp).norm() <= 1e-9 && (pp + qq - identity(psi.psi.out_dim())).norm() <= 1e-9;
    int here = 0;
    for (int s = 0; here < 50 && s < 500; ++s) {
      const int k = 1 + s % 2;
      const double shift = s % 2 ? 3.0 : 0.5;
      const LevelElement a = random_hermitian_level(*v, k, rng) + LevelElement::unit(*v, k) * shift;
      const LevelElement c = random_hermitian_level(*v, k, rng) + LevelElement::unit(*v, k) * shift;
      const LevelElement b = random_level(*v, k, rng) * 0.5;
      const TransferSample ts = positivity_transfer(ctx, phi, psi, a, b, c);
      if (std::abs(ts.phi_lambda_min) <= kMargin || std::abs(ts.psi_lambda_min) <= kMargin) continue;
      ++here;
      const bool same = (ts.phi_lambda_min > 0) == (ts.psi_lambda_min > 0);
      agree += same;
      ok = ok && same;
    }
    evaluated += here;
    good_maps += ok && here >= 50;
  }
  return {good_maps == maps, fmt("%d/%d maps, %d/%d transfers agree", good_maps, maps, agree, evaluated)};
}

Outcome chsh() {
  const auto [e, f] = tsirelson_pvms();
  const StateFunctional phi = maximally_entangled_state(2);
  const Correlation direct = qc_from_pvms(e, f, phi);
  const NSOperatorSystem ns = certify_quantum_commuting(build_ns_opsys(2, 2, pvm_products(e, f)));
  const Correlation via = correlation_from_state(ns, phi);
  double diff = 0.0;
  for (std::size_t i = 0; i < direct.values().size(); ++i) diff = std::max(diff, std::abs(direct.values()[i] - via.values()[i]));
  const double value = chsh_value(direct);
  const double classical = best_classical_chsh();
  return {std::abs(value - 0.85355339) <= 1e-6 && diff <= 1e-10 && ns.quantum_commuting_ok && classical == 0.75,
          fmt("value %.9f, path difference %.1e, classical %.17g, qc %s", value, diff, classical,
              ns.quantum_commuting_ok ? "ok" : "failed")};
}

Outcome scalar_embedding() {
  int total = 0, good = 0;
  for (const auto& entry : std::filesystem::directory_iterator(OPSYS_TEST_DATA)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("ns_", 0) != 0 || entry.path().extension() != ".json") continue;
    ++total;
    const Correlation c = io::correlation_from_json(io::read_json_file(entry.path().string()));
    const Correlation back = correlation_from_state(scalar_ns_opsys(c), StateFunctional{identity(1)});
    good += io::canonical_dump(io::correlation_to_json(c)) == io::canonical_dump(io::correlation_to_json(back));
  }
  return {total > 0 && good == total, fmt("%d/%d fixtures", good, total)};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "opsys_acceptance_a.json").string();
  const std::string b = (dir / "opsys_acceptance_b.json").string();
  std::ostringstream out, err;
  const int ca = cli::run_cli({"selftest", "--seed", "17", "--output", a}, out, err);
  const int cb = cli::run_cli({"selftest", "--seed", "17", "--output", b}, out, err);
  const std::string sa = slurp(a), sb = slurp(b);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  return {ca == 0 && cb == 0 && !sa.empty() && sa == sb, fmt("exit %d/%d, %zu bytes, identical %s", ca, cb, sa.size(), sa == sb ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limit_s;
  };
  const std::vector<Criterion> criteria{
      {"cone_equivalence", cone_equivalence, 120},   {"forward_check", forward, 120},
      {"compression_iso", compression_iso, 120},     {"amplification", amplification, 120},
      {"detector", detector, 600},                   {"unit_norm", unit_norm, 120},
      {"rescaling", rescaling, 120},                 {"chsh", chsh, 10},
      {"scalar_embedding", scalar_embedding, 120},   {"determinism", determinism, 120},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < criteria[i].limit_s;
    failures += !pass;
    std::printf("%-4s %-18s %s  %s (%.1fs)\n", fmt("%zu", i + 1).c_str(), criteria[i].name, pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
