#include "opsys/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <CLI11.hpp>

#include "opsys/error.hpp"
#include "opsys/sampling.hpp"

namespace opsys::cli {
namespace {

using io::json;

constexpr double kMarginFilter = 1e-6;

struct Result {
  int code = 0;
  json cert;
  std::string text;  // printed instead of the certificate when set
};

LevelElement element_from_expr(const OperatorSystemSpace& v, const std::string& expr) {
  const int d = v.ambient_dim();
  const CMatrix m = io::parse_matrix_expr(expr, d);
  if (m.rows() != m.cols() || m.rows() % d != 0)
    throw Error(ErrorKind::ShapeMismatch, "matrix size " + std::to_string(m.rows()) + " is not a multiple of " + std::to_string(d));
  return LevelElement::from_block(v, m);
}

ContractionData contraction_from(const SpacePtr& v, const std::string& expr) {
  return ContractionData(v, io::parse_matrix_expr(expr, v->ambient_dim()));
}

// ---- selftest suites ----

json suite_cone_equivalence(std::uint64_t seed, double tol) {
  Rng rng(seed);
  int evaluated = 0, agree = 0;
  for (int t = 0; t < 20; ++t) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 4);
    const ContractionData c(inst.v, inst.p);
    LevelElement x = random_hermitian_level(*inst.v, 1 + t % 2, rng);
    x = x + LevelElement::unit(*inst.v, x.level()) * (std::uniform_real_distribution<double>(-1, 1)(rng) - compressed_lambda_min(c, x));
    if (std::abs(compressed_lambda_min(c, x)) <= kMarginFilter) continue;
    ++evaluated;
    if (abstract_cone_membership(c, x, tol).member() == concrete_cone_membership(c, x, tol)) ++agree;
  }
  return json{{"evaluated", evaluated}, {"agreements", agree}, {"pass", evaluated > 0 && agree == evaluated}};
}

json suite_forward(std::uint64_t seed, double tol) {
  Rng rng(seed);
  int evaluated = 0, agree = 0;
  for (int t = 0; t < 10; ++t) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 3);
    const ProjectionContext ctx = make_projection_context(ContractionData(inst.v, inst.p));
    LevelElement x = random_hermitian_level(*inst.v, 1 + t % 2, rng);
    x = x + LevelElement::unit(*inst.v, x.level()) * (std::uniform_real_distribution<double>(-1, 1)(rng) - lambda_min(x.block()));
    if (std::abs(lambda_min(x.block())) <= kMarginFilter) continue;
    ++evaluated;
    if (forward_check(ctx, x, tol).agree) ++agree;
  }
  return json{{"evaluated", evaluated}, {"agreements", agree}, {"pass", evaluated > 0 && agree == evaluated}};
}

json suite_iso(std::uint64_t seed, double tol) {
  Rng rng(seed);
  const ProjectionInstance inst = random_projection_instance(rng, 2, 3);
  const QuotientSystem q = build_quotient(ContractionData(inst.v, inst.p));
  const IsoReport r = compression_iso_check(q, 2, 8, seed, tol, 4);
  json out = io::iso_report_to_json(r);
  out["pass"] = r.all_agree() && r.evaluated > 0;
  return out;
}

json suite_amplification(std::uint64_t seed) {
  Rng rng(seed);
  bool ok = true;
  json cases = json::array();
  for (int t = 0; t < 3; ++t) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 3);
    const ContractionData c(inst.v, inst.p);
    const JSubspace j = compute_J(c);
    const AmplificationReport r = verify_amplification(c, j, 2);
    const bool pass = r.dim_amplified == 4 * j.dim() && r.dim_amplified == r.dim_direct &&
                      r.amplified_in_direct <= 1e-8 && r.direct_in_amplified <= 1e-8;
    ok = ok && pass;
    cases.push_back(json{{"dim_J", j.dim()}, {"dim_amplified", r.dim_amplified}, {"dim_direct", r.dim_direct}, {"pass", pass}});
  }
  return json{{"cases", cases}, {"pass", ok}};
}

json suite_detector(const io::RunConfig& cfg) {
  const SpacePtr m2 = make_space(OperatorSystemSpace::full_matrix_algebra(2));
  DetectorOptions o;
  o.n_max = 2;
  o.budget = 100;
  o.seed = cfg.seed;
  o.tol = cfg.tol;
  o.eps_schedule = cfg.eps_schedule;
  const ProjectionVerdict honest = is_abstract_projection(ContractionData(m2, diag({1, 0})), o);
  const ContractionData bad(m2, diag({1, 0.3}));
  const ProjectionVerdict rejected = is_abstract_projection(bad, o);
  const bool witness_ok = rejected.witness && verify_witness(make_projection_context(bad, o.eps_schedule), *rejected.witness, o.tol);
  return json{{"projection", io::verdict_to_json(honest)},
              {"non_projection", io::verdict_to_json(rejected)},
              {"pass", honest.certified() && !rejected.certified() && witness_ok}};
}

json suite_unit_norm(std::uint64_t seed) {
  Rng rng(seed);
  bool ok = true;
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const ProjectionInstance inst = random_projection_instance(rng, 2, 4);
    const LevelElement p = LevelElement::from_block(*inst.v, inst.p);
    const double alpha = minimal_order_norm_hermitian(*inst.v, p);
    worst = std::max(worst, std::abs(alpha - 1.0));
    const QuotientSystem q = build_quotient(ContractionData(inst.v, inst.p));
    ok = ok && std::abs(alpha - 1.0) <= 1e-10 && !coset_reduce(q, p).is_zero(1e-8);
  }
  return json{{"worst_alpha_error", worst}, {"pass", ok}};
}

json suite_chsh(const io::RunConfig& cfg) {
  const auto [e, f] = tsirelson_pvms();
  const StateFunctional phi = maximally_entangled_state(2);
  const Correlation direct = qc_from_pvms(e, f, phi);
  const NSOperatorSystem ns = certify_quantum_commuting(build_ns_opsys(2, 2, pvm_products(e, f)), 1, 50, cfg.seed, cfg.tol);
  const Correlation via_state = correlation_from_state(ns, phi);
  double diff = 0.0;
  for (std::size_t i = 0; i < direct.values().size(); ++i)
    diff = std::max(diff, std::abs(direct.values()[i] - via_state.values()[i]));
  const double value = chsh_value(direct);
  const double classical = best_classical_chsh();
  return json{{"chsh", value},
              {"classical", classical},
              {"path_difference", diff},
              {"quantum_commuting_ok", ns.quantum_commuting_ok},
              {"pass", std::abs(value - 0.85355339) <= 1e-6 && diff <= 1e-10 && classical == 0.75 && ns.quantum_commuting_ok}};
}

json suite_scalar_embedding(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool ok = true;
  for (int t = 0; t < 5; ++t) {
    // mixtures of deterministic strategies are non-signalling
    double total = 0.0;
    std::vector<double> w(16);
    for (double& x : w) total += (x = u(rng));
    std::vector<double> values(16, 0.0);
    for (int s = 0; s < 16; ++s) {
      const Correlation det = deterministic_correlation(2, {s & 1, (s >> 1) & 1}, {(s >> 2) & 1, (s >> 3) & 1});
      for (std::size_t i = 0; i < values.size(); ++i) values[i] += w[static_cast<std::size_t>(s)] / total * det.values()[i];
    }
    const Correlation c(2, 2, std::move(values));
    const Correlation back = correlation_from_state(scalar_ns_opsys(c), StateFunctional{identity(1)});
    ok = ok && io::canonical_dump(io::correlation_to_json(c)) == io::canonical_dump(io::correlation_to_json(back));
  }
  return json{{"pass", ok}};
}

// ---- subcommands ----

Result cmd_cone_check(const io::RunConfig& cfg, const std::string& opsys, const std::string& x_expr, const std::string& p_expr) {
  const SpacePtr v = make_space(io::load_opsys(opsys));
  const LevelElement x = element_from_expr(*v, x_expr);
  Result r;
  if (p_expr.empty()) {
    const ConeCertificate c = cone_membership(*v, x, cfg.tol);
    r.cert = json{{"command", "cone-check"}, {"cone", "ambient"}, {"certificate", io::certificate_to_json(c)}};
    r.code = c.member() ? 0 : 1;
    return r;
  }
  const ContractionData c = contraction_from(v, p_expr);
  const ConeCertificate a = abstract_cone_membership(c, x, cfg.tol, cfg.eps_schedule);
  r.cert = json{{"command", "cone-check"}, {"cone", "compression"}, {"certificate", io::certificate_to_json(a)}};
  r.cert["concrete"] = c.is_projection() ? json(concrete_cone_membership(c, x, cfg.tol)) : json(nullptr);
  r.code = a.member() ? 0 : 1;
  return r;
}

Result cmd_compress(const io::RunConfig& cfg, const std::string& opsys, const std::string& p_expr) {
  const SpacePtr v = make_space(io::load_opsys(opsys));
  const ContractionData c = contraction_from(v, p_expr);
  QuotientOptions qo;
  qo.eps_schedule = cfg.eps_schedule;
  const QuotientSystem q = build_quotient(c, qo);
  Result r;
  r.cert = json{{"command", "compress"},
                {"dim_V", v->dim()},
                {"dim_J", q.J().dim()},
                {"dim_quotient", q.dim()},
                {"projection", c.is_projection()},
                {"J_heuristic", q.J().heuristic},
                {"unit_coset", q.unit_coset().size() ? io::matrix_to_json(q.unit_coset()) : json::array()}};
  return r;
}

Result cmd_detect(const io::RunConfig& cfg, const std::string& opsys, const std::string& p_expr) {
  const SpacePtr v = make_space(io::load_opsys(opsys));
  DetectorOptions o;
  o.n_max = cfg.n_max;
  o.budget = cfg.budget;
  o.seed = cfg.seed;
  o.tol = cfg.tol;
  o.eps_schedule = cfg.eps_schedule;
  const ProjectionVerdict verdict = is_abstract_projection(contraction_from(v, p_expr), o);
  Result r;
  r.cert = io::verdict_to_json(verdict);
  r.cert["command"] = "detect-projection";
  r.code = verdict.certified() ? 0 : 1;
  return r;
}

Result cmd_quotient_iso(const io::RunConfig& cfg, const std::string& opsys, const std::string& p_expr, int trials,
                        int j_trials) {
  const SpacePtr v = make_space(io::load_opsys(opsys));
  QuotientOptions qo;
  qo.eps_schedule = cfg.eps_schedule;
  const QuotientSystem q = build_quotient(contraction_from(v, p_expr), qo);
  const IsoReport rep = compression_iso_check(q, cfg.n_max, trials, cfg.seed, cfg.tol, j_trials);
  Result r;
  r.cert = io::iso_report_to_json(rep);
  r.cert["command"] = "quotient-iso";
  r.code = rep.all_agree() ? 0 : 1;
  return r;
}

Result cmd_block_check(const io::RunConfig& cfg, const std::string& opsys, const std::string& p_expr,
                       const std::string& a_expr, const std::string& b_expr, const std::string& c_expr) {
  const SpacePtr v = make_space(io::load_opsys(opsys));
  const ContractionData c = contraction_from(v, p_expr);
  const LevelElement a = element_from_expr(*v, a_expr);
  const LevelElement b = element_from_expr(*v, b_expr);
  const LevelElement x = element_from_expr(*v, c_expr);
  const bool general = block_cone_membership(c, a, b, x, cfg.tol, BlockPath::General);
  Result r;
  r.cert = json{{"command", "block-check"}, {"general", general}};
  if (c.is_projection()) {
    const bool fast = block_cone_membership(c, a, b, x, cfg.tol, BlockPath::Fast);
    r.cert["fast"] = fast;
    r.cert["agree"] = fast == general;
  } else {
    r.cert["fast"] = nullptr;
  }
  r.code = general ? 0 : 1;
  return r;
}

Result cmd_corr_validate(const std::string& in) {
  const Correlation corr = io::correlation_from_json(io::read_json_file(in));
  Result r;
  try {
    const Marginals m = validate_ns(corr);
    r.cert = json{{"command", "corr validate"}, {"valid", true}, {"marginals", io::marginals_to_json(m)}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SignallingViolation && e.kind() != ErrorKind::NotADistribution) throw;
    r.cert = io::error_to_json(e);
    r.cert["command"] = "corr validate";
    r.cert["valid"] = false;
    r.code = 1;
  }
  return r;
}

Result cmd_corr_from_pvm(const std::string& alice, const std::string& bob, const std::string& state) {
  const Correlation corr = qc_from_pvms(io::pvm_from_json(io::read_json_file(alice)), io::pvm_from_json(io::read_json_file(bob)),
                                        io::state_from_json(io::read_json_file(state)));
  Result r;
  r.cert = io::correlation_to_json(corr);
  return r;
}

Result cmd_corr_from_state(const io::RunConfig& cfg, const std::string& generators, const std::string& alice,
                           const std::string& bob, const std::string& state, bool certify) {
  NSOperatorSystem ns;
  if (!generators.empty()) {
    int n = 0, k = 0;
    const std::vector<CMatrix> qs = io::generators_from_json(io::read_json_file(generators), n, k);
    ns = build_ns_opsys(n, k, qs);
  } else {
    if (alice.empty() || bob.empty()) throw Error(ErrorKind::InvalidArgument, "give --generators or both --alice and --bob");
    const PVMFamily e = io::pvm_from_json(io::read_json_file(alice));
    const PVMFamily f = io::pvm_from_json(io::read_json_file(bob));
    validate_pvm(e);
    validate_pvm(f);
    if (e.dim != f.dim || e.n() != f.n() || e.k() != f.k())
      throw Error(ErrorKind::ShapeMismatch, "the two PVM families differ in shape");
    ns = build_ns_opsys(e.n(), e.k(), pvm_products(e, f));
  }
  if (certify) ns = certify_quantum_commuting(std::move(ns), cfg.n_max, cfg.budget, cfg.seed, cfg.tol);
  const Correlation corr = correlation_from_state(ns, io::state_from_json(io::read_json_file(state)));
  Result r;
  r.cert = json{{"command", "corr from-state"}, {"correlation", io::correlation_to_json(corr)}, {"ns", io::ns_opsys_to_json(ns)}};
  r.code = certify && !ns.quantum_commuting_ok ? 1 : 0;
  return r;
}

Result cmd_corr_chsh(const std::string& in) {
  const json j = io::read_json_file(in);
  const Correlation corr = io::correlation_from_json(j.contains("correlation") ? j["correlation"] : j);
  const double value = chsh_value(corr);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7f", value);
  Result r;
  r.cert = json{{"command", "corr chsh"}, {"chsh", value}};
  r.text = buf;
  return r;
}

}  // namespace

io::json run_selftest(const io::RunConfig& config) {
  const std::vector<std::pair<std::string, std::function<json()>>> suites{
      {"cone_equivalence", [&] { return suite_cone_equivalence(config.seed + 1, config.tol); }},
      {"forward_check", [&] { return suite_forward(config.seed + 2, config.tol); }},
      {"compression_iso", [&] { return suite_iso(config.seed + 3, config.tol); }},
      {"amplification", [&] { return suite_amplification(config.seed + 4); }},
      {"detector", [&] { return suite_detector(config); }},
      {"unit_norm", [&] { return suite_unit_norm(config.seed + 5); }},
      {"chsh", [&] { return suite_chsh(config); }},
      {"scalar_embedding", [&] { return suite_scalar_embedding(config.seed + 6); }},
  };
  json results = json::object();
  bool pass = true;
  for (const auto& [name, run] : suites) {
    json r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = io::error_to_json(e);
      r["pass"] = false;
    }
    pass = pass && r["pass"].get<bool>();
    results[name] = std::move(r);
  }
  return json{{"command", "selftest"}, {"config", io::config_to_json(config)}, {"suites", results}, {"pass", pass}};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator systems, compression cones and abstract projections", "opsys"};
  app.require_subcommand(1);
  app.fallthrough();

  io::RunConfig cfg;
  app.add_option("--output", cfg.output, "Write the JSON certificate to this file");
  app.add_option("--seed", cfg.seed, "Random seed (OPSYS_SEED overrides)");
  app.add_option("--tol", cfg.tol, "Positivity tolerance");
  app.add_option("--eps", cfg.eps_schedule, "Descending epsilon schedule")->delimiter(',');
  app.add_option("--n-max", cfg.n_max, "Highest matrix level to search");
  app.add_option("--budget", cfg.budget, "Candidate budget per level");

  std::string opsys, x_expr, p_expr, a_expr, b_expr, c_expr, in, alice, bob, state, generators;
  int trials = 50, j_trials = 10;
  bool certify = false;

  auto* cone = app.add_subcommand("cone-check", "Decide x ∈ C_n, or x ∈ C(p_n) when --p is given");
  cone->add_option("--opsys", opsys)->required();
  cone->add_option("--x", x_expr)->required();
  cone->add_option("--p", p_expr);

  auto* compress = app.add_subcommand("compress", "Build J_p and the quotient V/J_p");
  compress->add_option("--opsys", opsys)->required();
  compress->add_option("--p", p_expr)->required();

  auto* detect = app.add_subcommand("detect-projection", "Search for witnesses that p is not an abstract projection");
  detect->add_option("--opsys", opsys)->required();
  detect->add_option("--p", p_expr)->required();

  auto* iso = app.add_subcommand("quotient-iso", "Compare quotient cones with compressions to range(p_n)");
  iso->add_option("--opsys", opsys)->required();
  iso->add_option("--p", p_expr)->required();
  iso->add_option("--trials", trials);
  iso->add_option("--j-trials", j_trials);

  auto* block = app.add_subcommand("block-check", "Decide [[a, c], [c*, b]] ∈ C(p_n ⊕ q_n)");
  block->add_option("--opsys", opsys)->required();
  block->add_option("--p", p_expr)->required();
  block->add_option("--a", a_expr)->required();
  block->add_option("--b", b_expr)->required();
  block->add_option("--c", c_expr)->required();

  auto* corr = app.add_subcommand("corr", "Correlations");
  corr->require_subcommand(1);
  auto* validate = corr->add_subcommand("validate", "Check a correlation is non-signalling");
  validate->add_option("--in", in)->required();
  auto* from_pvm = corr->add_subcommand("from-pvm", "p(a,b|x,y) = tr(ρ E F) from commuting PVMs");
  from_pvm->add_option("--alice", alice)->required();
  from_pvm->add_option("--bob", bob)->required();
  from_pvm->add_option("--state", state)->required();
  auto* from_state = corr->add_subcommand("from-state", "p(a,b|x,y) = tr(ρ Q(a,b|x,y)) on a non-signalling system");
  from_state->add_option("--generators", generators);
  from_state->add_option("--alice", alice);
  from_state->add_option("--bob", bob);
  from_state->add_option("--state", state)->required();
  from_state->add_flag("--certify", certify, "Also certify every generator as an abstract projection");
  auto* chsh = corr->add_subcommand("chsh", "CHSH winning probability");
  chsh->add_option("--in", in)->required();

  auto* selftest = app.add_subcommand("selftest", "Run the deterministic invariant suites");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Result r;
  try {
    if (const char* env = std::getenv("OPSYS_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "OPSYS_SEED is not an unsigned integer");
      }
    }
    io::validate_config(cfg);
    if (*cone) {
      r = cmd_cone_check(cfg, opsys, x_expr, p_expr);
    } else if (*compress) {
      r = cmd_compress(cfg, opsys, p_expr);
    } else if (*detect) {
      r = cmd_detect(cfg, opsys, p_expr);
    } else if (*iso) {
      r = cmd_quotient_iso(cfg, opsys, p_expr, trials, j_trials);
    } else if (*block) {
      r = cmd_block_check(cfg, opsys, p_expr, a_expr, b_expr, c_expr);
    } else if (*validate) {
      r = cmd_corr_validate(in);
    } else if (*from_pvm) {
      r = cmd_corr_from_pvm(alice, bob, state);
    } else if (*from_state) {
      r = cmd_corr_from_state(cfg, generators, alice, bob, state, certify);
    } else if (*chsh) {
      r = cmd_corr_chsh(in);
    } else if (*selftest) {
      r.cert = run_selftest(cfg);
      r.code = r.cert["pass"].get<bool>() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    if (!cfg.output.empty()) {
      try {
        io::write_text_file(cfg.output, io::canonical_dump(io::error_to_json(e)) + "\n");
      } catch (const std::exception&) {
      }
    }
    return 2;
  }

  const std::string dumped = io::canonical_dump(r.cert) + "\n";
  out << (r.text.empty() ? dumped : r.text + "\n");
  if (!cfg.output.empty()) {
    try {
      io::write_text_file(cfg.output, dumped);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return r.code;
}

}  // namespace opsys::cli
