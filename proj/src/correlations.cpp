#include "opsys/correlations.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "opsys/error.hpp"

namespace opsys {
namespace {

std::string idx(std::initializer_list<int> one_based) {
  std::string out = "(";
  bool first = true;
  for (const int i : one_based) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + ")";
}

CMatrix ray_projection(double theta) {
  CVector v(2);
  v << std::cos(theta), std::sin(theta);
  return v * v.adjoint();
}

struct Worst {
  double magnitude = 0.0;
  std::vector<int> indices;
  void offer(double m, std::vector<int> i) {
    if (m > magnitude) {
      magnitude = m;
      indices = std::move(i);
    }
  }
};

}  // namespace

Correlation::Correlation(int n, int k) : Correlation(n, k, std::vector<double>(static_cast<std::size_t>(n * n * k * k))) {}

Correlation::Correlation(int n, int k, std::vector<double> values) : n_(n), k_(k), values_(std::move(values)) {
  if (n <= 0 || k <= 0) throw Error(ErrorKind::ShapeMismatch, "correlation needs n, k >= 1");
  if (values_.size() != static_cast<std::size_t>(n * n * k * k))
    throw Error(ErrorKind::ShapeMismatch, "correlation tensor has the wrong number of entries");
}

Marginals validate_ns(const Correlation& corr, double tol) {
  const int n = corr.n();
  const int k = corr.k();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      double sum = 0.0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const double v = corr(x, y, a, b);
          if (!std::isfinite(v) || v < -kEntryFloor)
            throw Error(ErrorKind::NotADistribution, "negative entry p" + idx({a + 1, b + 1, x + 1, y + 1}),
                        {"entry", {a + 1, b + 1, x + 1, y + 1}, v});
          sum += v;
        }
      if (std::abs(sum - 1.0) > tol)
        throw Error(ErrorKind::NotADistribution, "p(.,.|" + std::to_string(x + 1) + "," + std::to_string(y + 1) + ") sums to " + std::to_string(sum),
                    {"normalization", {x + 1, y + 1}, std::abs(sum - 1.0)});
    }

  Marginals m{RMatrix::Zero(n, k), RMatrix::Zero(n, k)};
  auto alice = [&](int x, int y, int a) {
    double s = 0.0;
    for (int b = 0; b < k; ++b) s += corr(x, y, a, b);
    return s;
  };
  auto bob = [&](int x, int y, int b) {
    double s = 0.0;
    for (int a = 0; a < k; ++a) s += corr(x, y, a, b);
    return s;
  };
  Worst wa;
  Worst wb;
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < k; ++a) {
      m.alice(x, a) = alice(x, 0, a);
      for (int y = 1; y < n; ++y) wa.offer(std::abs(alice(x, y, a) - m.alice(x, a)), {x + 1, a + 1, 1, y + 1});
    }
  for (int y = 0; y < n; ++y)
    for (int b = 0; b < k; ++b) {
      m.bob(y, b) = bob(0, y, b);
      for (int x = 1; x < n; ++x) wb.offer(std::abs(bob(x, y, b) - m.bob(y, b)), {y + 1, b + 1, 1, x + 1});
    }
  if (wa.magnitude > tol)
    throw Error(ErrorKind::SignallingViolation, "Alice's marginal depends on y", {"alice_marginal", wa.indices, wa.magnitude});
  if (wb.magnitude > tol)
    throw Error(ErrorKind::SignallingViolation, "Bob's marginal depends on x", {"bob_marginal", wb.indices, wb.magnitude});
  return m;
}

void validate_pvm(const PVMFamily& f, double tol) {
  if (f.dim <= 0 || f.measures.empty()) throw Error(ErrorKind::ShapeMismatch, "empty PVM family");
  const int k = f.k();
  for (int x = 0; x < f.n(); ++x) {
    const auto& m = f.measures[static_cast<std::size_t>(x)];
    if (static_cast<int>(m.size()) != k || k == 0) throw Error(ErrorKind::ShapeMismatch, "measurements differ in outcome count");
    CMatrix sum = CMatrix::Zero(f.dim, f.dim);
    for (int a = 0; a < k; ++a) {
      const CMatrix& p = m[static_cast<std::size_t>(a)];
      if (p.rows() != f.dim || p.cols() != f.dim) throw Error(ErrorKind::ShapeMismatch, "PVM element has the wrong size");
      if (!spectral_projection_oracle(p, tol))
        throw Error(ErrorKind::NotAProjection, "P" + idx({x + 1, a + 1}) + " is not a projection");
      sum += p;
    }
    const double err = (sum - identity(f.dim)).norm();
    if (err > tol)
      throw Error(ErrorKind::InvariantViolation, "measurement " + std::to_string(x + 1) + " does not sum to I",
                  {"pvm_sum", {x + 1}, err});
  }
}

void validate_state(const StateFunctional& s, int dim, double tol) {
  if (s.rho.rows() != dim || s.rho.cols() != dim)
    throw Error(ErrorKind::InvalidState, "density matrix is " + std::to_string(s.rho.rows()) + "x" +
                                             std::to_string(s.rho.cols()) + ", expected " + std::to_string(dim));
  if (!is_hermitian(s.rho, tol)) throw Error(ErrorKind::InvalidState, "density matrix is not Hermitian");
  const double lam = lambda_min(hermitian_part(s.rho));
  if (lam < -tol) throw Error(ErrorKind::InvalidState, "density matrix is not positive", {"lambda_min", {}, lam});
  const double tr = s.rho.trace().real();
  if (std::abs(tr - 1.0) > tol) throw Error(ErrorKind::InvalidState, "trace is " + std::to_string(tr), {"trace", {}, tr});
}

Correlation qc_from_pvms(const PVMFamily& e, const PVMFamily& f, const StateFunctional& state, double commute_tol) {
  validate_pvm(e);
  validate_pvm(f);
  if (e.dim != f.dim || e.n() != f.n() || e.k() != f.k())
    throw Error(ErrorKind::ShapeMismatch, "the two PVM families differ in shape");
  validate_state(state, e.dim);
  const int n = e.n();
  const int k = e.k();
  Worst w;
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < k; ++a)
      for (int y = 0; y < n; ++y)
        for (int b = 0; b < k; ++b) {
          const CMatrix& ea = e.measures[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
          const CMatrix& fb = f.measures[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)];
          w.offer((ea * fb - fb * ea).norm(), {x + 1, a + 1, y + 1, b + 1});
        }
  if (w.magnitude >= commute_tol)
    throw Error(ErrorKind::CommutationViolation, "E and F do not commute at (x,a,y,b)=" + idx({w.indices[0], w.indices[1], w.indices[2], w.indices[3]}),
                {"commutator", w.indices, w.magnitude});

  std::vector<double> values;
  for (const CMatrix& q : pvm_products(e, f)) values.push_back((state.rho * q).trace().real());
  return Correlation(n, k, std::move(values));
}

std::vector<CMatrix> pvm_products(const PVMFamily& e, const PVMFamily& f) {
  const int n = e.n();
  const int k = e.k();
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(n * n * k * k));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          out.push_back(e.measures[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)] *
                        f.measures[static_cast<std::size_t>(y)][static_cast<std::size_t>(b)]);
  return out;
}

NSOperatorSystem build_ns_opsys(int n, int k, const std::vector<CMatrix>& generators, double tol) {
  if (n <= 0 || k <= 0 || generators.size() != static_cast<std::size_t>(n * n * k * k))
    throw Error(ErrorKind::ShapeMismatch, "generator tensor has the wrong number of entries");
  const int d = static_cast<int>(generators.front().rows());
  NSOperatorSystem ns;
  ns.n = n;
  ns.k = k;
  ns.generators = generators;
  for (CMatrix& q : ns.generators) {
    if (q.rows() != d || q.cols() != d) throw Error(ErrorKind::ShapeMismatch, "generators differ in size");
    require_hermitian(q);
    q = hermitian_part(q);
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      CMatrix sum = CMatrix::Zero(d, d);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const double lam = lambda_min(ns.q(x, y, a, b));
          if (lam < -tol)
            throw Error(ErrorKind::NotNonSignalling, "Q" + idx({a + 1, b + 1, x + 1, y + 1}) + " is not positive",
                        {"positivity", {a + 1, b + 1, x + 1, y + 1}, -lam});
          sum += ns.q(x, y, a, b);
        }
      const double err = (sum - identity(d)).norm();
      if (err > tol)
        throw Error(ErrorKind::NotNonSignalling, "sum over a,b of Q(a,b|" + std::to_string(x + 1) + "," + std::to_string(y + 1) + ") is not e",
                    {"unit_sum", {x + 1, y + 1}, err});
    }
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < k; ++a)
      for (int y = 1; y < n; ++y) {
        CMatrix diff = CMatrix::Zero(d, d);
        for (int b = 0; b < k; ++b) diff += ns.q(x, y, a, b) - ns.q(x, 0, a, b);
        if (diff.norm() > tol)
          throw Error(ErrorKind::NotNonSignalling, "E(" + std::to_string(a + 1) + "|" + std::to_string(x + 1) + ") depends on y",
                      {"alice_marginal", {x + 1, a + 1, 1, y + 1}, diff.norm()});
      }
  for (int y = 0; y < n; ++y)
    for (int b = 0; b < k; ++b)
      for (int x = 1; x < n; ++x) {
        CMatrix diff = CMatrix::Zero(d, d);
        for (int a = 0; a < k; ++a) diff += ns.q(x, y, a, b) - ns.q(0, y, a, b);
        if (diff.norm() > tol)
          throw Error(ErrorKind::NotNonSignalling, "F(" + std::to_string(b + 1) + "|" + std::to_string(y + 1) + ") depends on x",
                      {"bob_marginal", {y + 1, b + 1, 1, x + 1}, diff.norm()});
      }
  ns.system = make_space(OperatorSystemSpace::from_spanning_set(d, ns.generators));
  ns.non_signalling_ok = true;
  return ns;
}

NSOperatorSystem scalar_ns_opsys(const Correlation& corr, double tol) {
  std::vector<CMatrix> qs;
  qs.reserve(corr.values().size());
  for (const double v : corr.values()) qs.push_back(CMatrix::Constant(1, 1, cplx(v, 0.0)));
  return build_ns_opsys(corr.n(), corr.k(), qs, tol);
}

NSOperatorSystem certify_quantum_commuting(NSOperatorSystem ns, int n_max, int budget, std::uint64_t seed, double tol) {
  if (!ns.non_signalling_ok) throw Error(ErrorKind::NotNonSignalling, "system has not been validated");
  ns.verdicts.clear();
  ns.quantum_commuting_ok = true;
  for (int x = 0; x < ns.n; ++x)
    for (int y = 0; y < ns.n; ++y)
      for (int a = 0; a < ns.k; ++a)
        for (int b = 0; b < ns.k; ++b) {
          GeneratorVerdict g{x, y, a, b, false, "spectral", std::nullopt};
          const CMatrix& q = ns.q(x, y, a, b);
          if (spectral_projection_oracle(q)) {
            g.certified = true;
          } else {
            DetectorOptions o;
            o.n_max = n_max;
            o.budget = budget;
            o.seed = seed;
            o.tol = tol;
            g.method = "detector";
            g.verdict = is_abstract_projection(ContractionData(ns.system, q), o);
            g.certified = g.verdict->certified();
          }
          ns.quantum_commuting_ok = ns.quantum_commuting_ok && g.certified;
          ns.verdicts.push_back(std::move(g));
        }
  return ns;
}

Correlation correlation_from_state(const NSOperatorSystem& ns, const StateFunctional& state) {
  if (!ns.non_signalling_ok) throw Error(ErrorKind::NotNonSignalling, "system has not been validated");
  validate_state(state, ns.system->ambient_dim());
  std::vector<double> values;
  values.reserve(ns.generators.size());
  for (const CMatrix& q : ns.generators) values.push_back((state.rho * q).trace().real());
  return Correlation(ns.n, ns.k, std::move(values));
}

CMatrix alice_marginal_operator(const NSOperatorSystem& ns, int x, int a) {
  CMatrix out = CMatrix::Zero(ns.system->ambient_dim(), ns.system->ambient_dim());
  for (int b = 0; b < ns.k; ++b) out += ns.q(x, 0, a, b);
  return out;
}

CMatrix bob_marginal_operator(const NSOperatorSystem& ns, int y, int b) {
  CMatrix out = CMatrix::Zero(ns.system->ambient_dim(), ns.system->ambient_dim());
  for (int a = 0; a < ns.k; ++a) out += ns.q(0, y, a, b);
  return out;
}

double chsh_value(const Correlation& corr) {
  if (corr.n() != 2 || corr.k() != 2) throw Error(ErrorKind::ShapeMismatch, "CHSH needs two inputs and two outputs");
  double win = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) win += corr(x, y, a, b);
  return win / 4.0;
}

std::pair<PVMFamily, PVMFamily> tsirelson_pvms() {
  const double pi = std::numbers::pi;
  const CMatrix i2 = identity(2);
  auto family = [&](double t0, double t1, bool alice) {
    PVMFamily f;
    f.dim = 4;
    for (const double t : {t0, t1}) {
      const CMatrix p0 = ray_projection(t);
      const CMatrix p1 = i2 - p0;
      if (alice) {
        f.measures.push_back({kron(p0, i2), kron(p1, i2)});
      } else {
        f.measures.push_back({kron(i2, p0), kron(i2, p1)});
      }
    }
    return f;
  };
  return {family(0.0, pi / 4.0, true), family(pi / 8.0, -pi / 8.0, false)};
}

StateFunctional maximally_entangled_state(int local_dim) {
  const int d = local_dim * local_dim;
  CVector phi = CVector::Zero(d);
  for (int i = 0; i < local_dim; ++i) phi(i * local_dim + i) = 1.0 / std::sqrt(static_cast<double>(local_dim));
  return StateFunctional{phi * phi.adjoint()};
}

Correlation deterministic_correlation(int k, const std::vector<int>& fa, const std::vector<int>& fb) {
  if (fa.size() != fb.size() || fa.empty()) throw Error(ErrorKind::ShapeMismatch, "strategies differ in input count");
  const int n = static_cast<int>(fa.size());
  Correlation out(n, k);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) out.at(x, y, fa[static_cast<std::size_t>(x)], fb[static_cast<std::size_t>(y)]) = 1.0;
  return out;
}

double best_classical_chsh() {
  double best = 0.0;
  for (int s = 0; s < 16; ++s) {
    const std::vector<int> fa{s & 1, (s >> 1) & 1};
    const std::vector<int> fb{(s >> 2) & 1, (s >> 3) & 1};
    best = std::max(best, chsh_value(deterministic_correlation(2, fa, fb)));
  }
  return best;
}

}  // namespace opsys
