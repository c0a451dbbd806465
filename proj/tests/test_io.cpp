#include "opsys/io.hpp"

#include <cstdio>
#include <filesystem>
#include <limits>

#include "test_util.hpp"

using namespace opsys;
using io::json;

TEST(Io, CanonicalDumpSortsKeysAndFormatsDoubles) {
  const json j{{"b", 0.1}, {"a", json::array({1, 2.5, std::numeric_limits<double>::quiet_NaN()})}, {"c", "x"}};
  EXPECT_EQ(io::canonical_dump(j), R"({"a":[1,2.5,null],"b":0.10000000000000001,"c":"x"})");
}

TEST(Io, LoadsScalarSystem) {
  const OperatorSystemSpace v = io::load_opsys(testutil::data("c1.json"));
  EXPECT_EQ(v.dim(), 1);
  EXPECT_EQ(v.ambient_dim(), 1);
  const json inline_c = json::parse(R"({"dim":1,"basis":[[[ [1,0] ]]],"unit":[[[1,0]]]})");
  EXPECT_EQ(io::opsys_from_json(inline_c).dim(), 1);
}

TEST(Io, LoadsPauliBasis) {
  const OperatorSystemSpace v = io::load_opsys(testutil::data("m2.json"));
  EXPECT_EQ(v.dim(), 4);
  Rng rng(81);
  EXPECT_TRUE(v.contains(random_complex_matrix(2, 2, rng)).inside);
}

TEST(Io, MissingIdentityInSpan) {
  EXPECT_OPSYS_ERROR(io::load_opsys(testutil::data("no_identity.json")), ErrorKind::InvariantViolation);
}

TEST(Io, SchemaErrorsNameTheField) {
  try {
    io::opsys_from_json(json::parse(R"({"dim":2,"basis":[[[[1,0],[0,0]],[[0,0]]]]})"));
    FAIL() << "expected SchemaError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SchemaError);
    EXPECT_NE(std::string(e.what()).find("opsys.basis[1][2]"), std::string::npos) << e.what();
  }
  EXPECT_OPSYS_ERROR(io::opsys_from_json(json::parse(R"({"basis":[]})")), ErrorKind::SchemaError);
  EXPECT_OPSYS_ERROR(io::read_json_file(testutil::data("does_not_exist.json")), ErrorKind::SchemaError);
  EXPECT_OPSYS_ERROR(io::parse_json_text("{", "inline"), ErrorKind::SchemaError);
}

TEST(Io, OpsysRoundTripIsBitIdentical) {
  const std::string once = io::canonical_dump(io::opsys_to_json(io::load_opsys(testutil::data("m2.json"))));
  const std::string twice = io::canonical_dump(io::opsys_to_json(io::opsys_from_json(json::parse(once))));
  EXPECT_EQ(once, twice);
  Rng rng(82);
  const OperatorSystemSpace v = random_system_containing(random_projection(3, 1, rng), 3, rng);
  const std::string a = io::canonical_dump(io::opsys_to_json(v));
  const std::string b = io::canonical_dump(io::opsys_to_json(io::opsys_from_json(json::parse(a))));
  EXPECT_EQ(a, b);
}

TEST(Io, CorrelationRoundTrip) {
  const Correlation c = io::correlation_from_json(io::read_json_file(testutil::data("ns_product_n3.json")));
  EXPECT_EQ(c.n(), 3);
  EXPECT_EQ(c.k(), 2);
  const std::string once = io::canonical_dump(io::correlation_to_json(c));
  EXPECT_EQ(io::canonical_dump(io::correlation_to_json(io::correlation_from_json(json::parse(once)))), once);
  EXPECT_OPSYS_ERROR(io::correlation_from_json(json::parse(R"({"n":1,"k":2,"p":[[[[1,0]]]]})")), ErrorKind::SchemaError);
}

TEST(Io, PvmAndStateRoundTrip) {
  const PVMFamily e = io::pvm_from_json(io::read_json_file(testutil::data("tsirelson_alice.json")));
  EXPECT_NO_THROW(validate_pvm(e));
  EXPECT_EQ(io::canonical_dump(io::pvm_to_json(io::pvm_from_json(io::pvm_to_json(e)))), io::canonical_dump(io::pvm_to_json(e)));
  const StateFunctional s = io::state_from_json(io::read_json_file(testutil::data("phi_plus.json")));
  EXPECT_NO_THROW(validate_state(s, 4));
  int n = 0, k = 0;
  const auto qs = pvm_products(e, e);
  const auto back = io::generators_from_json(io::generators_to_json(2, 2, qs), n, k);
  EXPECT_EQ(n, 2);
  EXPECT_EQ(k, 2);
  ASSERT_EQ(back.size(), qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) EXPECT_EQ(back[i], qs[i]);
}

TEST(Io, MatrixExpressions) {
  EXPECT_EQ(io::parse_matrix_expr("diag(1,0)", 2), diag({1, 0}));
  EXPECT_EQ(io::parse_matrix_expr(" diag( 0.5 , 0.25 ,1) ", 3), diag({0.5, 0.25, 1}));
  EXPECT_EQ(io::parse_matrix_expr("eye", 3), identity(3));
  EXPECT_EQ(io::parse_matrix_expr("zero", 2), CMatrix::Zero(2, 2));
  const CMatrix inl = io::parse_matrix_expr("[[[1,0],[0,-1]],[[0,1],[2,0]]]", 2);
  EXPECT_EQ(inl(0, 1), cplx(0, -1));
  EXPECT_EQ(inl(1, 0), cplx(0, 1));
  EXPECT_EQ(inl(1, 1), cplx(2, 0));
  EXPECT_OPSYS_ERROR(io::parse_matrix_expr("diag(1,x)", 2), ErrorKind::InvalidArgument);
  EXPECT_OPSYS_ERROR(io::parse_matrix_expr("", 2), ErrorKind::InvalidArgument);
}

TEST(Io, MatrixFileExpression) {
  const std::string path = (std::filesystem::temp_directory_path() / "opsys_matrix_expr.json").string();
  io::write_text_file(path, io::canonical_dump(io::matrix_to_json(diag({0, 1}))));
  EXPECT_EQ(io::parse_matrix_expr(path, 2), diag({0, 1}));
  std::remove(path.c_str());
}

TEST(Io, ConfigValidation) {
  io::RunConfig c;
  EXPECT_NO_THROW(io::validate_config(c));
  c.tol = 0;
  EXPECT_OPSYS_ERROR(io::validate_config(c), ErrorKind::InvalidArgument);
  c = {};
  c.eps_schedule = {1e-3, 1e-3};
  EXPECT_OPSYS_ERROR(io::validate_config(c), ErrorKind::InvalidArgument);
  c = {};
  c.n_max = 0;
  EXPECT_OPSYS_ERROR(io::validate_config(c), ErrorKind::InvalidArgument);
}

TEST(Io, ErrorJsonCarriesDetail) {
  const Error e(ErrorKind::SignallingViolation, "x", {"alice_marginal", {1, 2, 1, 2}, 0.5});
  const json j = io::error_to_json(e);
  EXPECT_EQ(j["kind"], "SignallingViolation");
  EXPECT_EQ(j["detail"]["indices"], json::array({1, 2, 1, 2}));
}
