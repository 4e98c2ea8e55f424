#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "robin/config.hpp"
#include "robin/report.hpp"

using namespace robin;
using nlohmann::json;

TEST_CASE("toml subset parser") {
  const std::string text = R"(
# a domain description
kind = "ellipsoid"
n = 2
weights = [2.0, 1.0]
flag = true
nested = [[1.0, 2.0], [3.0, 4.0]]

[meta]
comment = "hello \"quoted\""

[[term]]
coeff = [1.0, 0.5]
z = [1, 0]
zbar = [1, 0]

[[term]]
coeff = [-1.0, 0.0]
z = [0, 0]
zbar = [0, 0]
)";
  const json j = parse_toml(text);
  CHECK(j.at("kind") == "ellipsoid");
  CHECK(j.at("n") == 2);
  CHECK(j.at("weights")[0] == 2.0);
  CHECK(j.at("flag") == true);
  CHECK(j.at("nested")[1][0] == 3.0);
  CHECK(j.at("meta").at("comment") == "hello \"quoted\"");
  CHECK(j.at("term").size() == 2);
  CHECK(j.at("term")[0].at("coeff")[1] == 0.5);
}

TEST_CASE("toml parse errors") {
  CHECK_THROWS_AS(parse_toml("key"), ConfigError);
  CHECK_THROWS_AS(parse_toml("key = "), ConfigError);
  CHECK_THROWS_AS(parse_toml("key = [1, 2"), ConfigError);
  CHECK_THROWS_AS(parse_toml("key = \"unterminated"), ConfigError);
  CHECK_THROWS_AS(parse_toml("key = 1.2.3"), ConfigError);
}

TEST_CASE("domain file round trip") {
  const std::string path = "test_domain_tmp.toml";
  {
    std::ofstream out(path);
    out << "kind = \"ellipsoid\"\nn = 2\nweights = [2.0, 1.0]\n";
  }
  auto d = load_domain_file(path);
  CHECK(d->kind_name() == "ellipsoid");
  CHECK(d->dim() == 2);
  CHECK(d->psi(CVector::Zero(2)) == doctest::Approx(-1.0));

  // json serialization round trip preserves evaluation
  const json j = domain_to_json(*d);
  auto d2 = domain_from_json(j);
  CVector p(2);
  p << Complex(0.3, 0.1), Complex(-0.2, 0.4);
  CHECK(d2->psi(p) == doctest::Approx(d->psi(p)).epsilon(1e-15));
  std::remove(path.c_str());
}

TEST_CASE("polynomial domain file with term tables") {
  const std::string path = "test_poly_tmp.toml";
  {
    std::ofstream out(path);
    out << "kind = \"polynomial\"\nn = 2\n\n";
    out << "[[term]]\ncoeff = [1.0, 0.0]\nz = [1, 0]\nzbar = [1, 0]\n\n";
    out << "[[term]]\ncoeff = [1.0, 0.0]\nz = [0, 1]\nzbar = [0, 1]\n\n";
    out << "[[term]]\ncoeff = [-1.0, 0.0]\nz = [0, 0]\nzbar = [0, 0]\n";
  }
  auto d = load_domain_file(path);
  CHECK(d->kind_name() == "polynomial");
  CHECK(d->psi(CVector::Zero(2)) == doctest::Approx(-1.0));
  std::remove(path.c_str());
}

TEST_CASE("csv writer formats full precision") {
  CsvWriter csv({"a", "b"});
  csv.add_row({format_full(1.0 / 3.0), format_full(2.0)});
  const std::string s = csv.str();
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(s.substr(0, 4) == "a,b\n");
  CHECK_THROWS(csv.add_row({"only-one"}));
}

TEST_CASE("config hash is stable and sensitive") {
  json a{{"seed", 1}, {"backend", "ball"}};
  json b{{"seed", 2}, {"backend", "ball"}};
  CHECK(config_hash(a) == config_hash(a));
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash_hex(a).size() == 16);
}

TEST_CASE("report schema file matches the writers") {
  // the frozen schema shipped in the repo lists the CSV columns; the writers
  // must agree with it
  json schema;
  {
    std::ifstream in(std::string(SCHEMA_DIR) + "/report_schema_v1.json");
    REQUIRE(in.good());
    in >> schema;
  }
  CHECK(schema.at("version") == 1);
  const auto hv = schema.at("halfspace_verify_csv").get<std::vector<std::string>>();
  CHECK(hv == std::vector<std::string>{"kind", "n", "exact_re", "exact_im",
                                       "mc_re", "mc_im", "stderr", "z_score",
                                       "pass"});
  const auto as = schema.at("asymptotics_csv").get<std::vector<std::string>>();
  CHECK(as == std::vector<std::string>{"delta", "scaled_re", "scaled_im",
                                       "target_re", "target_im", "abs_err",
                                       "est_order"});
}
