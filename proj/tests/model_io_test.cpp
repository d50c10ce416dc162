#include <gtest/gtest.h>

#include <string>

#include "dqs/model_io.hpp"
#include "dqs/qubit.hpp"
#include "support/random_models.hpp"

namespace dqs {
namespace {

std::string error_of(const std::string& text) {
  try {
    parse_model(text);
  } catch (const ModelError& e) {
    return e.what();
  }
  return "no error";
}

const char* const kQubit = R"({
  "dimension": 2,
  "hamiltonian": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
  "kossakowski": [[[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [1, 0]]]
})";

TEST(ModelIoTest, RoundTripPreservesSuperoperator) {
  testing::RandomModels rnd(50);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const auto l = rnd.liouvillian(n, 2.0, 0.7);
    const auto back = parse_model(write_model(l)).liouvillian();
    EXPECT_LE((back.superoperator() - l.superoperator()).max_abs(), 1e-14);
    EXPECT_EQ(write_model(back), write_model(l));
  }
}

TEST(ModelIoTest, DefaultBasisIsGellMann) {
  const auto m = parse_model(kQubit);
  EXPECT_EQ(m.basis, "gell-mann");
  EXPECT_EQ(m.dimension, 2u);
  // Gell-Mann coefficient 1 on F3 is the dispersive qubit with λ = 1.
  EXPECT_LT((m.liouvillian().superoperator() -
             qubit::liouvillian({.e0 = 0, .e1 = 1, .lambda = 1}).superoperator())
                .max_abs(),
            1e-15);
}

TEST(ModelIoTest, PauliTagRescales) {
  std::string text = kQubit;
  text.replace(text.find("\"dimension\": 2,"), 15, "\"dimension\": 2, \"basis\": \"pauli\",");
  const auto m = parse_model(text);
  EXPECT_EQ(m.basis, "pauli");
  EXPECT_DOUBLE_EQ(m.gell_mann_kossakowski().matrix()(2, 2).real(), 2.0);
  EXPECT_EQ(parse_model(write_model(m)).basis, "pauli");
}

TEST(ModelIoTest, ParseErrorsCarryLocation) {
  const std::string truncated = std::string(kQubit).substr(0, 60);
  EXPECT_NE(error_of(truncated).find("line "), std::string::npos);
  EXPECT_NE(error_of("{\n  \"dimension\": 2,\n  oops\n}").find("line 3"), std::string::npos);
}

TEST(ModelIoTest, FieldErrorsCarryPath) {
  EXPECT_EQ(error_of("[]"), "model: top level must be an object");
  EXPECT_EQ(error_of(R"({"dimension": 1})").rfind("dimension:", 0), 0u);
  EXPECT_EQ(error_of(R"({"dimension": 2.5})").rfind("dimension:", 0), 0u);
  EXPECT_EQ(error_of(R"({"dimension": 2})"), "hamiltonian: missing");

  std::string bad_entry = kQubit;
  bad_entry.replace(bad_entry.find("[[1, 0], [0, 0]]"), 16, "[[1, 0], [0]]");
  EXPECT_EQ(error_of(bad_entry).rfind("hamiltonian[0][1]:", 0), 0u);

  std::string nonherm = kQubit;
  nonherm.replace(nonherm.find("[[1, 0], [0, 0]]"), 16, "[[1, 0], [3, 0]]");
  EXPECT_EQ(error_of(nonherm).rfind("hamiltonian:", 0), 0u);

  std::string negative = kQubit;
  negative.replace(negative.find("[1, 0]]]\n}"), 6, "[-1, 0]");
  EXPECT_EQ(error_of(negative).rfind("kossakowski:", 0), 0u);

  std::string tag = kQubit;
  tag.replace(tag.find("\"dimension\": 2,"), 15, "\"dimension\": 2, \"basis\": \"weird\",");
  EXPECT_EQ(error_of(tag).rfind("basis:", 0), 0u);
}

TEST(ModelIoTest, MissingFile) {
  EXPECT_THROW(read_model("/nonexistent/path.model"), ModelError);
}

TEST(FormatDoubleTest, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(2.5), "2.5");
}

}  // namespace
}  // namespace dqs
