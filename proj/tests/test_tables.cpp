#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rhsym/tables.hpp"

using namespace rhsym;

namespace {

const std::filesystem::path kGolden = RHSYM_GOLDEN_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Table golden(const std::string& name) {
  std::istringstream in(slurp(kGolden / name));
  return read_table(in);
}

std::string stem(Theory th) { return th == Theory::Eckart ? "eckart" : "israel_stewart"; }

}  // namespace

TEST(Tables, CommutatorMatchesGolden) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const Table t = commutator_table(structure_constants(table_basis(th)));
    const auto bad = compare_tables(golden(stem(th) + "_commutator.txt"), t);
    for (const auto& m : bad) ADD_FAILURE() << describe(m);
  }
}

TEST(Tables, AdjointMatchesGolden) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    const Table t = adjoint_table(structure_constants(table_basis(th)));
    const auto bad = compare_tables(golden(stem(th) + "_adjoint.txt"), t);
    for (const auto& m : bad) ADD_FAILURE() << describe(m);
  }
}

TEST(Tables, SpecificCells) {
  const Table c = commutator_table(structure_constants(table_basis(Theory::Eckart)));
  EXPECT_EQ(c.cells[2][0], "-V1");
  const Table a = adjoint_table(structure_constants(table_basis(Theory::IsraelStewart)));
  ASSERT_EQ(a.rows.size(), 3u);
  const auto co = cell_coefficients(a.cells[2][1], a.columns);
  EXPECT_TRUE(equivalent(co[1], exp(Expr(sym::parameter("eps")))));
}

TEST(Tables, MutatedGoldenNamesTheCell) {
  std::string text = slurp(kGolden / "eckart_commutator.txt");
  const std::string row = "V1  | 0   | 0   | V1 | 0";
  const auto pos = text.find(row);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, row.size(), "V1  | 0   | 0   | 2*V1 | 0");
  std::istringstream in(text);
  const auto bad = compare_tables(read_table(in), commutator_table(structure_constants(table_basis(Theory::Eckart))));
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_EQ(describe(bad[0]), "cell (V1, V3): expected 2*V1, got V1");
}

TEST(Tables, TextRoundTrip) {
  const Table t = adjoint_table(structure_constants(table_basis(Theory::Eckart)));
  std::stringstream ss;
  write_table(ss, t);
  const Table back = read_table(ss);
  EXPECT_EQ(back.corner, t.corner);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_TRUE(compare_tables(back, t).empty());
}

TEST(Tables, CsvLayout) {
  const Table t = commutator_table(structure_constants(table_basis(Theory::IsraelStewart)));
  std::stringstream ss;
  write_table(ss, t, TableFormat::Csv);
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first, "[,],V1,V2,V3");
}

TEST(Tables, MalformedInput) {
  std::istringstream empty("# nothing\n\n");
  EXPECT_THROW(read_table(empty), std::invalid_argument);
  std::istringstream ragged("[,] | V1 | V2\nV1 | 0\n");
  EXPECT_THROW(read_table(ragged), std::invalid_argument);
  EXPECT_THROW(cell_coefficients("V1*V2", {"V1", "V2"}), std::invalid_argument);
  EXPECT_THROW(cell_coefficients("V1 + 1", {"V1", "V2"}), std::invalid_argument);
}

TEST(BasisFixture, MatchesGeneratorList) {
  for (Theory th : {Theory::Eckart, Theory::IsraelStewart}) {
    std::istringstream in(slurp(kGolden / (stem(th) + "_basis.txt")));
    const BasisFixture b = read_basis(in);
    const auto want = literature_basis(th);
    ASSERT_EQ(b.fields.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(b.fields[i], want[i]) << b.names[i];
  }
}

TEST(BasisFixture, ParseField) {
  EXPECT_EQ(parse_field("t*d/dt + x*d/dx - n*d/dn"), fields::dilation());
  EXPECT_EQ(parse_field(to_string(fields::boost())), fields::boost());
  EXPECT_THROW(parse_field("t + d/dx"), std::invalid_argument);
}
