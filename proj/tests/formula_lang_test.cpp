#include <gtest/gtest.h>

#include <random>

#include "kripkediag/formula_parser.hpp"
#include "support/oracle.hpp"

using namespace kdiag::modal;
using namespace kdiag::lang;

namespace {

Formula A(const char* n) { return Formula::atom(n); }

ParseError parse_error(std::string_view text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for '" << text << "'";
  return ParseError(ParseErrorKind::Empty, 0, "");
}

// Random ASTs over a wider alphabet than the kernel oracle, including
// identifiers that look like keywords or contain digits and underscores.
Formula random_ast(std::mt19937_64& rng, int depth) {
  static const char* names[] = {"p", "q", "x1", "_tmp", "RF_overheats", "cooling_fault_reported", "a_b_c9"};
  std::uniform_int_distribution<int> pick(0, 6);
  if (depth == 0 || std::bernoulli_distribution(0.15)(rng)) return A(names[pick(rng)]);
  switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
    case 0: return Formula::negation(random_ast(rng, depth - 1));
    case 1: return Formula::conjunction(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 2: return Formula::disjunction(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 3: return Formula::implication(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 4: return Formula::box(random_ast(rng, depth - 1));
    default: return Formula::diamond(random_ast(rng, depth - 1));
  }
}

}  // namespace

TEST(Parse, AxiomShapes) {
  EXPECT_EQ(parse("[](klystron_fault_reported -> rf_power_fault_reported)"),
            Formula::box(Formula::implication(A("klystron_fault_reported"), A("rf_power_fault_reported"))));
  EXPECT_EQ(parse("p"), A("p"));
  EXPECT_EQ(parse("[](vacuum_fault_reported -> !<>rf_fault_is_root_cause)"),
            Formula::box(Formula::implication(A("vacuum_fault_reported"),
                                              Formula::negation(Formula::diamond(A("rf_fault_is_root_cause"))))));
}

TEST(Parse, PrecedenceAndAssociativity) {
  EXPECT_EQ(parse("a -> b -> c"), Formula::implication(A("a"), Formula::implication(A("b"), A("c"))));
  EXPECT_EQ(parse("a & b & c"), Formula::conjunction(Formula::conjunction(A("a"), A("b")), A("c")));
  EXPECT_EQ(parse("a | b | c"), Formula::disjunction(Formula::disjunction(A("a"), A("b")), A("c")));
  EXPECT_EQ(parse("a & b | c"), Formula::disjunction(Formula::conjunction(A("a"), A("b")), A("c")));
  EXPECT_EQ(parse("a | b & c"), Formula::disjunction(A("a"), Formula::conjunction(A("b"), A("c"))));
  EXPECT_EQ(parse("a | b -> c"), Formula::implication(Formula::disjunction(A("a"), A("b")), A("c")));
  EXPECT_EQ(parse("!a & b"), Formula::conjunction(Formula::negation(A("a")), A("b")));
  EXPECT_EQ(parse("[]a -> <>b"), Formula::implication(Formula::box(A("a")), Formula::diamond(A("b"))));
  EXPECT_EQ(parse("!![]<>a"),
            Formula::negation(Formula::negation(Formula::box(Formula::diamond(A("a"))))));
}

TEST(Parse, WhitespaceInsignificant) {
  EXPECT_EQ(parse("  [] ( a->b )\t"), parse("[](a -> b)"));
  EXPECT_EQ(parse("\n!\n(a&b)\r\n"), parse("!(a & b)"));
}

TEST(Parse, ErrorKinds) {
  EXPECT_EQ(parse_error("").kind(), ParseErrorKind::Empty);
  EXPECT_EQ(parse_error("   \t").kind(), ParseErrorKind::Empty);
  auto lex = parse_error("p $ q");
  EXPECT_EQ(lex.kind(), ParseErrorKind::Lexical);
  EXPECT_EQ(lex.offset(), 2u);
  EXPECT_EQ(parse_error("p - q").kind(), ParseErrorKind::Lexical);
  EXPECT_EQ(parse_error("[p]").kind(), ParseErrorKind::Lexical);
  auto trunc = parse_error("[](p -> ");
  EXPECT_EQ(trunc.kind(), ParseErrorKind::Syntax);
  EXPECT_EQ(trunc.offset(), 8u);
  auto extra = parse_error("p q");
  EXPECT_EQ(extra.kind(), ParseErrorKind::Syntax);
  EXPECT_EQ(extra.offset(), 2u);
  EXPECT_EQ(parse_error("(p & q").kind(), ParseErrorKind::Syntax);
  EXPECT_EQ(parse_error("p & )").kind(), ParseErrorKind::Syntax);
}

TEST(Parse, ErrorOffsetsStayWithinInput) {
  std::mt19937_64 rng(41);
  const std::string alphabet = "pq!&|-><[]() ";
  int errors = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    int len = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int k = 0; k < len; ++k)
      text += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    try {
      parse(text);
    } catch (const ParseError& e) {
      ++errors;
      EXPECT_LE(e.offset(), text.size()) << text;
    }
  }
  EXPECT_GT(errors, 100);
}

TEST(Render, MinimalParentheses) {
  EXPECT_EQ(render(Formula::box(Formula::negation(
                Formula::conjunction(A("cooling_fault_reported"), A("klystron_fault_reported"))))),
            "[]!(cooling_fault_reported & klystron_fault_reported)");
  EXPECT_EQ(render(A("p")), "p");
  EXPECT_EQ(render(parse("a -> b -> c")), "a -> b -> c");
  EXPECT_EQ(render(parse("(a -> b) -> c")), "(a -> b) -> c");
  EXPECT_EQ(render(parse("a & (b & c)")), "a & (b & c)");
  EXPECT_EQ(render(parse("(a & b) & c")), "a & b & c");
  EXPECT_EQ(render(parse("(a & b) | c")), "a & b | c");
  EXPECT_EQ(render(parse("(a | b) & c")), "(a | b) & c");
  EXPECT_EQ(render(parse("!(!a)")), "!!a");
}

TEST(Render, UnicodeStyle) {
  EXPECT_EQ(render(parse("[](k -> r) & <>!p | q"), RenderStyle::Unicode), "□(k → r) ∧ ◇¬p ∨ q");
}

TEST(Render, RoundTripRandomAsts) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 2000; ++i) {
    auto f = random_ast(rng, 6);
    auto text = render(f);
    auto back = parse(text);
    ASSERT_EQ(back, f) << text;
    EXPECT_EQ(render(back), text);
  }
}

TEST(Render, EqualAstsRenderEqually) {
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(render(random_ast(a, 5)), render(random_ast(b, 5)));
}

TEST(AxiomFileParse, ShippedFixture) {
  auto file = load_axiom_file(std::string(KDIAG_DATA_DIR) + "/axioms/accelerator.ax");
  ASSERT_EQ(file.entries.size(), 3u);
  EXPECT_EQ(file.entries[0].label, "causal_direction");
  EXPECT_EQ(file.entries[1].label, "fault_exclusion");
  EXPECT_EQ(file.entries[2].label, "vacuum_prune");
  EXPECT_EQ(file.entries[1].formula, parse("[]!(cooling_fault_reported & klystron_fault_reported)"));
  for (const auto& e : file.entries) {
    EXPECT_EQ(parse(render(e.formula)), e.formula);
    EXPECT_EQ(parse(e.source), e.formula);
  }
  EXPECT_EQ(file.to_axiom_set().size(), 3u);
}

TEST(AxiomFileParse, CommentsAndBlankLines) {
  auto file = parse_axiom_file("# header\n\n  a : p -> q   # trailing\n\tb: []r\n");
  ASSERT_EQ(file.entries.size(), 2u);
  EXPECT_EQ(file.entries[0].label, "a");
  EXPECT_EQ(file.entries[0].source, "p -> q");
  EXPECT_EQ(file.entries[1].formula, Formula::box(A("r")));
}

TEST(AxiomFileParse, EmptyFileHasNoEntries) {
  EXPECT_TRUE(parse_axiom_file("").entries.empty());
  EXPECT_TRUE(parse_axiom_file("# only a comment\n").entries.empty());
}

TEST(AxiomFileParse, ErrorsCarryLineAndColumn) {
  try {
    parse_axiom_file("ok: p\nbad: [](p -> \n");
    FAIL();
  } catch (const AxiomFileError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 14u);
    EXPECT_EQ(std::string(e.what()).rfind("2:14:", 0), 0u);
  }
  try {
    parse_axiom_file("a: p\na: q\n");
    FAIL();
  } catch (const AxiomFileError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
  EXPECT_THROW(parse_axiom_file("no colon here\n"), AxiomFileError);
  EXPECT_THROW(parse_axiom_file("9bad: p\n"), AxiomFileError);
  EXPECT_THROW(parse_axiom_file("empty:\n"), AxiomFileError);
  EXPECT_THROW(load_axiom_file("/nonexistent/file.ax"), std::runtime_error);
}
