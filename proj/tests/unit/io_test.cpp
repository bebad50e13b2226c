#include <gtest/gtest.h>

#include <sstream>

#include "nfbdd/io.hpp"
#include "test_support.hpp"

using namespace nfbdd;

namespace {

std::string parse_error(std::string_view text) {
  try {
    parse_any(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

/// Drops comments and collapses whitespace.
std::string canonical(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok, joined;
    while (ls >> tok) joined += (joined.empty() ? "" : " ") + tok;
    if (joined.empty() || joined[0] == 'c') continue;
    out += joined + "\n";
  }
  return out;
}

}  // namespace

TEST(ParseNfbdd, SingleDecision) {
  auto b = parse_nfbdd("p nfbdd 1 3\n1 F\n2 T\n3 d 1 2 1\ns 3\n");
  EXPECT_EQ(b.n_vars(), 1u);
  EXPECT_EQ(b.size(), 2u);
  EXPECT_EQ(support::path_count(b), 1u);
}

TEST(ParseNfbdd, ForwardReferencesAndComments) {
  auto b = parse_nfbdd("c demo\np nfbdd 2 5\n4 o 2 3 2\n3 d 2 1 9\n1 T\n9 F\n2 d 1 1 9\ns 4\n");
  EXPECT_EQ(support::path_count(b), 3u);
}

TEST(ParseNfbdd, Errors) {
  EXPECT_NE(parse_error("p nfbdd 1 2\n1 T\n2 d 1 1 9\ns 2\n").find("undefined id 9"), std::string::npos);
  EXPECT_NE(parse_error("p nfbdd 1 2\n1 T\n1 F\ns 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("p nfbdd 1 2\n1 T\n1 F\ns 1\n").find("repeated node id"), std::string::npos);
  EXPECT_NE(parse_error("p nfbdd 1 3\n1 F\n2 T\n3 d 4 2 1\ns 3\n").find("line 4"), std::string::npos);
  EXPECT_NE(parse_error("1 T\ns 1\n").find("header"), std::string::npos);
  EXPECT_NE(parse_error("p nfbdd 1 2\n1 T\n2 x\ns 2\n").find("line 3"), std::string::npos);
  EXPECT_FALSE(parse_error("p nfbdd 1 3\n1 F\n2 T\n3 d 1 2 1\n").empty());
  // Freeness failure is tied to the offending node's line.
  const auto msg = parse_error("p nfbdd 1 4\n1 F\n2 T\n3 d 1 2 1\n4 d 1 3 1\ns 4\n");
  EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
}

TEST(ParseNfbdd, DuplicateSinksAreMerged) {
  auto b = parse_nfbdd("p nfbdd 1 4\n1 T\n2 T\n3 d 1 1 2\n4 o 1 3\ns 4\n");
  std::size_t sinks = 0;
  for (NodeId q : b.bottom_up()) sinks += b.node(q).is_sink();
  EXPECT_EQ(sinks, 1u);
}

TEST(Serialize, RoundTripOnGeneratedCorpus) {
  for (const auto& b : support::generated(40, 1, 8, 13)) {
    const auto text = serialize_nfbdd(b);
    const auto back = parse_nfbdd(text);
    EXPECT_TRUE(structurally_equal(b, back));
    EXPECT_EQ(serialize_nfbdd(back), text);
  }
}

TEST(Serialize, ParseOfSerializedTextIsCanonical) {
  const std::string messy = "c x\np nfbdd   2 5\n  9 o 2 7 8\n7 d 1 2 1\n8   d 2 2 1\n2 T\n1 F\ns 9\n";
  const auto once = serialize_nfbdd(parse_nfbdd(messy));
  EXPECT_EQ(canonical(once), once);
  EXPECT_EQ(serialize_nfbdd(parse_nfbdd(once)), once);
}

TEST(Serialize, OneSinkOnly) {
  Nfbdd t(Diagram{0, {Node::sink1()}, NodeId{0}});
  EXPECT_EQ(serialize_nfbdd(t), "p nfbdd 0 1\n1 T\ns 1\n");
}

TEST(ParseDnf, Examples) {
  auto f = parse_dnf("p dnf 2 2\n1 0\n2 0\n");
  EXPECT_EQ(f.terms, (std::vector<std::vector<int>>{{1}, {2}}));
  auto g = parse_dnf("c\np dnf 3 1\n1 -2 3 0\n");
  EXPECT_EQ(g.terms, (std::vector<std::vector<int>>{{1, -2, 3}}));
  try {
    parse_dnf("p dnf 2 1\n1 -1 0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("contradictory term"), std::string::npos);
  }
  EXPECT_THROW(parse_dnf("p dnf 2 1\n3 0\n"), ParseError);
  EXPECT_THROW(parse_dnf("p dnf 2 2\n1 0\n"), ParseError);
}

TEST(DnfToNfbdd, Examples) {
  EXPECT_EQ(count_exact(dnf_to_nfbdd(parse_dnf("p dnf 2 2\n1 0\n2 0\n"))), 3u);
  EXPECT_EQ(count_exact(dnf_to_nfbdd(parse_dnf("p dnf 2 1\n1 -2 0\n"))), 1u);
  auto empty = dnf_to_nfbdd(DnfFormula{3, {}});
  EXPECT_EQ(empty.node(empty.source()).kind, NodeKind::Sink0);
}

TEST(DnfToNfbdd, MatchesTruthTable) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = support::random_dnf(1 + s % 10, 1000 + s);
    const auto b = dnf_to_nfbdd(f);
    EXPECT_TRUE(validate(b).ok());
    EXPECT_EQ(count_exact(b), support::dnf_truth_count(f));
    std::size_t lits = 0;
    for (const auto& t : f.terms) lits += t.size();
    EXPECT_LE(b.size(), 2 * lits + f.terms.size());
  }
}

TEST(GenRandom, SmallestCase) {
  auto b = gen_random(1, 4, 3);
  EXPECT_TRUE(validate(b).ok());
  EXPECT_EQ(b.n_vars(), 1u);
  EXPECT_THROW(gen_random(0, 10, 1), Error);
  EXPECT_THROW(gen_random(3, 3, 1), Error);
}

TEST(GenRandom, DeterministicPerSeed) {
  EXPECT_TRUE(structurally_equal(gen_random(6, 30, 42), gen_random(6, 30, 42)));
  EXPECT_EQ(serialize_nfbdd(gen_random(6, 30, 42)), serialize_nfbdd(gen_random(6, 30, 42)));
  EXPECT_NE(serialize_nfbdd(gen_random(6, 30, 42)), serialize_nfbdd(gen_random(6, 30, 43)));
}

TEST(GenRandom, CorpusIsFreeAndNearTarget) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::size_t n = 4 + i % 5;
    const std::size_t target = 10 + i % 40;
    auto b = gen_random(n, target, i);
    EXPECT_TRUE(validate(b).ok());
    EXPECT_TRUE(support::all_paths_free(b.diagram()));
    EXPECT_GE(2 * b.size(), target) << i;
    EXPECT_LE(b.size(), 2 * target) << i;
    EXPECT_EQ(count_exact(b), support::path_count(b));
  }
}
