#include <gtest/gtest.h>

#include "graphon_rds/motif.hpp"

using namespace graphon_rds;

TEST(Motif, NormalisesEdges) {
  const Motif m(3, {{2, 1}, {0, 1}});
  EXPECT_EQ(m.edges(), (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}));
  EXPECT_TRUE(m.adjacent(2, 1));
  EXPECT_FALSE(m.adjacent(0, 2));
  EXPECT_EQ(m.to_string(), "k=3; edges=1-2,2-3");
}

TEST(Motif, Validation) {
  EXPECT_THROW(Motif(1, {}), DomainError);
  EXPECT_THROW(Motif(7, {}), DomainError);
  EXPECT_THROW(Motif(3, {{0, 0}}), DomainError);
  EXPECT_THROW(Motif(3, {{0, 3}}), DomainError);
  EXPECT_THROW(Motif(3, {{0, 1}, {1, 0}}), DomainError);
}

TEST(Motif, CanonicalCodeIsIsomorphismInvariant) {
  const Motif a(4, {{0, 1}, {1, 2}, {2, 3}});
  const Motif b(4, {{2, 0}, {0, 3}, {3, 1}});
  const Motif star(4, {{0, 1}, {0, 2}, {0, 3}});
  EXPECT_EQ(a.canonical_code(), b.canonical_code());
  EXPECT_NE(a.canonical_code(), star.canonical_code());
  EXPECT_EQ(MotifCatalog::canonical_representative(b).adjacency_code(), a.canonical_code());
}

TEST(Motif, Connectivity) {
  EXPECT_TRUE(named_motif("cycle4").connected());
  EXPECT_FALSE(Motif(4, {{0, 1}, {2, 3}}).connected());
  EXPECT_FALSE(Motif(3, {}).connected());
}

TEST(ParseMotif, AliasesAndText) {
  EXPECT_EQ(parse_motif("triangle").edge_count(), 3u);
  EXPECT_EQ(parse_motif("  clique4 ").edge_count(), 6u);
  const auto m = parse_motif("k=3; edges=1-2,2-3");
  EXPECT_EQ(m, named_motif("path3"));
  EXPECT_EQ(parse_motif("k=2;edges=1-2"), named_motif("edge"));
  EXPECT_EQ(parse_motif("k=4; edges=").edge_count(), 0u);
  EXPECT_EQ(parse_motif(parse_motif("star4").to_string()), named_motif("star4"));
}

TEST(ParseMotif, Errors) {
  EXPECT_THROW(parse_motif("pentagon"), FormatError);
  EXPECT_THROW(parse_motif("k=3 edges=1-2"), FormatError);
  EXPECT_THROW(parse_motif("k=x; edges=1-2"), FormatError);
  EXPECT_THROW(parse_motif("k=3; edges=12"), FormatError);
  EXPECT_THROW(parse_motif("k=3; edges=1-a"), FormatError);
  EXPECT_THROW(parse_motif("k=3; edges=1-4"), DomainError);
}

TEST(MotifCatalog, StandardEnumeration) {
  const auto c = MotifCatalog::standard();
  // connected graphs: 1 on 2 vertices, 2 on 3, 6 on 4
  ASSERT_EQ(c.size(), 9u);
  EXPECT_EQ(c[0], named_motif("edge"));
  EXPECT_EQ(c[1].canonical_code(), named_motif("path3").canonical_code());
  EXPECT_EQ(c[2].canonical_code(), named_motif("triangle").canonical_code());
  EXPECT_EQ(c[8].canonical_code(), named_motif("clique4").canonical_code());
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const auto key = [](const Motif& m) { return std::tuple{m.k(), m.edge_count(), m.canonical_code()}; };
    EXPECT_LT(key(c[i]), key(c[i + 1]));
    EXPECT_TRUE(c[i].connected());
    EXPECT_EQ(c[i].adjacency_code(), c[i].canonical_code());
  }
  EXPECT_EQ(MotifCatalog::standard(3).size(), 3u);
}

TEST(MotifCatalog, WeightsAndManifest) {
  const auto c = MotifCatalog::standard();
  EXPECT_EQ(MotifCatalog::weight(0), 0.5);
  EXPECT_EQ(MotifCatalog::weight(2), 0.125);
  EXPECT_EQ(c.truncation_bound(), 1.0 / 512.0);
  const auto text = c.manifest();
  EXPECT_NE(text.find("\"k=2; edges=1-2\""), std::string::npos);
  EXPECT_EQ(c.manifest_hash(), MotifCatalog::standard().manifest_hash());
  EXPECT_NE(c.manifest_hash(), MotifCatalog::standard(3).manifest_hash());
}

TEST(MotifCatalog, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(MotifCatalog({}), PreconditionError);
  EXPECT_THROW(MotifCatalog({named_motif("path3"), parse_motif("k=3; edges=1-3,2-3")}), PreconditionError);
  EXPECT_NO_THROW(MotifCatalog({named_motif("edge"), named_motif("triangle")}));
}
