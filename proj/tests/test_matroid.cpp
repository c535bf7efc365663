#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace treematroid;

namespace {

std::size_t central(const XTree& t) {
  for (std::size_t p = 0; p < t.edge_count(); ++p)
    if (t.is_interior_edge(p)) return p;
  throw std::logic_error("no interior edge");
}

std::set<std::size_t> support(const LambdaVector& v) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < v.incidence.size(); ++i)
    if (v.incidence[i]) out.insert(i);
  return out;
}

CordSet proper_cherry_cords(const XTree& t) {
  CordSet out;
  for (const auto& c : cherries(t))
    if (c.proper) out.insert(c.cord);
  return out;
}

}  // namespace

TEST_CASE("lambda vectors are path incidences", "[matroid]") {
  const auto q = oracle::quartet();
  const Leaf a = q.leaf("a"), b = q.leaf("b"), c = q.leaf("c");
  CHECK(support(lambda_vector(q, Cord(a, b))) == std::set<std::size_t>{q.pendant_edge(a), q.pendant_edge(b)});
  CHECK(support(lambda_vector(q, Cord(a, c))) == std::set<std::size_t>{q.pendant_edge(a), central(q), q.pendant_edge(c)});

  const auto s = oracle::star(4);
  for (const auto& xy : CordSet::all(4))
    CHECK(support(lambda_vector(s, xy)) == std::set<std::size_t>{s.pendant_edge(xy.a), s.pendant_edge(xy.b)});

  EdgeWeighting w;
  for (const auto& e : q.edges()) w[e.id] = static_cast<long>(1 + to_underlying(e.id));
  for (const auto& xy : CordSet::all(4)) CHECK(lambda_vector(q, xy).apply(w) == distance(q, w, xy));

  CHECK_THROWS_AS(lambda_vector(q, Cord(0, 7)), std::invalid_argument);
}

TEST_CASE("rank and verdict examples", "[matroid]") {
  const auto q = oracle::quartet();
  CHECK(rank_of(q, CordSet::all(4)) == 5);
  CHECK(rank_of(q, {}) == 0);
  const auto s = oracle::star(4);
  CHECK(rank_of(s, oracle::cords(s, "ab bc ca")) == 3);

  const auto basis = verdict(q, oracle::cords(q, "ab cd ac ad bc"));
  CHECK(basis.basis);
  CHECK(basis.lasso);
  CHECK(basis.independent);
  CHECK(basis.rank == 5);

  const auto partial = verdict(q, oracle::cords(q, "ab cd ac bd"));
  CHECK(partial.independent);
  CHECK_FALSE(partial.lasso);
  CHECK(partial.rank == 4);

  for (std::size_t n = 3; n <= 6; ++n)
    for (const auto& t : oracle::trees(n)) {
      const auto v = verdict(t, CordSet::all(n));
      CHECK(v.lasso);
      CHECK(v.independent == v.basis);
    }
}

TEST_CASE("closure examples", "[matroid]") {
  const auto q = oracle::quartet();
  CHECK(closure(q, oracle::cords(q, "ac ad bc")) == oracle::cords(q, "ac ad bc bd"));
  CHECK(closure(q, CordSet::all(4)) == CordSet::all(4));
  CHECK(closure(q, {}).empty());

  // The relation behind the first example, as coordinates.
  const TreeMatroid m(q);
  const auto basis = oracle::cords(q, "ac ad bc");
  const auto& bd = m.row(Cord(q.leaf("b"), q.leaf("d")));
  const auto rho = solve_coordinates(m.lambda_matrix(basis), std::vector<Rational>(bd.begin(), bd.end()));
  REQUIRE(rho);
  CHECK(*rho == std::vector<Rational>{-1, 1, 1});
}

TEST_CASE("circuit examples", "[matroid]") {
  const auto q = oracle::quartet();
  const auto qc = circuits(q, 6);
  CHECK(std::find(qc.begin(), qc.end(), oracle::cords(q, "ac ad bc bd")) != qc.end());
  const Cord ab(q.leaf("a"), q.leaf("b"));
  CHECK(std::none_of(qc.begin(), qc.end(), [&](const CordSet& c) { return c.contains(ab); }));

  const auto s = oracle::star(4);
  const auto sc = circuits(s, 5);
  CHECK(std::find(sc.begin(), sc.end(), oracle::cords(s, "ab bc cd da")) != sc.end());
  for (const auto& c : sc) CHECK(TreeMatroid(s).is_circuit(c));
  CHECK(circuits(s, 2).empty());
}

TEST_CASE("basis examples", "[matroid]") {
  const auto q = oracle::quartet();
  const auto qb = bases(q);
  REQUIRE(qb.size() == 4);
  const CordSet cross = oracle::cords(q, "ac ad bc bd");
  for (const auto& b : qb) {
    CHECK((b & cross).size() == 3);
    CHECK(b.size() == 5);
  }
  CHECK(bases(oracle::star(4)).size() == 12);
  const auto s3 = bases(oracle::star(3));
  REQUIRE(s3.size() == 1);
  CHECK(s3.front() == CordSet::all(3));

  CHECK_THROWS_AS(bases(oracle::star(8)), ScaleError);
  EnumerationOptions wide;
  wide.max_leaves = 8;
  CHECK_NOTHROW(TreeMatroid(oracle::star(8)).circuits(3, wide));
}

TEST_CASE("coloop examples", "[matroid]") {
  const auto q = oracle::quartet();
  CHECK(coloops(q) == oracle::cords(q, "ab cd"));
  CHECK(coloops(oracle::star(4)).empty());
  CHECK(coloops(oracle::star(3)) == CordSet::all(3));
}

TEST_CASE("contraction recursion on the quartet tree", "[matroid]") {
  const auto q = oracle::quartet();
  const auto f = q.edge(central(q)).id;
  const ContractionStep step(q, f);
  CHECK(are_equivalent(step.contracted().tree(), oracle::star(4)));

  const auto b1 = oracle::cords(q, "ab bc ca da");
  const auto b2 = oracle::cords(q, "ab bc ca dc");
  const Cord da(q.leaf("d"), q.leaf("a")), db(q.leaf("d"), q.leaf("b")), dc(q.leaf("d"), q.leaf("c"));
  CHECK(step.addable(b1, dc));
  CHECK_FALSE(step.addable(b1, db));
  CHECK(step.addable(b2, da));
  CHECK(step.addable(b2, db));

  // lambda_db = lambda_da - lambda_ac + lambda_cb on the contracted tree; B1 sorted is ab, ac, ad, bc.
  CHECK(step.coordinates(b1, db) == std::vector<Rational>{0, -1, 1, 1});

  const auto bf = contraction_bases(q, f);
  const auto direct = bases(q);
  CHECK(std::set<CordSet>(bf.begin(), bf.end()) == std::set<CordSet>(direct.begin(), direct.end()));

  CHECK_THROWS_AS(contraction_bases(q, q.edge(q.pendant_edge(0)).id), std::invalid_argument);
  CHECK_THROWS_AS(contraction_bases(q, EdgeId{99}), std::invalid_argument);
}

TEST_CASE("rank decomposition under contraction", "[matroid]") {
  const auto q = oracle::quartet();
  const std::vector<EdgeId> f{q.edge(central(q)).id};
  const auto d = contract_rank_decomposition(q, f, CordSet::all(4));
  CHECK(d.full_rank == 5);
  CHECK(d.contracted_rank == 4);
  CHECK(d.kernel_dim == 1);
  CHECK(d.identity_holds);
  CHECK(d.bound_holds);

  const auto none = contract_rank_decomposition(q, std::vector<EdgeId>{}, oracle::cords(q, "ab ac"));
  CHECK(none.kernel_dim == 0);
  CHECK(none.full_rank == none.contracted_rank);

  const auto ab = contract_rank_decomposition(q, f, oracle::cords(q, "ab"));
  CHECK(ab.full_rank == 1);
  CHECK(ab.contracted_rank == 1);
  CHECK(ab.kernel_dim == 0);
}

TEST_CASE("rank is preserved under restriction", "[matroid]") {
  const auto cat = caterpillar_tree(indexed_labels("a", 5));
  const std::vector<Leaf> y{cat.leaf("a1"), cat.leaf("a2"), cat.leaf("a4"), cat.leaf("a5")};
  CordSet within;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = i + 1; j < y.size(); ++j) within.insert(Cord(y[i], y[j]));
  const auto r = restriction_rank(cat, y, within);
  CHECK(r.full_rank == 5);
  CHECK(r.restricted_rank == 5);
  CHECK(r.equal);

  const auto whole = restriction_rank(cat, {0, 1, 2, 3, 4}, oracle::cords(cat, "a1-a3 a2-a5"));
  CHECK(whole.equal);

  // Circuits of every 4-leaf restriction of a binary 5-leaf tree are circuits of the tree.
  const TreeMatroid m(cat);
  for (Leaf skip = 0; skip < 5; ++skip) {
    std::vector<Leaf> sub;
    for (Leaf x = 0; x < 5; ++x)
      if (x != skip) sub.push_back(x);
    const auto res = restrict_tree(cat, sub);
    for (const auto& c : circuits(res.tree, 6)) {
      std::vector<Cord> lifted;
      for (const auto& xy : c) lifted.emplace_back(res.leaf_map[xy.a], res.leaf_map[xy.b]);
      CHECK(m.is_circuit(CordSet(std::move(lifted))));
    }
  }
}

TEST_CASE("rank satisfies the matroid axioms", "[matroid][property]") {
  oracle::Gen gen(101);
  for (std::size_t n = 3; n <= 5; ++n)
    for (const auto& t : oracle::trees(n)) {
      const TreeMatroid m(t);
      for (int trial = 0; trial < 30; ++trial) {
        const auto x = gen.cords(n);
        const auto y = gen.cords(n);
        const auto rx = m.rank_of(x), ry = m.rank_of(y);
        CHECK(rx <= x.size());
        CHECK(rx <= m.rank_of(x | y));
        CHECK(m.rank_of(x | y) + m.rank_of(x & y) <= rx + ry);
        const Cord c = gen.pick(m.ground_set());
        const auto grown = m.rank_of(x.with(c));
        CHECK((grown == rx || grown == rx + 1));
      }
      for (int trial = 0; trial < 20; ++trial) {
        // Random independent sets by greedy insertion in random order.
        auto independent = [&](std::size_t size) {
          auto order = m.ground_set();
          std::shuffle(order.begin(), order.end(), gen.engine());
          CordSet s;
          for (const auto& c : order)
            if (s.size() < size && m.rank_of(s.with(c)) == s.size() + 1) s.insert(c);
          return s;
        };
        const auto big = independent(1 + gen.below(m.edge_count()));
        const auto small = independent(gen.below(big.size()));
        REQUIRE(small.size() < big.size());
        const auto extra = big - small;
        CHECK(std::any_of(extra.begin(), extra.end(), [&](const Cord& c) { return m.rank_of(small.with(c)) == small.size() + 1; }));
      }
    }
}

TEST_CASE("closure is a closure operator", "[matroid][property]") {
  oracle::Gen gen(102);
  for (std::size_t n = 4; n <= 6; ++n)
    for (const auto& t : oracle::trees(n)) {
      const TreeMatroid m(t);
      const auto x = gen.cords(n);
      const auto y = x | gen.cords(n, 0.2);
      const auto cx = m.closure(x);
      CHECK(x.is_subset_of(cx));
      CHECK(cx.is_subset_of(m.closure(y)));
      CHECK(m.closure(cx) == cx);
      CHECK(m.rank_of(cx) == m.rank_of(x));
      for (const auto& c : m.ground_set()) CHECK(cx.contains(c) == (m.rank_of(x.with(c)) == m.rank_of(x)));
    }
}

TEST_CASE("rank agrees with the separation oracle", "[matroid][property]") {
  oracle::Gen gen(103);
  for (std::size_t n = 3; n <= 7; ++n) {
    const auto trees = n <= 6 ? oracle::trees(n) : std::vector<XTree>{};
    for (int trial = 0; trial < 200; ++trial) {
      const auto t = n <= 6 ? gen.pick(trees) : caterpillar_tree(indexed_labels("x", 7));
      const auto l = gen.cords(n);
      CHECK(rank_of(t, l) == oracle::rank(t, l));
    }
  }
}

TEST_CASE("the full cord set has rank |E|", "[matroid][property]") {
  for (std::size_t n = 3; n <= 7; ++n)
    for (const auto& t : oracle::trees(n)) CHECK(rank_of(t, CordSet::all(n)) == t.edge_count());
}

TEST_CASE("bases and circuits match brute force", "[matroid][property]") {
  for (std::size_t n = 3; n <= 5; ++n)
    for (const auto& t : oracle::trees(n)) {
      const TreeMatroid m(t);
      const auto b = m.bases();
      CHECK(std::set<CordSet>(b.begin(), b.end()) == oracle::bases(t));
      CHECK(std::is_sorted(b.begin(), b.end()));
      const auto c = m.circuits(m.edge_count() + 1);
      CHECK(std::set<CordSet>(c.begin(), c.end()) == oracle::circuits(t, m.edge_count() + 1));
      CHECK(std::set<CordSet>(c.begin(), c.end()).size() == c.size());
    }
}

TEST_CASE("parallel enumeration replays the serial order", "[matroid][property]") {
  EnumerationOptions parallel;
  parallel.threads = 4;
  for (const auto& t : {oracle::snowflake(), oracle::six_leaf_tree(), oracle::two_vertex_tree()}) {
    const TreeMatroid m(t);
    CHECK(m.bases(parallel) == m.bases());
    CHECK(m.hyperplanes(parallel) == m.hyperplanes());
  }
}

TEST_CASE("co-loops are the proper cherries", "[matroid][property]") {
  for (std::size_t n = 3; n <= 6; ++n)
    for (const auto& t : oracle::trees(n)) CHECK(coloops(t) == proper_cherry_cords(t));
}

TEST_CASE("fundamental circuits are unique", "[matroid][property]") {
  oracle::Gen gen(104);
  for (std::size_t n = 4; n <= 5; ++n)
    for (const auto& t : oracle::trees(n)) {
      const TreeMatroid m(t);
      const auto all_circuits = m.circuits(m.edge_count() + 1);
      const auto b = m.bases();
      for (int trial = 0; trial < 5; ++trial) {
        const auto& basis = gen.pick(b);
        for (const auto& c : m.ground_set()) {
          if (basis.contains(c)) continue;
          const auto grown = basis.with(c);
          const auto inside = std::count_if(all_circuits.begin(), all_circuits.end(),
                                            [&](const CordSet& k) { return k.is_subset_of(grown); });
          CHECK(inside == 1);
        }
      }
    }
}

TEST_CASE("contraction recursion reproduces the bases", "[matroid][property]") {
  for (std::size_t n = 4; n <= 5; ++n)
    for (const auto& t : oracle::trees(n)) {
      const auto direct = bases(t);
      const std::set<CordSet> expected(direct.begin(), direct.end());
      for (const auto f : t.interior_edges()) {
        const ContractionStep step(t, f);
        const auto bf = step.bases();
        CHECK(std::set<CordSet>(bf.begin(), bf.end()) == expected);
        // The explicit coordinates give the same verdict on every pair.
        for (const auto& basis : step.contracted().bases())
          for (const auto& xy : oracle::all_cords(n))
            CHECK(step.addable(basis, xy) == expected.contains(basis.with(xy)));
      }
    }
}

TEST_CASE("rank identities hold on random instances", "[matroid][property]") {
  oracle::Gen gen(105);
  const std::vector<std::vector<XTree>> by_size{oracle::trees(4), oracle::trees(5), oracle::trees(6)};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + gen.below(3);
    const auto& t = gen.pick(by_size[n - 4]);
    const auto f = gen.interior_subset(t);
    const auto l = gen.cords(n);
    const auto d = contract_rank_decomposition(t, f, l);
    CHECK(d.identity_holds);
    CHECK(d.bound_holds);
    CHECK(d.full_rank == oracle::rank(t, l));

    const auto y = gen.leaf_subset(n, 3);
    CordSet within;
    for (const auto& c : l)
      if (std::binary_search(y.begin(), y.end(), c.a) && std::binary_search(y.begin(), y.end(), c.b)) within.insert(c);
    CHECK(restriction_rank(t, y, within).equal);
  }
}
