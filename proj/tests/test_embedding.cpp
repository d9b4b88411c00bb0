#include <doctest.h>

#include "smt_analogy/adam.hpp"
#include "smt_analogy/grad_check.hpp"
#include "smt_analogy/order_embedding.hpp"
#include "smt_analogy/random.hpp"
#include "support.hpp"

using namespace smt_analogy;

namespace {

const SyntheticVocabulary& vocab() {
  static const auto v = make_synthetic_vocabulary(0);
  return v;
}

EmbedConfig small_config() {
  EmbedConfig c;
  c.hidden = 16;
  c.dim = 8;
  c.layers = 2;
  c.steps = 0;
  c.batch_size = 8;
  c.pool_positives = 32;
  c.pool_negatives = 32;
  return c;
}

EncoderParams small_params(std::uint64_t seed = 1) {
  return EncoderParams::initialized(feature_dim(vocab().vocab.dim()), small_config(), seed);
}

std::vector<SmtDag> corpus(int n, std::uint64_t seed) {
  GenParams p;
  p.depth_max = 4;
  std::vector<SmtDag> out;
  for (int i = 0; i < n; ++i) out.push_back(generate_dag(p, vocab(), derive_seed(seed, i)));
  return out;
}

}  // namespace

TEST_CASE("order_violation examples") {
  CHECK(order_violation(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)) == 0.0);
  CHECK(order_violation(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0)) == 1.0);
  CHECK(order_violation(Eigen::Vector3d(2, -1, 3), Eigen::Vector3d(1, 5, 3)) == 1.0);
  CHECK_THROWS_AS(order_violation(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("zero violation exactly when dominated") {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::VectorXd u(4), v(4);
    for (int i = 0; i < 4; ++i) {
      u[i] = static_cast<double>(rng.uniform_int(-2, 2));
      v[i] = static_cast<double>(rng.uniform_int(-2, 2));
    }
    CHECK((order_violation(u, v) == 0.0) == (u.array() <= v.array()).all());
  }
}

TEST_CASE("pair loss hinge") {
  CHECK(pair_loss(0.0, true, 1.0) == 0.0);
  CHECK(pair_loss(1.5, false, 1.0) == 0.0);
  CHECK(pair_loss(1.0, false, 1.0) == 0.0);
  CHECK(pair_loss(0.3, true, 1.0) + pair_loss(0.2, false, 1.0) == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("margin_loss on identical graphs is zero for positives") {
  const auto params = small_params();
  const auto g = corpus(1, 3)[0];
  std::vector<OrderPair> batch{{g, 0, g, 0, true}};
  CHECK(margin_loss(params, batch, 1.0, vocab().vocab) == 0.0);
  batch[0].positive = false;
  CHECK(margin_loss(params, batch, 1.0, vocab().vocab) == 1.0);
}

TEST_CASE("margin_loss matches the hinge applied to measured violations") {
  const auto params = small_params(2);
  const auto pairs = sample_order_pairs(corpus(6, 4), {3, 3, 2, 9});
  PreparedPairs prepared(pairs, vocab().vocab);
  const auto d = pair_violations(params, prepared);
  double expected = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) expected += pair_loss(d[i], pairs[i].positive, 0.7);
  CHECK(margin_loss(params, pairs, 0.7, vocab().vocab) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("encoder parameter layout") {
  const auto p = small_params();
  const int in = feature_dim(vocab().vocab.dim());
  CHECK(p.slot("input.weight").rows == 16);
  CHECK(p.slot("input.weight").cols == in);
  CHECK(p.slot("layer1.eps").size() == 1);
  CHECK(p.slot("head.weight").cols == 16 * 2);
  CHECK(p.slot("head.weight").rows == 8);
  int total = 0;
  for (const auto& s : p.slots()) total += s.size();
  CHECK(total == p.values().size());
  CHECK(p.all_finite());
  CHECK(p.tensor("layer0.eps")(0, 0) == 0.0);
  CHECK(p.tensor("head.bias").isZero());
  const double a = std::sqrt(6.0 / (in + 16));
  CHECK(p.tensor("input.weight").cwiseAbs().maxCoeff() <= a);
  CHECK(p == small_params());
  CHECK_FALSE(p == small_params(5));
  CHECK_THROWS(p.slot("nope"));
}

TEST_CASE("an isolated leaf only sees its own features") {
  const auto params = small_params();
  const auto g = corpus(1, 8)[0];
  const auto h = encode(params, g, vocab().vocab);
  for (NodeId v = 0; v < g.size(); ++v) {
    if (g.kind(v) != NodeKind::Entity) continue;
    const auto alone = encode(params, testing::single_entity(g.node(v).signature), vocab().vocab);
    CHECK((h.row(v) - alone.row(0)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("encode is permutation equivariant") {
  const auto params = small_params();
  Rng rng(3);
  for (const auto& g : corpus(10, 9)) {
    std::vector<NodeId> perm(static_cast<std::size_t>(g.size()));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    const auto h = encode(params, g, vocab().vocab);
    const auto hp = encode(params, permute_nodes(g, perm), vocab().vocab);
    for (NodeId v = 0; v < g.size(); ++v)
      CHECK((hp.row(perm[static_cast<std::size_t>(v)]) - h.row(v)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("isomorphic rooted DAGs share a root embedding") {
  const auto params = small_params(6);
  for (const auto& g : corpus(10, 10)) {
    const auto sub = descendant_closure(g, 0);
    std::vector<NodeId> perm(static_cast<std::size_t>(sub.dag.size()));
    std::iota(perm.rbegin(), perm.rend(), 0);
    const auto iso = permute_nodes(sub.dag, perm);
    const auto a = encode(params, sub.dag, vocab().vocab);
    const auto b = encode(params, iso, vocab().vocab);
    CHECK((a.row(0) - b.row(perm[0])).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("encode rejects mismatched feature widths") {
  const auto params = small_params();
  SignatureVocab other(0, 16);
  CHECK_THROWS_AS(encode(params, testing::chain3(), other), std::invalid_argument);
}

TEST_CASE("EmbedConfig validation") {
  EmbedConfig c;
  CHECK_NOTHROW(c.validate());
  c.layers = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.margin = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.learning_rate = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.dim = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("grad_check on a quadratic") {
  Eigen::VectorXd x(5);
  x << 0.3, -1.2, 2.0, 0.01, -0.7;
  auto f = [](const Eigen::Matrix<long double, Eigen::Dynamic, 1>& v) { return v.squaredNorm(); };
  const auto r = grad_check(f, x, 2.0 * x, 5, 1e-5);
  CHECK(r.finite);
  CHECK(r.probes == 5);
  CHECK(r.max_relative_error <= 1e-6);

  const auto wrong = grad_check(f, x, 3.0 * x, 5, 1e-5);
  CHECK(wrong.max_relative_error > 0.1);

  auto bad = [](const Eigen::Matrix<long double, Eigen::Dynamic, 1>&) { return std::numeric_limits<long double>::quiet_NaN(); };
  CHECK_FALSE(grad_check(bad, x, x, 2, 1e-5).finite);
}

TEST_CASE("margin loss gradient matches finite differences") {
  auto params = small_params(7);
  const auto pairs = sample_order_pairs(corpus(8, 11), {20, 20, 2, 3});
  PreparedPairs prepared(pairs, vocab().vocab);
  // One positive and one negative with active hinges.
  const auto d = pair_violations(params, prepared);
  std::vector<std::size_t> idx;
  for (bool want : {true, false})
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (pairs[i].positive == want && (want ? d[i] > 0.0 : d[i] < 1.0)) {
        idx.push_back(i);
        break;
      }
  REQUIRE(idx.size() == 2);
  Eigen::VectorXd grad;
  const double value = margin_loss_and_grad(params, prepared, idx, 1.0, grad);
  CHECK(value > 0.0);
  CHECK((grad.array() != 0.0).count() > grad.size() / 2);
  CHECK(value == doctest::Approx(margin_loss_value<double>(params, prepared, idx, 1.0)).epsilon(1e-12));
  auto loss = [&](const Eigen::Matrix<long double, Eigen::Dynamic, 1>& v) {
    EncoderParams p = params;
    p.values() = v.cast<double>();
    return margin_loss_value<long double>(p, prepared, idx, 1.0);
  };
  const auto r = grad_check(loss, params.values(), grad, 100, 1e-5, 1);
  CHECK(r.finite);
  CHECK(r.max_relative_error <= 1e-4);
}

TEST_CASE("adam step") {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 1.0);
  AdamState<Eigen::VectorXd> state(x);
  Eigen::VectorXd g(3);
  g << 2.0, -0.5, 0.0;
  adam_step(x, g, state, 0.1);
  // The first bias-corrected step moves each coordinate by lr * sign(g).
  CHECK(x[0] == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(x[1] == doctest::Approx(1.1).epsilon(1e-6));
  CHECK(x[2] == 1.0);
  CHECK(state.step == 1);

  // Minimizes a quadratic.
  Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 3.0);
  AdamState<Eigen::VectorXd> s2(y);
  for (int i = 0; i < 2000; ++i) adam_step(y, 2.0 * y, s2, 0.05);
  CHECK(y.norm() < 1e-2);
}

TEST_CASE("training with zero steps returns the initialization") {
  auto c = small_config();
  const auto pairs = sample_order_pairs(corpus(6, 12), {8, 8, c.layers, 1});
  PreparedPairs prepared(pairs, vocab().vocab);
  const auto r = train_on_pairs(c, prepared, 5);
  CHECK(r.params == EncoderParams::initialized(feature_dim(vocab().vocab.dim()), c, derive_seed(5, 11)));
  CHECK(r.loss_trace.empty());
}

TEST_CASE("training is deterministic and reduces the loss") {
  auto c = small_config();
  c.steps = 150;
  c.learning_rate = 1e-2;
  const auto graphs = corpus(20, 13);
  const auto a = train_encoder(c, graphs, vocab().vocab, 21);
  const auto b = train_encoder(c, graphs, vocab().vocab, 21);
  CHECK(a.params == b.params);
  CHECK(a.loss_trace == b.loss_trace);
  REQUIRE(a.loss_trace.size() == 150);
  const auto pool = sample_order_pairs(graphs, {c.pool_positives, c.pool_negatives, c.layers, derive_seed(21, 10)});
  const auto initial = EncoderParams::initialized(feature_dim(vocab().vocab.dim()), c, derive_seed(21, 11));
  CHECK(margin_loss(a.params, pool, c.margin, vocab().vocab) < 0.5 * margin_loss(initial, pool, c.margin, vocab().vocab));
  const auto other = train_encoder(c, graphs, vocab().vocab, 22);
  CHECK_FALSE(other.params == a.params);
}

TEST_CASE("non-finite loss aborts training") {
  auto c = small_config();
  c.steps = 5;
  c.learning_rate = 1e300;
  const auto graphs = corpus(10, 14);
  CHECK_THROWS_AS(train_encoder(c, graphs, vocab().vocab, 1), NumericError);
}
