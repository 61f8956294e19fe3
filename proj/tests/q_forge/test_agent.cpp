#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "jamlab/common/error.hpp"
#include "jamlab/fusion_net/ops.hpp"
#include "jamlab/q_forge/agent.hpp"
#include "../support/gradcheck.hpp"

using namespace jamlab;
using namespace jamlab::q_forge;
using fusion_net::Tensor;

namespace {

std::vector<double> flat_params(const QNetwork& n) {
  std::vector<double> out;
  for (const auto& [name, t] : n.params().items()) out.insert(out.end(), t.data().begin(), t.data().end());
  return out;
}

Transition random_transition(Rng& rng, std::size_t dim, std::size_t actions) {
  Transition t;
  for (std::size_t i = 0; i < dim; ++i) {
    t.s.push_back(uniform(rng, 0.0, 1.0));
    t.s_next.push_back(uniform(rng, 0.0, 1.0));
  }
  t.a = uniform_index(rng, actions);
  t.r = uniform(rng, -100.0, 30.0);
  t.done = uniform(rng, 0.0, 1.0) < 0.2;
  return t;
}

}  // namespace

TEST_CASE("select_action: greedy, ties, uniform exploration") {
  Rng rng(3);
  const std::vector<double> q{1, 5, 3};
  CHECK(select_action(q, 0.0, rng) == 1);
  const std::vector<double> tie{2, 2, 0};
  CHECK(select_action(tie, 0.0, rng) == 0);
  std::array<int, 3> hist{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++hist[select_action(q, 1.0, rng)];
  for (int h : hist) CHECK(std::abs(double(h) / n - 1.0 / 3.0) <= 0.03);
  CHECK_THROWS_AS(select_action(q, 1.5, rng), Error);
  CHECK_THROWS_AS(select_action(std::vector<double>{}, 0.0, rng), Error);
}

TEST_CASE("td_target: arithmetic, terminal, linearity") {
  const std::vector<double> next{3.0, 10.0, -2.0};
  CHECK(td_target(30.0, next, false, 0.9) == doctest::Approx(39.0).epsilon(1e-15));
  CHECK(td_target(30.0, next, false, 0.0) == 30.0);
  CHECK(td_target(30.0, next, true, 0.9) == 30.0);
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double r = double(int(uniform_index(rng, 200)) - 100);
    const double delta = double(int(uniform_index(rng, 64))) / 8.0;
    const std::vector<double> q{double(uniform_index(rng, 50)) / 4.0, double(uniform_index(rng, 50)) / 4.0};
    CHECK(td_target(r + delta, q, false, 0.5) - td_target(r, q, false, 0.5) == delta);
  }
}

TEST_CASE("q_forward: shape, determinism, zero final layer") {
  QNetwork net(8, 30, {64, 64}, 1);
  CHECK(net.params().size() == 6);
  const std::vector<double> s{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  const auto a = net.q_values(s), b = net.q_values(s);
  CHECK(a.size() == 30);
  CHECK(a == b);
  CHECK_THROWS_AS(net.forward(Tensor::zeros({2, 7})), Error);

  auto w = net.params().find("q.out.w");
  auto bias = net.params().find("q.out.b");
  std::fill(w.data().begin(), w.data().end(), 0.0);
  for (std::size_t i = 0; i < bias.numel(); ++i) bias.data()[i] = double(i) * 0.5;
  const auto z = net.q_values(s);
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == double(i) * 0.5);
}

TEST_CASE("q_forge gradient checks") {
  for (const auto& c : testing::q_forge_grad_cases()) {
    const auto rep = testing::run_grad_case(c, 2024);
    INFO(c.name << " worst " << rep.worst_rel);
    CHECK(rep.ok());
    CHECK(rep.sampled == 50);
  }
}

TEST_CASE("train_step: zero loss leaves params, overfit, bounded rewards") {
  AgentConfig cfg;
  cfg.gamma = 0.0;
  QNetwork online(4, 3, {16, 16}, 5), target(4, 3, {16, 16}, 6);
  fusion_net::Adam opt(online.params(), {cfg.lr});
  Rng rng(9);

  std::vector<Transition> exact;
  std::vector<double> flat;
  for (int i = 0; i < 8; ++i) {
    exact.push_back(random_transition(rng, 4, 3));
    exact.back().done = true;
    flat.insert(flat.end(), exact.back().s.begin(), exact.back().s.end());
  }
  const auto q = online.forward(Tensor::from({8, 4}, flat)).data();
  std::vector<const Transition*> batch;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    exact[i].r = q[i * 3 + exact[i].a];
    batch.push_back(&exact[i]);
  }
  const auto before = flat_params(online);
  CHECK(train_step(online, target, batch, cfg, opt) == 0.0);
  CHECK(flat_params(online) == before);

  cfg.gamma = 0.9;
  fusion_net::Adam fast(online.params(), {1e-2});
  std::vector<Transition> fixed;
  for (int i = 0; i < 32; ++i) {
    fixed.push_back(random_transition(rng, 4, 3));
    fixed.back().r /= 100.0;
  }
  batch.clear();
  for (const auto& t : fixed) batch.push_back(&t);
  const auto target_before = flat_params(target);
  const double first = train_step(online, target, batch, cfg, fast);
  double last = first;
  for (int i = 0; i < 500; ++i) {
    last = train_step(online, target, batch, cfg, fast);
    CHECK(std::isfinite(last));
  }
  CHECK(last < 0.01 * first);
  CHECK(flat_params(target) == target_before);

  std::vector<Transition> wide;
  for (int i = 0; i < 64; ++i) wide.push_back(random_transition(rng, 4, 3));
  batch.clear();
  for (const auto& t : wide) batch.push_back(&t);
  for (int i = 0; i < 20; ++i) CHECK(std::isfinite(train_step(online, target, batch, cfg, opt)));
  CHECK_THROWS_AS(train_step(online, target, {}, cfg, opt), Error);
}

TEST_CASE("sync_target: copies on the period only") {
  AgentConfig cfg;
  cfg.target_sync_steps = 4;
  QNetwork online(3, 2, {5}, 1), target(3, 2, {5}, 2);
  const auto t0 = flat_params(target);
  for (std::size_t step : {0, 1, 2, 3, 5, 7}) {
    CHECK_FALSE(sync_target(online, target, step, cfg));
    CHECK(flat_params(target) == t0);
  }
  CHECK(sync_target(online, target, 8, cfg));
  const auto a = flat_params(online), b = flat_params(target);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  CHECK(worst == 0.0);
}

TEST_CASE("replay buffer: FIFO eviction and uniform sampling") {
  ReplayBuffer buf(10);
  for (int i = 0; i < 13; ++i) buf.push({{double(i)}, 0, double(i), {0.0}, false});
  CHECK(buf.size() == 10);
  for (std::size_t i = 0; i < buf.size(); ++i) CHECK(buf.at(i).r == double(i + 3));
  for (int old = 0; old < 3; ++old)
    for (std::size_t i = 0; i < buf.size(); ++i) CHECK(buf.at(i).r != double(old));

  Rng rng(12);
  std::array<int, 10> hist{};
  const int n = 100000;
  for (const auto* t : buf.sample(n, rng)) ++hist[std::size_t(t->r) - 3];
  for (int h : hist) CHECK(std::abs(double(h) / n - 0.1) <= 0.005);
  CHECK_THROWS_AS(ReplayBuffer(0), Error);
  ReplayBuffer empty(4);
  CHECK_THROWS_AS(empty.sample(1, rng), Error);
}

TEST_CASE("agent config validation and epsilon schedule") {
  AgentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.epsilon.at(0) == 1.0);
  CHECK(cfg.epsilon.at(150) == doctest::Approx(0.525));
  CHECK(cfg.epsilon.at(300) == 0.05);
  CHECK(cfg.epsilon.at(5000) == 0.05);
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.batch_size = cfg.buffer_capacity + 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.epsilon.end = -0.1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
