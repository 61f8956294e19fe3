#include <algorithm>
#include <cmath>

#include "jamlab/common/error.hpp"
#include "jamlab/q_forge/agent.hpp"

namespace jamlab::q_forge {

QTable::QTable(std::size_t states, std::size_t actions)
    : states_(states), actions_(actions), q_(states * actions, 0.0) {
  require(states > 0 && actions > 0, ErrorKind::invalid_config, "Q-table needs states and actions");
}

SarsaResult train_sarsa(const EnvFactory& factory, const AgentConfig& cfg, std::size_t episodes, std::uint64_t seed,
                        const QTable* init, const EpisodeCallback& on_episode) {
  cfg.validate();
  auto env = factory();
  SarsaResult out{QTable(env->discrete_state_count(), env->action_count()), {}};
  QTable& q = out.table;
  if (init) {
    require(init->states() == q.states() && init->actions() == q.actions(), ErrorKind::shape_mismatch,
            "initial Q-table does not match the environment");
    q = *init;
  }
  std::vector<std::size_t> visits(q.states() * q.actions(), 0);
  Rng rng(derive_seed(seed, 0xAC7ULL));

  for (std::size_t e = 0; e < episodes; ++e) {
    const double eps = cfg.epsilon.at(e);
    env->reset(episode_seed(seed, e));
    std::size_t s = env->discrete_state();
    std::size_t a = select_action(q.row(s), eps, rng);
    double total = 0.0, sq_sum = 0.0;
    std::size_t count = 0;
    for (;;) {
      const EnvStep step = env->step(a);
      total += step.reward;
      const std::size_t s2 = env->discrete_state();
      std::size_t a2 = 0;
      double target = step.reward;
      if (!step.done) {
        a2 = select_action(q.row(s2), eps, rng);
        target += cfg.gamma * q.at(s2, a2);
      }
      const double delta = target - q.at(s, a);
      const double alpha = cfg.sarsa_alpha / (1.0 + cfg.sarsa_alpha_decay * double(visits[s * q.actions() + a]++));
      q.at(s, a) += alpha * delta;
      require(std::isfinite(q.at(s, a)), ErrorKind::numeric, "non-finite SARSA update");
      sq_sum += delta * delta;
      ++count;
      if (step.done) break;
      s = s2;
      a = a2;
    }
    out.trace.push(total, eps, sq_sum / double(count));
    if (on_episode) on_episode(e, total);
  }
  return out;
}

Policy greedy_policy(const QTable& table) {
  return [&table](const Environment& env) {
    const auto row = table.row(env.discrete_state());
    return std::size_t(std::max_element(row.begin(), row.end()) - row.begin());
  };
}

}  // namespace jamlab::q_forge
