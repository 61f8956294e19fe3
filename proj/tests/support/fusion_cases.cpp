#include "gradcheck.hpp"
#include "jamlab/fusion_net/layers.hpp"
#include "jamlab/fusion_net/recognizer.hpp"

namespace jamlab::testing {

using namespace fusion_net;

namespace {

GradCase unary(std::string name, Shape shape, std::function<Tensor(const Tensor&)> op) {
  return {std::move(name), [shape, op](Rng& rng) {
            Tensor x = rand_leaf(shape, rng);
            return GradProblem{{x}, [x, op] { return op(x); }};
          }};
}

GradCase binary(std::string name, Shape sa, Shape sb, std::function<Tensor(const Tensor&, const Tensor&)> op) {
  return {std::move(name), [sa, sb, op](Rng& rng) {
            Tensor a = rand_leaf(sa, rng), b = rand_leaf(sb, rng);
            return GradProblem{{a, b}, [a, b, op] { return op(a, b); }};
          }};
}

GradCase conv_case(std::string name, Shape x_shape, std::size_t f, std::size_t k, std::size_t stride, std::size_t pad) {
  return {std::move(name), [=](Rng& rng) {
            Tensor x = rand_leaf(x_shape, rng);
            Tensor w = rand_leaf({f, x_shape[1], k, k}, rng, 0.5);
            Tensor b = rand_leaf({f}, rng);
            return GradProblem{{x, w, b}, [=] { return conv2d(x, w, b, stride, pad); }};
          }};
}

}  // namespace

std::vector<GradCase> fusion_net_grad_cases() {
  std::vector<GradCase> cases;
  cases.push_back(binary("add", {4, 5, 3}, {4, 5, 3}, [](auto& a, auto& b) { return add(a, b); }));
  cases.push_back(binary("mul", {4, 5, 3}, {4, 5, 3}, [](auto& a, auto& b) { return mul(a, b); }));
  cases.push_back(unary("scale", {6, 10}, [](auto& x) { return scale(x, -1.7); }));
  cases.push_back(unary("sum", {6, 10}, [](auto& x) { return sum(x); }));
  cases.push_back(binary("matmul", {5, 7}, {7, 6}, [](auto& a, auto& b) { return matmul(a, b); }));
  cases.push_back(binary("bmm", {3, 4, 5}, {3, 5, 6}, [](auto& a, auto& b) { return bmm(a, b); }));
  cases.push_back(binary("bmm_transposed", {3, 4, 5}, {3, 6, 5}, [](auto& a, auto& b) { return bmm(a, b, true); }));
  cases.push_back({"linear", [](Rng& rng) {
                     Tensor x = rand_leaf({2, 3, 7}, rng), w = rand_leaf({5, 7}, rng), b = rand_leaf({5}, rng);
                     return GradProblem{{x, w, b}, [=] { return linear(x, w, b); }};
                   }});
  cases.push_back(conv_case("conv2d_3x3", {2, 3, 6, 6}, 4, 3, 1, 1));
  cases.push_back(conv_case("conv2d_7x7_s2", {2, 2, 9, 9}, 3, 7, 2, 3));
  cases.push_back(conv_case("conv2d_1x1", {2, 5, 4, 4}, 3, 1, 1, 0));
  cases.push_back({"maxpool2d", [](Rng& rng) {
                     Tensor x = distinct_leaf({2, 3, 7, 7}, rng);
                     return GradProblem{{x}, [x] { return maxpool2d(x, 3, 2, 1); }};
                   }});
  cases.push_back(unary("avgpool2d", {2, 3, 4, 6}, [](auto& x) { return avgpool2d(x, 2); }));
  cases.push_back(unary("relu", {8, 9}, [](auto& x) { return relu(x); }));
  cases.push_back(unary("sigmoid", {8, 9}, [](auto& x) { return sigmoid(x); }));
  cases.push_back(unary("dropout", {8, 9}, [](auto& x) {
    Rng mask(77);
    return dropout(x, 0.4, mask, true);
  }));
  cases.push_back(unary("gap", {2, 4, 3, 5}, [](auto& x) { return gap(x); }));
  cases.push_back(unary("token_mean", {2, 6, 5}, [](auto& x) { return token_mean(x); }));
  cases.push_back({"concat", [](Rng& rng) {
                     Tensor a = rand_leaf({2, 3, 2, 2}, rng), b = rand_leaf({2, 5, 2, 2}, rng);
                     return GradProblem{{a, b}, [=] { return concat({a, b}, 1); }};
                   }});
  cases.push_back(unary("reshape", {4, 15}, [](auto& x) { return reshape(x, {3, 20}); }));
  cases.push_back(unary("transpose12", {3, 4, 5}, [](auto& x) { return transpose12(x); }));
  cases.push_back(unary("map_to_tokens", {2, 4, 3, 3}, [](auto& x) { return map_to_tokens(x); }));
  cases.push_back(unary("split_heads", {2, 5, 8}, [](auto& x) { return split_heads(x, 2); }));
  cases.push_back(unary("merge_heads", {4, 5, 4}, [](auto& x) { return merge_heads(x, 2); }));
  cases.push_back(unary("softmax_rows", {6, 7}, [](auto& x) { return softmax_rows(x); }));
  cases.push_back(binary("scale_channels", {2, 4}, {2, 4, 3, 3}, [](auto& g, auto& f) { return scale_channels(g, f); }));
  cases.push_back(binary("channel_gate_tokens", {2, 9, 4}, {2, 4, 3, 3}, [](auto& a, auto& f) { return channel_gate(a, f); }));
  cases.push_back(binary("channel_gate_map", {2, 4, 3, 3}, {2, 4, 3, 3}, [](auto& a, auto& f) { return channel_gate(a, f); }));
  cases.push_back({"attention_core", [](Rng& rng) {
                     Tensor q = rand_leaf({2, 4, 8}, rng), k = rand_leaf({2, 5, 8}, rng), v = rand_leaf({2, 5, 8}, rng);
                     return GradProblem{{q, k, v}, [=] { return attention_core(q, k, v, 2); }};
                   }});
  cases.push_back({"multi_head_attention", [](Rng& rng) {
                     auto ps = std::make_shared<ParamSet>();
                     auto mha = std::make_shared<MultiHeadAttention>(*ps, "mha", 8, 2, rng);
                     Tensor q = rand_leaf({2, 3, 8}, rng), kv = rand_leaf({2, 4, 8}, rng);
                     std::vector<Tensor> inputs{q, kv};
                     for (const auto& [_, t] : ps->items()) inputs.push_back(t);
                     return GradProblem{inputs, [=] { return (*mha)(q, kv); }};
                   }});
  cases.push_back({"softmax_xent", [](Rng& rng) {
                     Tensor z = rand_leaf({5, 3}, rng, 3.0);
                     return GradProblem{{z}, [z] { return softmax_xent(z, {0, 2, 1, 1, 0}); }};
                   }});
  cases.push_back({"mse", [](Rng& rng) {
                     Tensor p = rand_leaf({12}, rng, 5.0);
                     std::vector<double> y(12);
                     for (double& v : y) v = uniform(rng, -5.0, 5.0);
                     return GradProblem{{p}, [p, y] { return mse(p, y); }};
                   }});
  cases.push_back({"pick", [](Rng& rng) {
                     Tensor x = rand_leaf({6, 5}, rng);
                     return GradProblem{{x}, [x] { return pick(x, {4, 0, 2, 2, 1, 3}); }};
                   }});
  return cases;
}

std::vector<GradCase> fusion_net_network_cases() {
  std::vector<GradCase> cases;
  cases.push_back({"recognizer", [](Rng& rng) {
                     RecognizerConfig cfg;
                     cfg.image_side = 16;
                     cfg.stem_channels = 4;
                     cfg.tf_mid_channels = 4;
                     cfg.tf_units = 2;
                     cfg.time_channels = 4;
                     cfg.time_res_blocks = 2;
                     cfg.model_width = 8;
                     cfg.attention_heads = 2;
                     cfg.head_dim = 4;
                     cfg.classifier_hidden = 6;
                     cfg.time_stem_dropout = cfg.residual_dropout = cfg.classifier_dropout = 0.0;
                     auto net = std::make_shared<Recognizer>(cfg, rng());
                     RecognizerBatch batch{rand_leaf({2, 1, 16, 16}, rng), rand_leaf({2, 1, 16, 16}, rng),
                                           rand_leaf({2, 2, 16, 16}, rng)};
                     std::vector<Tensor> inputs;
                     for (const auto& [_, t] : net->params().items()) {
                       inputs.push_back(t);
                       // Zero biases put dead-ReLU patches exactly on the kink.
                       if (t.rank() == 1)
                         for (double& v : inputs.back().data()) v = uniform(rng, -0.1, 0.1);
                     }
                     return GradProblem{inputs, [net, batch] {
                                          Rng unused(0);
                                          return softmax_xent(net->forward(batch, false, unused), {1, 2});
                                        }};
                   }});
  return cases;
}

}  // namespace jamlab::testing
