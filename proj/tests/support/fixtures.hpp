#pragma once

// Hand-checked fixture networks shared across suites.

#include <string_view>

#include "tinfer/network.hpp"

namespace fixtures {

// Two binary variables A=0, B=1 with factors [0.6, 0.4] over {A} and
// [[0.7, 0.3], [0.25, 0.75]] over {A, B}. Joint: 0.42 0.18 / 0.10 0.30.
inline tinfer::TensorNetwork n1() {
  tinfer::TensorNetwork net;
  net.num_vars = 2;
  net.cards = {2, 2};
  net.tensors.push_back(tinfer::LabeledTensor({0}, {2}, {0.6, 0.4}));
  net.tensors.push_back(tinfer::LabeledTensor({0, 1}, {2, 2}, {0.7, 0.3, 0.25, 0.75}));
  return net;
}

inline constexpr std::string_view n1_uai =
    "BAYES\n2\n2 2\n2\n1 0\n2 0 1\n\n2\n 0.6 0.4\n\n4\n 0.7 0.3\n 0.25 0.75\n";

// Five tensors over six variables, all dimensions 2: a ring-like topology
// whose all-ones contraction to {i, m} counts 2^4 joint states per entry.
inline tinfer::TensorNetwork ring6() {
  using T = tinfer::LabeledTensor;
  tinfer::TensorNetwork net;
  net.num_vars = 6;  // i=0 j=1 k=2 l=3 m=4 n=5
  net.cards = {2, 2, 2, 2, 2, 2};
  net.tensors.push_back(T({0, 3}, {2, 2}, std::vector<double>(4, 1.0)));
  net.tensors.push_back(T({3}, {2}, std::vector<double>(2, 1.0)));
  net.tensors.push_back(T({1, 2, 3}, {2, 2, 2}, std::vector<double>(8, 1.0)));
  net.tensors.push_back(T({2, 4, 5}, {2, 2, 2}, std::vector<double>(8, 1.0)));
  net.tensors.push_back(T({1, 5}, {2, 2}, std::vector<double>(4, 1.0)));
  net.output_vars = {0, 4};
  return net;
}

}  // namespace fixtures
