#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "nst/rng.hpp"

namespace nst {

// One GRU layer: update gate z, reset gate r and candidate state c.
//   z  = sigmoid(W_z x + U_z h + b_z)
//   r  = sigmoid(W_r x + U_r h + b_r)
//   c  = tanh(W_c x + U_c (r * h) + b_c)
//   h' = (1 - z) * c + z * h
// The same struct doubles as a gradient accumulator.
struct GruParams {
  Eigen::MatrixXd w_update, w_reset, w_cand;  // d x d_w
  Eigen::MatrixXd u_update, u_reset, u_cand;  // d x d
  Eigen::VectorXd b_update, b_reset, b_cand;  // d

  static GruParams zeros(int input_dim, int hidden_dim);
  // Uniform in [-1/sqrt(d), 1/sqrt(d)].
  static GruParams random(int input_dim, int hidden_dim, Rng& rng);

  int input_dim() const { return static_cast<int>(w_update.cols()); }
  int hidden_dim() const { return static_cast<int>(w_update.rows()); }

  void set_zero();
  bool all_finite() const;
  // Throws UsageError on inconsistent shapes.
  void check_shapes() const;

  GruParams& operator+=(const GruParams& other);
  GruParams& operator*=(double scale);

  // Visits (name, tensor) for every parameter in a fixed order.
  template <typename F>
  void for_each(F&& f) {
    f("w_update", w_update); f("w_reset", w_reset); f("w_cand", w_cand);
    f("u_update", u_update); f("u_reset", u_reset); f("u_cand", u_cand);
    f("b_update", b_update); f("b_reset", b_reset); f("b_cand", b_cand);
  }
  template <typename F>
  void for_each(F&& f) const {
    f("w_update", w_update); f("w_reset", w_reset); f("w_cand", w_cand);
    f("u_update", u_update); f("u_reset", u_reset); f("u_cand", u_cand);
    f("b_update", b_update); f("b_reset", b_reset); f("b_cand", b_cand);
  }
};

// Activations of one step, kept for the backward pass.
struct GruCache {
  Eigen::VectorXd x;
  Eigen::VectorXd h_prev;
  Eigen::VectorXd update;
  Eigen::VectorXd reset;
  Eigen::VectorXd cand;
  Eigen::VectorXd h;
};

Eigen::VectorXd gru_step(const GruParams& p, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& h_prev);

GruCache gru_forward(const GruParams& p, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& h_prev);

// Accumulates parameter gradients into `grads` and returns dL/dh_prev given
// dL/dh. If dx is non-null it receives dL/dx.
Eigen::VectorXd gru_backward(const GruParams& p, const GruCache& cache,
                             const Eigen::VectorXd& dh, GruParams& grads,
                             Eigen::VectorXd* dx = nullptr);

}  // namespace nst
