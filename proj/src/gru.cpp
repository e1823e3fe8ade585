#include "nst/gru.hpp"

#include <cmath>

#include "nst/errors.hpp"

namespace nst {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& a) {
  return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

GruParams GruParams::zeros(int input_dim, int hidden_dim) {
  GruParams p;
  for (auto* w : {&p.w_update, &p.w_reset, &p.w_cand}) w->setZero(hidden_dim, input_dim);
  for (auto* u : {&p.u_update, &p.u_reset, &p.u_cand}) u->setZero(hidden_dim, hidden_dim);
  for (auto* b : {&p.b_update, &p.b_reset, &p.b_cand}) b->setZero(hidden_dim);
  return p;
}

GruParams GruParams::random(int input_dim, int hidden_dim, Rng& rng) {
  GruParams p = zeros(input_dim, hidden_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  p.for_each([&](const char*, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-bound, bound);
  });
  return p;
}

void GruParams::set_zero() {
  for_each([](const char*, auto& t) { t.setZero(); });
}

bool GruParams::all_finite() const {
  bool ok = true;
  for_each([&](const char*, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

void GruParams::check_shapes() const {
  const Eigen::Index d = w_update.rows();
  const Eigen::Index dw = w_update.cols();
  bool ok = true;
  for (const auto* w : {&w_update, &w_reset, &w_cand}) ok = ok && w->rows() == d && w->cols() == dw;
  for (const auto* u : {&u_update, &u_reset, &u_cand}) ok = ok && u->rows() == d && u->cols() == d;
  for (const auto* b : {&b_update, &b_reset, &b_cand}) ok = ok && b->size() == d;
  if (!ok) throw UsageError("inconsistent GRU parameter shapes");
}

GruParams& GruParams::operator+=(const GruParams& other) {
  w_update += other.w_update; w_reset += other.w_reset; w_cand += other.w_cand;
  u_update += other.u_update; u_reset += other.u_reset; u_cand += other.u_cand;
  b_update += other.b_update; b_reset += other.b_reset; b_cand += other.b_cand;
  return *this;
}

GruParams& GruParams::operator*=(double scale) {
  for_each([scale](const char*, auto& t) { t *= scale; });
  return *this;
}

GruCache gru_forward(const GruParams& p, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& h_prev) {
  if (x.size() != p.w_update.cols() || h_prev.size() != p.u_update.rows()) {
    throw UsageError("gru_step: input or state dimension mismatch");
  }
  GruCache c;
  c.x = x;
  c.h_prev = h_prev;
  c.update = sigmoid(p.w_update * x + p.u_update * h_prev + p.b_update);
  c.reset = sigmoid(p.w_reset * x + p.u_reset * h_prev + p.b_reset);
  c.cand = (p.w_cand * x + p.u_cand * c.reset.cwiseProduct(h_prev) + p.b_cand)
               .array()
               .tanh()
               .matrix();
  c.h = (1.0 - c.update.array()) * c.cand.array() + c.update.array() * h_prev.array();
  return c;
}

Eigen::VectorXd gru_step(const GruParams& p, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& h_prev) {
  return gru_forward(p, x, h_prev).h;
}

Eigen::VectorXd gru_backward(const GruParams& p, const GruCache& c,
                             const Eigen::VectorXd& dh, GruParams& g,
                             Eigen::VectorXd* dx) {
  const auto one = Eigen::ArrayXd::Ones(dh.size());
  Eigen::VectorXd dh_prev = dh.cwiseProduct(c.update);

  const Eigen::VectorXd d_cand_pre =
      (dh.array() * (one - c.update.array()) * (one - c.cand.array().square())).matrix();
  const Eigen::VectorXd d_update_pre =
      (dh.array() * (c.h_prev.array() - c.cand.array()) * c.update.array() *
       (one - c.update.array()))
          .matrix();

  const Eigen::VectorXd gated = c.reset.cwiseProduct(c.h_prev);
  g.w_cand.noalias() += d_cand_pre * c.x.transpose();
  g.u_cand.noalias() += d_cand_pre * gated.transpose();
  g.b_cand += d_cand_pre;
  const Eigen::VectorXd d_gated = p.u_cand.transpose() * d_cand_pre;
  dh_prev += d_gated.cwiseProduct(c.reset);
  const Eigen::VectorXd d_reset_pre =
      (d_gated.array() * c.h_prev.array() * c.reset.array() * (one - c.reset.array()))
          .matrix();

  g.w_update.noalias() += d_update_pre * c.x.transpose();
  g.u_update.noalias() += d_update_pre * c.h_prev.transpose();
  g.b_update += d_update_pre;
  g.w_reset.noalias() += d_reset_pre * c.x.transpose();
  g.u_reset.noalias() += d_reset_pre * c.h_prev.transpose();
  g.b_reset += d_reset_pre;

  dh_prev.noalias() += p.u_update.transpose() * d_update_pre;
  dh_prev.noalias() += p.u_reset.transpose() * d_reset_pre;

  if (dx) {
    *dx = p.w_cand.transpose() * d_cand_pre + p.w_update.transpose() * d_update_pre +
          p.w_reset.transpose() * d_reset_pre;
  }
  return dh_prev;
}

}  // namespace nst
