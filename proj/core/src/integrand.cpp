#include "varicheck/integrand.hpp"

#include <cmath>
#include <stdexcept>

namespace varicheck {

IntegrandBundle::IntegrandBundle(int n, ExprPtr lagrangian)
    : n_(n), L_(std::move(lagrangian)) {
  if (n_ < 1) throw std::invalid_argument("IntegrandBundle: dimension must be >= 1");
  Lx_.reserve(n_);
  Lv_.reserve(n_);
  for (int i = 1; i <= n_; ++i) {
    Lx_.push_back(differentiate(L_, VarId::state(i)));
    Lv_.push_back(differentiate(L_, VarId::velocity(i)));
  }
  Lvt_.reserve(n_);
  for (int i = 0; i < n_; ++i) Lvt_.push_back(differentiate(Lv_[i], VarId::time()));
  Lxx_.assign(n_, {});
  Lxv_.assign(n_, {});
  Lvv_.assign(n_, {});
  for (int i = 0; i < n_; ++i) {
    for (int j = 1; j <= n_; ++j) {
      Lxx_[i].push_back(differentiate(Lx_[i], VarId::state(j)));
      Lxv_[i].push_back(differentiate(Lx_[i], VarId::velocity(j)));
      Lvv_[i].push_back(differentiate(Lv_[i], VarId::velocity(j)));
    }
  }
  Lvvv_.assign(n_, std::vector<std::vector<ExprPtr>>(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 1; k <= n_; ++k)
        Lvvv_[i][j].push_back(differentiate(Lvv_[i][j], VarId::velocity(k)));
}

Vec IntegrandBundle::eval_Lx(const EvalPoint& p) const {
  Vec out(n_);
  for (int i = 0; i < n_; ++i) out[i] = evaluate(Lx_[i], p);
  return out;
}

Vec IntegrandBundle::eval_Lv(const EvalPoint& p) const {
  Vec out(n_);
  for (int i = 0; i < n_; ++i) out[i] = evaluate(Lv_[i], p);
  return out;
}

Vec IntegrandBundle::eval_Lvt(const EvalPoint& p) const {
  Vec out(n_);
  for (int i = 0; i < n_; ++i) out[i] = evaluate(Lvt_[i], p);
  return out;
}

Mat IntegrandBundle::eval_Lxx(const EvalPoint& p) const {
  Mat out(n_, Vec(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i][j] = evaluate(Lxx_[i][j], p);
  return out;
}

Mat IntegrandBundle::eval_Lxv(const EvalPoint& p) const {
  Mat out(n_, Vec(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i][j] = evaluate(Lxv_[i][j], p);
  return out;
}

Mat IntegrandBundle::eval_Lvv(const EvalPoint& p) const {
  Mat out(n_, Vec(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i][j] = evaluate(Lvv_[i][j], p);
  return out;
}

double IntegrandBundle::quad_form_Lvv(const EvalPoint& p, const Vec& xi) const {
  double acc = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      acc += xi[i] * xi[j] * evaluate(Lvv_[i][j], p);
  return acc;
}

double IntegrandBundle::cubic_form_Lvvv(const EvalPoint& p, const Vec& xi) const {
  double acc = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        acc += xi[i] * xi[j] * xi[k] * evaluate(Lvvv_[i][j][k], p);
  return acc;
}

double dot(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vec mat_vec(const Mat& m, const Vec& v) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

double quad_form(const Mat& m, const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) acc += a[i] * m[i][j] * b[j];
  return acc;
}

Vec scaled(const Vec& v, double s) {
  Vec out(v);
  for (double& x : out) x *= s;
  return out;
}

double norm_inf(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double norm2(const Vec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace varicheck
