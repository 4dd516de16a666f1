#ifndef VARICHECK_INTEGRAND_HPP_
#define VARICHECK_INTEGRAND_HPP_

#include <vector>

#include "varicheck/expr.hpp"

namespace varicheck {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

/// An integrand L(t, x, v) together with every symbolic partial the
/// condition formulas consume: gradients L_x, L_v, second-order blocks
/// L_xx, L_xv, L_vv, the third-order tensor L_vvv and the mixed L_vt needed
/// by the Euler residual. All members are immutable after construction.
class IntegrandBundle {
 public:
  IntegrandBundle(int n, ExprPtr lagrangian);

  int dimension() const { return n_; }
  const ExprPtr& lagrangian() const { return L_; }

  const ExprPtr& Lx(int i) const { return Lx_[i]; }
  const ExprPtr& Lv(int i) const { return Lv_[i]; }
  const ExprPtr& Lvt(int i) const { return Lvt_[i]; }
  const ExprPtr& Lxx(int i, int j) const { return Lxx_[i][j]; }
  const ExprPtr& Lxv(int i, int j) const { return Lxv_[i][j]; }  // d2L/dx_i dv_j
  const ExprPtr& Lvx(int i, int j) const { return Lxv_[j][i]; }  // d2L/dv_i dx_j
  const ExprPtr& Lvv(int i, int j) const { return Lvv_[i][j]; }
  const ExprPtr& Lvvv(int i, int j, int k) const { return Lvvv_[i][j][k]; }

  double eval_L(const EvalPoint& p) const { return evaluate(L_, p); }
  Vec eval_Lx(const EvalPoint& p) const;
  Vec eval_Lv(const EvalPoint& p) const;
  Vec eval_Lvt(const EvalPoint& p) const;
  Mat eval_Lxx(const EvalPoint& p) const;
  Mat eval_Lxv(const EvalPoint& p) const;
  Mat eval_Lvv(const EvalPoint& p) const;

  /// xi^T Lvv(p) xi
  double quad_form_Lvv(const EvalPoint& p, const Vec& xi) const;
  /// sum_{i,j,k} xi_i xi_j xi_k * Lvvv[i][j][k](p)  — the (3.16) quantity
  double cubic_form_Lvvv(const EvalPoint& p, const Vec& xi) const;

 private:
  int n_;
  ExprPtr L_;
  std::vector<ExprPtr> Lx_, Lv_, Lvt_;
  std::vector<std::vector<ExprPtr>> Lxx_, Lxv_, Lvv_;
  std::vector<std::vector<std::vector<ExprPtr>>> Lvvv_;
};

double dot(const Vec& a, const Vec& b);
Vec mat_vec(const Mat& m, const Vec& v);
double quad_form(const Mat& m, const Vec& a, const Vec& b);
Vec scaled(const Vec& v, double s);
double norm_inf(const Vec& v);
double norm2(const Vec& v);

}  // namespace varicheck

#endif  // VARICHECK_INTEGRAND_HPP_
