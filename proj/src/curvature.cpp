#include "qoptics5/curvature.hpp"

namespace qoptics5 {

namespace {

Mat4 field_strength(const VectorField4& A, const Vec4& x, double h) {
  Mat4 dA;  // dA(m, n) = ∂_m A_n
  for (int m = 0; m < 4; ++m) {
    Vec4 e = Vec4::Zero();
    e[m] = h;
    dA.row(m) = ((A(x + e) - A(x - e)) / (2.0 * h)).transpose();
  }
  return dA - dA.transpose();
}

Vec4 gradient(const ScalarField4& f, const Vec4& x, double h) {
  Vec4 g;
  for (int m = 0; m < 4; ++m) {
    Vec4 e = Vec4::Zero();
    e[m] = h;
    g[m] = (f(x + e) - f(x - e)) / (2.0 * h);
  }
  return g;
}

Mat4 hessian(const ScalarField4& f, const Vec4& x, double h) {
  Mat4 H;
  for (int m = 0; m < 4; ++m)
    for (int n = m; n < 4; ++n) {
      Vec4 em = Vec4::Zero(), en = Vec4::Zero();
      em[m] = h;
      en[n] = h;
      H(m, n) = H(n, m) =
          (f(x + em + en) - f(x + em - en) - f(x - em + en) + f(x - em - en)) / (4.0 * h * h);
    }
  return H;
}

}  // namespace

FieldEqTerms field_equation_terms(const FoliationX5& fol, const Vec4& x, double step) {
  FieldEqTerms t;
  const auto gt_fn = tilde_of(fol).g;
  t.Phi = fol.Phi(x);
  t.gt = gt_fn(x);
  t.gt_inv = checked_inverse<4>(t.gt);
  const Christoffel<4> G = christoffel<4>(gt_fn, x, step);
  t.ricci_t = ricci<4>(gt_fn, x, step);
  t.ricci_scalar_t = t.gt_inv.cwiseProduct(t.ricci_t).sum();

  t.F = field_strength(fol.A, x, step);
  t.F_up = t.gt_inv * t.F * t.gt_inv.transpose();
  const double FF = t.F.cwiseProduct(t.F_up).sum();
  // (F_αλ F^λμ) g_βμ  →  (F · F_up · g)_αβ
  t.T_em = t.F * t.F_up * t.gt + 0.25 * t.gt * FF;

  // ∇_α F_μν = ∂_α F_μν − Γ^λ_αμ F_λν − Γ^λ_αν F_μλ
  std::array<Mat4, 4> dF;
  for (int a = 0; a < 4; ++a) {
    Vec4 e = Vec4::Zero();
    e[a] = step;
    dF[a] = (field_strength(fol.A, x + e, step) - field_strength(fol.A, x - e, step)) / (2.0 * step);
  }
  t.divF.setZero();
  for (int n = 0; n < 4; ++n) {
    double s = 0.0;
    for (int m = 0; m < 4; ++m)
      for (int a = 0; a < 4; ++a) {
        double cov = dF[a](m, n);
        for (int l = 0; l < 4; ++l)
          cov -= G.gamma[l](a, m) * t.F(l, n) + G.gamma[l](a, n) * t.F(m, l);
        s += t.gt_inv(m, a) * cov;
      }
    t.divF[n] = s;
  }

  t.dPhi = gradient(fol.Phi, x, step);
  Mat4 dd = hessian(fol.Phi, x, step);
  for (int l = 0; l < 4; ++l) dd -= G.gamma[l] * t.dPhi[l];
  t.box_phi = t.gt_inv.cwiseProduct(dd).sum();
  const Mat4 bracket = dd - (2.0 / t.Phi) * t.dPhi * t.dPhi.transpose();
  const double bracket_tr = t.gt_inv.cwiseProduct(bracket).sum();
  t.T_phi = bracket / t.Phi - t.gt * bracket_tr / t.Phi;
  return t;
}

FieldEqResidual field_equation_residual(const FoliationX5& fol, const Vec4& x, double step) {
  const FieldEqTerms t = field_equation_terms(fol, x, step);
  const double c4 = std::pow(fol.units.c, 4);
  const double q2 = fol.q * fol.q;
  FieldEqResidual r;
  r.einstein = t.ricci_t - 0.5 * t.gt * t.ricci_scalar_t - (q2 / (2.0 * c4)) * t.T_em - t.T_phi;
  const Vec4 dPhi_up = t.gt_inv * t.dPhi;
  r.maxwell = t.divF + 3.0 * t.F.transpose() * dPhi_up / t.Phi;
  const double FF = t.F.cwiseProduct(t.F_up).sum();
  r.phi = t.box_phi / t.Phi - (q2 / (4.0 * c4)) * FF -
          t.gt_inv.cwiseProduct(t.T_phi).sum() / 6.0;
  return r;
}

}  // namespace qoptics5
