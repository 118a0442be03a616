#include "qceq/angles.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qceq {

double mod_pos(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  if (period - r < 1e-12 || r < 0) r = 0.0;
  return r;
}

double mod_2pi(double x) { return mod_pos(x, kTau); }
double mod_4pi(double x) { return mod_pos(x, 2.0 * kTau); }

double snap_angle(double x, double eps) {
  double k = std::round(x / kPi);
  double snapped = k * kPi;
  return std::abs(x - snapped) <= eps ? snapped : x;
}

bool angle_is(double x, double v, double eps) { return std::abs(x - v) <= eps; }

namespace {

Matrix mat_p(double a) {
  Matrix m(2, 2);
  m << 1, 0, 0, std::polar(1.0, a);
  return m;
}

Matrix mat_rx(double t) {
  Matrix m(2, 2);
  Complex c(std::cos(t / 2), 0), s(0, -std::sin(t / 2));
  m << c, s, s, c;
  return m;
}

constexpr double kBranchEps = 1e-10;

} // namespace

Matrix euler_zxz_matrix(const EulerAngles &e) {
  return std::polar(1.0, e.b0) * mat_p(e.b3) * mat_rx(e.b2) * mat_p(e.b1);
}

Matrix euler_xzx_matrix(const EulerAngles &e) {
  return std::polar(1.0, e.b0) * mat_rx(e.b3) * mat_p(e.b2) * mat_rx(e.b1);
}

EulerAngles euler_zxz(const Matrix &u) {
  if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, {1e-9}))
    throw Error(ErrorCode::NotUnitary, "euler_zxz expects a 2x2 unitary");
  EulerAngles e;
  double a = std::abs(u(0, 0)), b = std::abs(u(0, 1));
  if (b <= kBranchEps) {
    // Diagonal: b2 = 0 forces b1 = 0.
    e.b0 = mod_2pi(std::arg(u(0, 0)));
    e.b3 = mod_2pi(std::arg(u(1, 1)) - e.b0);
    return e;
  }
  if (a <= kBranchEps) {
    // Antidiagonal: b2 = pi forces b1 = 0.
    e.b2 = kPi;
    e.b0 = mod_2pi(std::arg(u(0, 1)) + kPi / 2);
    e.b3 = mod_2pi(std::arg(u(1, 0)) + kPi / 2 - e.b0);
    return e;
  }
  e.b0 = mod_2pi(std::arg(u(0, 0)));
  e.b2 = 2.0 * std::atan2(b, a);
  e.b1 = snap_angle(mod_2pi(std::arg(u(0, 1)) + kPi / 2 - e.b0));
  e.b3 = mod_2pi(std::arg(u(1, 0)) + kPi / 2 - e.b0);
  if (e.b1 >= kPi) {
    // P(b1) = P(b1-pi) Z; pushing the Z through Rx flips the rotation.
    e.b1 -= kPi;
    e.b2 = kTau - e.b2;
    e.b3 = mod_2pi(e.b3 + kPi);
    e.b0 = mod_2pi(e.b0 + kPi);
  }
  auto tidy = [](double x) {
    x = snap_angle(mod_2pi(x));
    if (x >= kTau) x -= kTau;
    return x == 0.0 ? 0.0 : x;
  };
  e.b0 = tidy(e.b0);
  e.b1 = tidy(e.b1);
  e.b2 = tidy(e.b2);
  e.b3 = tidy(e.b3);
  return e;
}

EulerAngles euler_xzx(const Matrix &u) {
  if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, {1e-9}))
    throw Error(ErrorCode::NotUnitary, "euler_xzx expects a 2x2 unitary");
  Matrix h(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  EulerAngles z = euler_zxz(h * u * h);
  EulerAngles e;
  e.b1 = z.b1;
  e.b2 = z.b2;
  e.b3 = z.b3;
  e.b0 = mod_2pi(z.b0 + (z.b1 - z.b2 + z.b3) / 2.0);
  e.b0 = snap_angle(e.b0);
  return e;
}

namespace {

Matrix cp_block(double a) {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = std::polar(1.0, a);
  return m;
}

Matrix pb_block(double a) { // P on the last qubit
  Matrix m = Matrix::Identity(4, 4);
  m(1, 1) = m(3, 3) = std::polar(1.0, a);
  return m;
}

Matrix pa_block(double a) { // P on the next-to-last qubit
  Matrix m = Matrix::Identity(4, 4);
  m(2, 2) = m(3, 3) = std::polar(1.0, a);
  return m;
}

Matrix rx_b_ctrl_a(double t) { // Rx on b, controlled by a: mixes |10>,|11>
  Matrix m = Matrix::Identity(4, 4);
  Complex c(std::cos(t / 2), 0), s(0, -std::sin(t / 2));
  m(2, 2) = c;
  m(2, 3) = s;
  m(3, 2) = s;
  m(3, 3) = c;
  return m;
}

Matrix rx_a_ctrl_b(double t) { // Rx on a, controlled by b: mixes |01>,|11>
  Matrix m = Matrix::Identity(4, 4);
  Complex c(std::cos(t / 2), 0), s(0, -std::sin(t / 2));
  m(1, 1) = c;
  m(1, 3) = s;
  m(3, 1) = s;
  m(3, 3) = c;
  return m;
}

} // namespace

Matrix kstar_lhs_block(const std::array<double, 4> &g) {
  return rx_a_ctrl_b(g[3]) * rx_b_ctrl_a(g[2]) * cp_block(g[1]) *
         rx_a_ctrl_b(g[0]);
}

Matrix kstar_rhs_block(const std::array<double, 8> &d) {
  return pa_block(d[7]) * cp_block(d[6]) * rx_b_ctrl_a(d[5]) * cp_block(d[4]) *
         rx_a_ctrl_b(d[3]) * rx_b_ctrl_a(d[2]) * pb_block(d[1]) *
         cp_block(d[0]);
}

Matrix kstar_old_rhs_block(const std::array<double, 9> &d) {
  std::array<double, 8> head;
  std::copy_n(d.begin(), 8, head.begin());
  return pb_block(d[8]) * kstar_rhs_block(head);
}

namespace {

double arg_sign(double x) { return x < 0 ? kPi : 0.0; }

struct Candidate {
  std::array<double, 8> d{};
  double residual = 0;
};

void canonical_ranges(std::array<double, 8> &d) {
  d[0] = mod_2pi(d[0]);
  d[1] = mod_2pi(d[1]);
  d[2] = mod_2pi(d[2]);
  d[3] = mod_4pi(d[3]);
  d[4] = mod_2pi(d[4]);
  d[5] = mod_2pi(d[5]);
  d[6] = mod_2pi(d[6]);
  d[7] = mod_2pi(d[7]);
  for (double &x : d) x = snap_angle(x);
  if (d[3] == 2.0 * kTau) d[3] = 0;
  for (int i : {0, 1, 2, 4, 5, 6, 7})
    if (d[static_cast<std::size_t>(i)] == kTau) d[static_cast<std::size_t>(i)] = 0;
}

bool check_kstar_clauses(const std::array<double, 8> &d, std::string *why) {
  auto fail = [&](const char *msg) {
    if (why) *why = msg;
    return false;
  };
  if (!(d[0] >= 0 && d[0] < kPi)) return fail("delta1 out of [0,pi)");
  if (!(d[1] >= 0 && d[1] < kPi)) return fail("delta2 out of [0,pi)");
  if (!(d[4] >= 0 && d[4] < kPi)) return fail("delta5 out of [0,pi)");
  for (int i : {2, 5, 6, 7})
    if (!(d[static_cast<std::size_t>(i)] >= 0 && d[static_cast<std::size_t>(i)] < kTau))
      return fail("angle out of [0,2pi)");
  if (!(d[3] >= 0 && d[3] < 2.0 * kTau)) return fail("delta4 out of [0,4pi)");
  if (angle_is(d[2], 0) && !angle_is(d[5], 0) && !angle_is(d[1], 0))
    return fail("delta3=0, delta6!=0 requires delta2=0");
  if (angle_is(d[2], kPi) && !angle_is(d[0], 0))
    return fail("delta3=pi requires delta1=0");
  if ((angle_is(d[3], 0) || angle_is(d[3], kTau)) &&
      !(angle_is(d[0], 0) && angle_is(d[2], 0)))
    return fail("delta4 in {0,2pi} requires delta1=delta3=0");
  // The delta2 pinning at delta4 in {pi,3pi} exempts the pure-phase branch
  // (delta3 = delta6 = 0), which carries the absorbed bottom phase in delta2.
  if ((angle_is(d[3], kPi) || angle_is(d[3], 3 * kPi)) &&
      !angle_is(d[2], 0) && !angle_is(d[1], 0))
    return fail("delta4 in {pi,3pi}, delta3!=0 requires delta2=0");
  if ((angle_is(d[3], kPi) || angle_is(d[3], 3 * kPi)) && angle_is(d[2], 0) &&
      !angle_is(d[0], 0))
    return fail("delta4 in {pi,3pi}, delta3=0 requires delta1=0");
  if ((angle_is(d[5], 0) || angle_is(d[5], kPi)) && !angle_is(d[4], 0))
    return fail("delta6 in {0,pi} requires delta5=0");
  return true;
}

// Gauss-Newton polish of the free coordinates against the target block.
void polish_kstar(std::array<double, 8> &d, const Matrix &target) {
  std::vector<int> free_idx;
  for (int i = 0; i < 8; ++i) {
    double v = d[static_cast<std::size_t>(i)];
    // Coordinates sitting exactly on a snapped multiple of pi are pinned by
    // the canonicity clauses; polish the rest.
    if (std::abs(v - std::round(v / kPi) * kPi) > 1e-14) free_idx.push_back(i);
  }
  if (free_idx.empty()) return;
  auto resid = [&](const std::array<double, 8> &x) {
    Matrix diff = kstar_rhs_block(x) - target;
    Eigen::VectorXd r(32);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        r(2 * (4 * i + j)) = diff(i, j).real();
        r(2 * (4 * i + j) + 1) = diff(i, j).imag();
      }
    return r;
  };
  const int k = static_cast<int>(free_idx.size());
  Eigen::VectorXd f = resid(d);
  for (int iter = 0; iter < 50 && f.lpNorm<Eigen::Infinity>() > 1e-11; ++iter) {
    Eigen::MatrixXd jac(32, k);
    const double h = 1e-7;
    for (int c = 0; c < k; ++c) {
      std::array<double, 8> hi = d, lo = d;
      hi[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(c)])] += h;
      lo[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(c)])] -= h;
      jac.col(c) = (resid(hi) - resid(lo)) / (2 * h);
    }
    Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-f);
    double scale = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 10; ++bt, scale *= 0.5) {
      std::array<double, 8> trial = d;
      for (int c = 0; c < k; ++c)
        trial[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(c)])] += scale * step(c);
      Eigen::VectorXd ft = resid(trial);
      if (ft.norm() < f.norm()) {
        d = trial;
        f = ft;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
}

} // namespace

std::array<double, 8> solve_kstar_block(const Matrix &b) {
  if (b.rows() != 4 || b.cols() != 4 || !is_unitary(b, {1e-8}))
    throw Error(ErrorCode::SolveFailure, "K* block is not a 4x4 unitary");
  std::vector<Candidate> cands;
  auto push = [&](std::array<double, 8> d) {
    canonical_ranges(d);
    if (!check_kstar_clauses(d, nullptr)) return;
    double res = max_abs_diff(kstar_rhs_block(d), b);
    if (res > 1e-5) return;
    cands.push_back({d, res});
  };

  const Complex b11 = b(1, 1), b21 = b(2, 1), b31 = b(3, 1);
  const Complex b12 = b(1, 2), b22 = b(2, 2), b32 = b(3, 2);
  const Complex b13 = b(1, 3), b23 = b(2, 3), b33 = b(3, 3);
  const double s4abs = std::hypot(std::abs(b12), std::abs(b13));

  if (s4abs <= kBranchEps) {
    // delta4 in {0, 2pi}: the (01)-column is pure phase.
    std::array<double, 8> d{};
    double psi = mod_2pi(std::arg(b11));
    double c4;
    if (psi < kPi - 1e-10) {
      d[1] = psi;
      d[3] = 0;
      c4 = 1;
    } else {
      d[1] = mod_2pi(psi - kPi);
      d[3] = kTau;
      c4 = -1;
    }
    double s6 = std::abs(b32);
    if (s6 <= kBranchEps) {
      d[5] = 0;
      d[4] = 0;
      d[7] = mod_2pi(std::arg(b22));
      d[6] = mod_2pi(std::arg(b33) - std::arg(b11) - d[7]);
      push(d);
    } else {
      double c6abs = std::abs(b22);
      if (c6abs <= kBranchEps) {
        d[5] = kPi;
        d[4] = 0;
        d[7] = mod_2pi(std::arg(Complex(0, 1) * b23) - d[1] - arg_sign(c4));
        d[6] = mod_2pi(std::arg(Complex(0, 1) * b32) - d[7]);
        push(d);
      } else {
        for (double sc6 : {1.0, -1.0}) {
          std::array<double, 8> t = d;
          double c6 = sc6 * c6abs;
          t[7] = mod_2pi(std::arg(b22) - arg_sign(c6));
          t[4] = mod_2pi(std::arg(Complex(0, 1) * b23) - arg_sign(c4) - t[1] -
                         t[7]);
          t[6] = mod_2pi(std::arg(Complex(0, 1) * b32) - t[7]);
          t[5] = 2.0 * std::atan2(s6, c6);
          push(t);
        }
      }
    }
  } else {
    const double c4abs = std::abs(b11);
    const double s3 = std::abs(b12) / s4abs;
    const double c3abs = std::abs(b13) / s4abs;
    const double s6 = std::abs(b21) / s4abs;
    const double c6abs = std::abs(b31) / s4abs;

    std::vector<double> s4signs;
    if (s3 > kBranchEps)
      s4signs.push_back(-b12.real() >= 0 ? 1.0 : -1.0);
    else {
      s4signs.push_back(1.0);
      s4signs.push_back(-1.0);
    }
    for (double ss4 : s4signs) {
      double s4 = ss4 * s4abs;
      // delta2 and c4 from the (01,01) entry. With c4 = 0 that entry is
      // silent and the (delta1, delta2) split of the (01,11) phase is
      // settled by the canonicity clauses, so both splits are tried.
      std::vector<std::pair<double, double>> d2c4;
      if (c4abs > kBranchEps) {
        double psi = mod_2pi(std::arg(b11));
        if (psi < kPi - 1e-10)
          d2c4.push_back({psi, c4abs});
        else
          d2c4.push_back({mod_2pi(psi - kPi), -c4abs});
      } else {
        d2c4.push_back({0.0, 0.0});
      }
      for (auto [d2fix, c4] : d2c4) {
        std::vector<double> c3signs;
        if (s3 <= kBranchEps)
          c3signs.push_back(1.0); // delta3 = 0 (2pi is out of range)
        else if (c3abs <= kBranchEps)
          c3signs.push_back(0.0); // delta3 = pi
        else {
          c3signs.push_back(1.0);
          c3signs.push_back(-1.0);
        }
        for (double sc3 : c3signs) {
          double c3 = sc3 * c3abs;
          std::vector<std::pair<double, double>> splits; // (delta1, delta2)
          if (c3abs > kBranchEps) {
            double sigma = mod_2pi(std::arg(Complex(0, 1) * b13) -
                                   arg_sign(c3 * s4));
            if (c4abs > kBranchEps) {
              splits.push_back({mod_2pi(sigma - d2fix), d2fix});
            } else {
              splits.push_back({sigma, 0.0});
              splits.push_back({0.0, sigma});
            }
          } else {
            splits.push_back({0.0, d2fix});
          }
          for (auto [d1, d2] : splits) {
          std::array<double, 8> base{};
          base[0] = d1;
          base[1] = d2;
          base[2] = 2.0 * std::atan2(s3, sc3 == 0.0 ? 0.0 : c3);
          base[3] = mod_4pi(2.0 * std::atan2(s4, c4));
          // Remaining: delta5..delta8 from the first column and (2,2).
          if (s6 <= kBranchEps) {
            base[5] = 0;
            base[4] = 0;
            if (std::abs(c3) > kBranchEps) {
              // B(2,2) = e^{i d8} c3 c6 with c6 = +-1 folded into d8.
              base[7] = mod_2pi(std::arg(b22) - arg_sign(c3));
              base[6] = mod_2pi(std::arg(Complex(0, 1) * b31) - d2 - base[4] -
                                base[7] - arg_sign(s4));
              push(base);
              std::array<double, 8> alt = base;
              alt[7] = mod_2pi(base[7] + kPi);
              alt[6] = mod_2pi(base[6] + kPi);
              push(alt);
            } else {
              // delta3 = pi; B(2,3) = -i e^{i(S+d8)} s3 c6.
              for (double sc6 : {1.0, -1.0}) {
                std::array<double, 8> t = base;
                t[7] = mod_2pi(std::arg(Complex(0, 1) * b23) - d1 - d2 -
                               arg_sign(sc6));
                t[6] = mod_2pi(std::arg(Complex(0, 1) * b31) - d2 - t[7] -
                               arg_sign(s4 * sc6));
                push(t);
              }
            }
          } else {
            double omega = mod_2pi(std::arg(-b21) - d2 - arg_sign(s4));
            if (c6abs <= kBranchEps) {
              base[5] = kPi;
              base[4] = 0;
              base[7] = omega;
              if (std::abs(c3) > kBranchEps)
                base[6] = mod_2pi(std::arg(Complex(0, 1) * b32) - base[7] -
                                  arg_sign(c3));
              else
                base[6] = mod_2pi(std::arg(-b33) - d1 - d2 - base[7]);
              push(base);
            } else {
              for (double sc6 : {1.0, -1.0}) {
                std::array<double, 8> t = base;
                double c6 = sc6 * c6abs;
                double d8;
                if (std::abs(c3) > kBranchEps) {
                  Complex g = b22 + s3 * c4 * s6 * std::polar(1.0, omega);
                  d8 = mod_2pi(std::arg(g) - arg_sign(c3 * c6));
                } else {
                  d8 = mod_2pi(std::arg(Complex(0, 1) * b23) - d1 - d2 -
                               arg_sign(c6));
                }
                t[7] = d8;
                t[4] = mod_2pi(omega - d8);
                t[5] = 2.0 * std::atan2(s6, c6);
                t[6] = mod_2pi(std::arg(Complex(0, 1) * b31) - d2 - t[4] - d8 -
                               arg_sign(s4 * c6));
                push(t);
              }
            }
          }
          }
        }
      }
    }
  }

  std::sort(cands.begin(), cands.end(), [](const Candidate &x, const Candidate &y) {
    if (x.residual != y.residual) return x.residual < y.residual;
    return x.d < y.d;
  });
  cands.erase(std::unique(cands.begin(), cands.end(),
                          [](const Candidate &x, const Candidate &y) {
                            for (int i = 0; i < 8; ++i)
                              if (std::abs(x.d[static_cast<std::size_t>(i)] -
                                           y.d[static_cast<std::size_t>(i)]) > 1e-9)
                                return false;
                            return true;
                          }),
              cands.end());
  for (Candidate cand : cands) {
    std::array<double, 8> d = cand.d;
    if (cand.residual > 1e-12) {
      polish_kstar(d, b);
      canonical_ranges(d);
    }
    if (check_kstar_clauses(d, nullptr) &&
        max_abs_diff(kstar_rhs_block(d), b) <= 1e-9)
      return d;
    // Polishing can push a coordinate sitting right on a half-open range
    // boundary out of it; the raw candidate may already be within tolerance.
    if (cand.residual <= 1e-9 && check_kstar_clauses(cand.d, nullptr))
      return cand.d;
  }
  throw Error(ErrorCode::SolveFailure, "no canonical K* solution found");
}

KstarAngles solve_kstar(const std::array<double, 4> &gamma) {
  KstarAngles out;
  out.gamma = gamma;
  out.delta = solve_kstar_block(kstar_lhs_block(gamma));
  return out;
}

std::array<double, 4> kstar_gamma_from_block(const Matrix &b) {
  if (b.rows() != 4 || b.cols() != 4 || !is_unitary(b, {1e-8}))
    throw Error(ErrorCode::SolveFailure, "K* block is not a 4x4 unitary");
  std::vector<std::array<double, 4>> cands;
  const double c3 = b(2, 2).real();
  const double s3 = std::hypot(std::abs(b(1, 2)), std::abs(b(3, 2)));
  if (s3 > 1e-9) {
    const double g3 = 2.0 * std::atan2(s3, c3);
    const double s4 = -b(1, 2).real() / s3;
    const double c4 = (Complex(0, 1) * b(3, 2)).real() / s3;
    const double g4 = 2.0 * std::atan2(s4, c4);
    const double s1abs = std::abs(b(2, 1)) / s3;
    std::vector<std::pair<double, double>> s1g2; // (s1, gamma2) options
    if (s1abs > 1e-9) {
      s1g2.push_back({s1abs, mod_2pi(std::arg(-b(2, 1)))});
      s1g2.push_back({-s1abs, mod_2pi(std::arg(-b(2, 1)) + kPi)});
    } else {
      // s1 = 0: gamma2 only shows on the |11> column; recover it from
      // B(3,3) = c1 c3 c4 e^{i g2} - s1 s4 ... with s1 = 0.
      s1g2.push_back({0.0, 0.0});
      if (std::abs(c3 * c4) > 1e-9)
        s1g2.push_back(
            {0.0, mod_2pi(std::arg(b(3, 3) / (c3 * c4)))});
    }
    for (auto [s1, g2] : s1g2) {
      double c1;
      if (std::abs(c4) > 1e-9)
        c1 = ((b(1, 1) + s1 * s4 * c3 * std::polar(1.0, g2)) / c4).real();
      else
        c1 = ((Complex(0, 1) * b(1, 3) -
               Complex(s1 * c3 * c4, 0) * std::polar(1.0, g2)) /
              s4)
                 .real();
      cands.push_back({2.0 * std::atan2(s1, c1), g2, g3, g4});
    }
  } else {
    // gamma3 in {0, 2pi}: the action lives on the (|01>,|11>) pair, where
    // the block reads Rx(g4) diag(1, z) Rx(g1) with z = c3 e^{i g2}.
    Matrix m2(2, 2);
    m2 << b(1, 1), b(1, 3), b(3, 1), b(3, 3);
    if (is_unitary(m2, {1e-8})) {
      EulerAngles e = euler_xzx(m2);
      double b0 = mod_2pi(e.b0);
      for (double g3 : {0.0, kTau}) {
        double zphase = g3 == 0.0 ? 0.0 : kPi; // diag picks up c3 = -1
        // e^{i b0} Rx(b3) P(b2) Rx(b1) with the phase folded into Rx(+2pi)
        for (double extra : {0.0, kPi}) {
          if (!angle_is(b0, extra, 1e-8) && !angle_is(b0 - kTau, extra, 1e-8))
            continue;
          double g1 = extra == 0.0 ? e.b1 : e.b1 + kTau;
          cands.push_back({g1, mod_2pi(e.b2 - zphase), g3, e.b3});
        }
      }
    }
  }
  for (const auto &g : cands)
    if (max_abs_diff(kstar_lhs_block(g), b) <= 1e-9) return g;
  throw Error(ErrorCode::SolveFailure, "block is outside the K* LHS image");
}

bool kstar_is_canonical(const std::array<double, 8> &delta, std::string *why) {
  std::array<double, 8> d = delta;
  for (double &x : d) x = snap_angle(x, 1e-12);
  return check_kstar_clauses(d, why);
}

bool kstar_old_is_canonical(const std::array<double, 9> &delta,
                            std::string *why) {
  std::array<double, 9> d = delta;
  for (double &x : d) x = snap_angle(x, 1e-12);
  auto fail = [&](const char *msg) {
    if (why) *why = msg;
    return false;
  };
  if (!(d[0] >= 0 && d[0] < kPi)) return fail("delta1 out of [0,pi)");
  if (!(d[1] >= 0 && d[1] < kPi)) return fail("delta2 out of [0,pi)");
  if (!(d[4] >= 0 && d[4] < kPi)) return fail("delta5 out of [0,pi)");
  for (int i : {2, 3, 5, 6, 7, 8})
    if (!(d[static_cast<std::size_t>(i)] >= 0 && d[static_cast<std::size_t>(i)] < kTau))
      return fail("angle out of [0,2pi)");
  if (angle_is(d[2], 0) && !angle_is(d[1], 0))
    return fail("delta3=0 requires delta2=0");
  if (angle_is(d[2], kPi) && !angle_is(d[0], 0))
    return fail("delta3=pi requires delta1=0");
  if (angle_is(d[3], 0) && !(angle_is(d[0], 0) && angle_is(d[2], 0)))
    return fail("delta4=0 requires delta1=delta3=0");
  if (angle_is(d[3], kPi) && !angle_is(d[1], 0))
    return fail("delta4=pi requires delta2=0");
  if (angle_is(d[3], kPi) && angle_is(d[2], 0) && !angle_is(d[0], 0))
    return fail("delta4=pi, delta3=0 requires delta1=0");
  if ((angle_is(d[5], 0) || angle_is(d[5], kPi)) && !angle_is(d[4], 0))
    return fail("delta6 in {0,pi} requires delta5=0");
  return true;
}

KstarOldAngles kstar_old_from_new(const KstarAngles &dn) {
  std::string why;
  if (!kstar_is_canonical(dn.delta, &why))
    throw Error(ErrorCode::InvalidInput, "non-canonical K* tuple: " + why);
  std::array<double, 8> s = dn.delta;
  for (double &x : s) x = snap_angle(x, 1e-12);
  KstarOldAngles out;
  auto &d = out.delta;
  d[0] = s[0];
  d[2] = s[2];
  d[4] = s[4];
  d[6] = s[6];
  bool phase_case = angle_is(s[2], 0) && !angle_is(s[1], 0);
  bool hi4 = s[3] >= kTau;
  d[1] = phase_case ? 0.0 : s[1];
  d[3] = hi4 ? s[3] - kTau : s[3];
  bool flip = !angle_is(s[5], 0) && hi4;
  d[5] = flip ? kTau - s[5] : s[5];
  d[7] = flip ? mod_2pi(s[7] + kPi) : s[7];
  if (phase_case)
    d[8] = hi4 ? s[1] + kPi : s[1];
  else
    d[8] = hi4 ? kPi : 0.0;
  return out;
}

KstarAngles kstar_new_from_old(const KstarOldAngles &dold) {
  std::string why;
  if (!kstar_old_is_canonical(dold.delta, &why))
    throw Error(ErrorCode::InvalidInput, "non-canonical K*old tuple: " + why);
  std::array<double, 9> s = dold.delta;
  for (double &x : s) x = snap_angle(x, 1e-12);
  KstarAngles out;
  auto &d = out.delta;
  d[0] = s[0];
  d[2] = s[2];
  d[4] = s[4];
  d[6] = s[6];
  if (angle_is(s[8], 0) || angle_is(s[8], kPi))
    d[1] = s[1];
  else if (s[8] < kPi)
    d[1] = s[8];
  else
    d[1] = s[8] - kPi;
  d[3] = s[8] < kPi ? s[3] : s[3] + kTau;
  bool flip = angle_is(s[8], kPi) && !angle_is(s[5], 0);
  d[5] = flip ? kTau - s[5] : s[5];
  d[7] = flip ? mod_2pi(s[7] + kPi) : s[7];
  return out;
}

std::array<double, 8> random_canonical_kstar(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto pick = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
  std::array<double, 8> d{};
  d[0] = pick(0, kPi);
  d[1] = pick(0, kPi);
  d[2] = pick(0, kTau);
  d[3] = pick(0, 2 * kTau);
  d[4] = pick(0, kPi);
  d[5] = pick(0, kTau);
  d[6] = pick(0, kTau);
  d[7] = pick(0, kTau);
  // Force the clause-triggering special values often enough to matter.
  if (u01(rng) < 0.3) d[2] = u01(rng) < 0.5 ? 0.0 : kPi;
  if (u01(rng) < 0.3) {
    double opts[4] = {0.0, kPi, kTau, 3 * kPi};
    d[3] = opts[static_cast<int>(u01(rng) * 4) & 3];
  }
  if (u01(rng) < 0.3) d[5] = u01(rng) < 0.5 ? 0.0 : kPi;
  // Enforce the conditional clauses.
  if (angle_is(d[3], 0) || angle_is(d[3], kTau)) d[0] = d[2] = 0;
  if ((angle_is(d[3], kPi) || angle_is(d[3], 3 * kPi)) && !angle_is(d[2], 0))
    d[1] = 0;
  if ((angle_is(d[3], kPi) || angle_is(d[3], 3 * kPi)) && angle_is(d[2], 0))
    d[0] = 0;
  if (angle_is(d[2], kPi)) d[0] = 0;
  if (angle_is(d[2], 0) && !angle_is(d[5], 0)) d[1] = 0;
  if (angle_is(d[5], 0) || angle_is(d[5], kPi)) d[4] = 0;
  return d;
}

} // namespace qceq
