#include "rclf/feedback.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rclf/error.hpp"

namespace rclf {

void PsiSpec::validate() const {
  if (!(slope > 0.0) || !std::isfinite(slope)) throw InvalidArgument("psi slope must be positive");
}

void LSpec::validate() const {
  if (!(l0 > 0.0) || !std::isfinite(l0)) throw InvalidArgument("L gain must be positive");
}

void RclfFeedbackParams::validate() const {
  if (!(x1_star < 0.0)) throw InvalidArgument("x1_star must be negative");
  if (!(M > 0.0)) throw InvalidArgument("M must be positive");
  if (!(W_weight > 0.0)) throw InvalidArgument("W weight must be positive");
}

double relaxed_feedback(const ChemostatScenario& sc, const PsiSpec& psi, const LSpec& l, double x1,
                        double x2) {
  const double uptake = std::max(0.0, sc.K * sc.mu_tilde(x1) - sc.m);
  return -sc.D_s + uptake * sc.G * std::exp(x2 - x1) + l(x1, x2) * psi(x1);
}

double relaxed_dilution_physical(const ChemostatScenario& sc, const PsiSpec& psi, const LSpec& l,
                                 double X, double S) {
  if (!(X > 0.0) || !(S > 0.0 && S < sc.S_i))
    throw DomainError("physical state outside {X > 0, 0 < S < S_i}");
  const double mu = growth_rate(sc.growth, S);
  const double x1 = std::log(sc.c * S / (sc.S_i - S));
  return sc.S_s / (sc.S_i - sc.S_s) * std::max(0.0, sc.K * mu - sc.m) * X / S +
         l(x1, 0.0) * psi(x1);
}

double rclf_q_lower_bound(const ChemostatScenario& sc, const RclfFeedbackParams& prm, double x1,
                          double x2) {
  const double e = std::exp(x1);
  const double ce = sc.c + e;
  const double mu = sc.mu_tilde(x1);
  const double W = prm.W_weight * (x1 * x1 + x2 * x2);
  const double drift = mu - sc.b - (sc.K * mu - sc.m) * sc.G * std::exp(x2);
  return W * e / (prm.M * ce) + sc.a * sc.c * sc.S_s * std::abs(x2) * e / (prm.M * ce * ce) -
         e * x2 * drift / (prm.M * x1 * ce);
}

double rclf_q(const ChemostatScenario& sc, const RclfFeedbackParams& prm, double x1, double x2) {
  if (x1 >= 0.0) return 0.0;
  const double ramp = std::clamp(x1 / prm.x1_star, 0.0, 1.0);
  return ramp * std::max(0.0, rclf_q_lower_bound(sc, prm, std::min(x1, prm.x1_star), x2));
}

double rclf_feedback(const ChemostatScenario& sc, const RclfFeedbackParams& prm, double x1,
                     double x2) {
  const double uptake = std::max(0.0, sc.K * sc.mu_tilde(x1) - sc.m);
  return -sc.D_s + uptake * sc.G * std::exp(x2 - x1) + rclf_q(sc, prm, x1, x2);
}

ClassicalFeedback::ClassicalFeedback(const ChemostatScenario& sc, ScalarMap phi, PlanarMap q_extra)
    : sc_(sc), phi_(std::move(phi)), q_(std::move(q_extra)) {
  if (!phi_) throw InvalidArgument("phi must be supplied");
  if (std::abs(phi_(0.0) - 1.0) > 1e-12) throw InvalidArgument("phi(0) must equal 1");
  for (int k = 1; k <= 1000; ++k) {
    const double x = 10.0 * k / 1000.0;
    const double right = phi_(x);
    const double left = phi_(-x);
    if (!(right >= 0.0 && right < 1.0))
      throw InvalidArgument("phi must lie in [0, 1) for x > 0 (fails at x = " + std::to_string(x) + ")");
    if (!(left > 1.0))
      throw InvalidArgument("phi must exceed 1 for x < 0 (fails at x = " + std::to_string(-x) + ")");
  }
  if (q_) {
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const double x1 = -10.0 + 0.5 * i;
        const double x2 = -10.0 + 0.5 * j;
        const double v = q_(x1, x2);
        if (!(v >= 0.0)) throw InvalidArgument("extra term q must be non-negative");
        if (x1 >= 0.0 && v != 0.0) throw InvalidArgument("extra term q must vanish for x1 >= 0");
      }
  }
}

double ClassicalFeedback::operator()(double x1, double x2) const {
  const double extra = q_ ? q_(x1, x2) : 0.0;
  return -sc_.D_s + sc_.mu_tilde(x1) * std::exp(x2) * phi_(x1) + extra;
}

double classical_feedback(const ChemostatScenario& sc, const ScalarMap& phi,
                          const PlanarMap& q_extra, double x1, double x2) {
  return ClassicalFeedback(sc, phi, q_extra)(x1, x2);
}

ScalarMap mailleret_phi(const ChemostatScenario& sc) {
  const double c = sc.c;
  return [c](double x) { return (c + 1.0) / (c + std::exp(x)); };
}

double constrained_quadratic_feedback(const ControlAffineSystem& sys, const GradientFunction& V,
                                      const StateFunction& gamma, double a_limit,
                                      std::span<const double> x) {
  if (!(a_limit > 0.0)) throw InvalidArgument("input bound must be positive");
  StateVector grad(sys.dim), g(sys.dim);
  const StateVector d = sys.box.midpoint();
  V.gradient(x, grad);
  sys.g(d, x, g);
  double lg = 0.0;
  for (std::size_t i = 0; i < sys.dim; ++i) lg += grad[i] * g[i];
  return -std::min(a_limit, gamma(x) * lg);
}

void TriangularSystemSpec::validate(std::size_t samples, std::uint64_t seed) const {
  if (n == 0) throw InvalidArgument("triangular system needs n >= 1");
  if (!(q >= 0.0 && L >= 0.0)) throw InvalidArgument("q and L must be non-negative");
  if (!(r > 0.0 && R >= r)) throw InvalidArgument("need 0 < r <= R");
  if (!f || !g) throw InvalidArgument("triangular system needs f and g");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StateVector x(n), d(box.dim());
  for (std::size_t s = 0; s < samples; ++s) {
    const double scale = s % 4 == 0 ? 1e-3 : (s % 4 == 1 ? 0.1 : 5.0);
    for (auto& v : x) v = scale * (2.0 * unit(rng) - 1.0);
    for (std::size_t j = 0; j < d.size(); ++j)
      d[j] = box.lower[j] + unit(rng) * (box.upper[j] - box.lower[j]);
    const double nx = euclidean_norm(x);
    for (std::size_t i = 0; i < n; ++i) {
      const double fi = f(i, d, x);
      const double gi = g(i, d, x);
      if (std::abs(fi) > std::min(q, L * nx) * (1.0 + 1e-12))
        throw InvalidArgument("|f_" + std::to_string(i + 1) + "| exceeds min(q, L|x|)");
      if (gi < r || gi > R)
        throw InvalidArgument("g_" + std::to_string(i + 1) + " outside [r, R]");
    }
  }
}

VectorField TriangularSystemSpec::vector_field(
    std::function<double(std::span<const double>)> law) const {
  return [spec = *this, law = std::move(law)](double, std::span<const double> x,
                                              std::span<const double> d, std::span<double> dx) {
    const std::size_t n = spec.n;
    for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = spec.f(i, d, x) + spec.g(i, d, x) * x[i + 1];
    dx[n - 1] = spec.f(n - 1, d, x) + spec.g(n - 1, d, x) * law(x);
  };
}

TriangularSystemSpec make_triangular_benchmark(std::size_t n, double q, double L, double r,
                                               double R, double disturbance_level) {
  if (!(disturbance_level >= 0.0 && disturbance_level <= 1.0))
    throw InvalidArgument("disturbance level must lie in [0, 1]");
  TriangularSystemSpec spec;
  spec.n = n;
  spec.q = q;
  spec.L = L;
  spec.r = r;
  spec.R = R;
  spec.box = CompactBox::cube(2 * n, -disturbance_level, disturbance_level);
  spec.f = [q, L](std::size_t i, std::span<const double> d, std::span<const double> x) {
    if (q == 0.0 || L == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += x[j];
    s /= std::sqrt(static_cast<double>(i + 1));
    return q * d[i] * std::tanh(L * s / q);
  };
  spec.g = [n, r, R](std::size_t i, std::span<const double> d, std::span<const double> x) {
    return 0.5 * (r + R) + 0.5 * (R - r) * d[n + i] * std::sin(x[i]);
  };
  spec.validate();
  return spec;
}

namespace {

double decay_bound_numerator(const StageRecord& s, double L) {
  if (s.P_min_eig == 0.0) return s.mu / 2.0 + L;
  const double cross = s.C * s.P_norm + s.C * s.k_norm + L + L * s.k_norm;
  return s.mu / 2.0 + L + s.C * s.k_norm + cross * cross / (2.0 * s.mu * s.P_min_eig);
}

}  // namespace

SaturatedGains compute_backstepping_gains(const TriangularSystemSpec& spec,
                                          const BacksteppingDesign& design,
                                          GainCertificate* certificate) {
  if (design.stages.size() != spec.n)
    throw InvalidArgument("backstepping design needs one stage per state");
  if (!(design.mu0 > 0.0)) throw InvalidArgument("mu0 must be positive");
  const double q = spec.q, L = spec.L, r = spec.r, R = spec.R;

  Eigen::MatrixXd P(0, 0);
  Eigen::VectorXd k(0);
  double C = 0.0, b = 0.0, mu = design.mu0;
  double c_prev = 0.0, a_prev = 0.0;
  SaturatedGains gains;
  GainCertificate cert;

  for (std::size_t i = 0; i < spec.n; ++i) {
    const StageDesign& st = design.stages[i];
    if (!(st.c_tilde >= 0.0)) throw InvalidArgument("c~ must be non-negative");
    StageRecord rec;
    rec.c_tilde = st.c_tilde;
    rec.c_prev = c_prev;
    rec.C = C;
    rec.b = b;
    rec.mu = mu;
    rec.a_lower = st.c_tilde + (q + b) / r;
    rec.eta = st.eta ? *st.eta : st.eta_factor * rec.a_lower;
    if (!(rec.eta > rec.a_lower))
      throw Infeasible("backstepping stage " + std::to_string(i + 1) +
                       ": admissible interval for a~ is empty (eta <= c~ + (q + b)/r)");
    if (!(st.c_tilde * r + q + b > 0.0))
      throw Infeasible("backstepping stage " + std::to_string(i + 1) + ": c~ r + q + b must be positive");
    rec.a_tilde = 0.5 * (rec.a_lower + rec.eta);
    if (i > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P);
      rec.P_min_eig = eig.eigenvalues().minCoeff();
      rec.P_norm = eig.eigenvalues().cwiseAbs().maxCoeff();
      rec.k_norm = k.norm();
      if (!(c_prev > 0.0))
        throw Infeasible("backstepping stage " + std::to_string(i + 1) +
                         ": previous c~ must be positive to bound p from below");
      rec.bound_inverse_c = 1.0 / c_prev;
    }
    rec.bound_decay = decay_bound_numerator(rec, L) / (st.c_tilde * r + q + b);
    rec.p = 1.1 * std::max(rec.bound_inverse_c, rec.bound_decay);

    const double at = rec.a_tilde, p = rec.p;
    gains.a.push_back(at);
    gains.p.push_back(p);
    cert.stages.push_back(rec);

    const Eigen::Index m = P.rows();
    Eigen::MatrixXd P_next(m + 1, m + 1);
    P_next.topLeftCorner(m, m) = P + k * k.transpose();
    P_next.topRightCorner(m, 1) = -k;
    P_next.bottomLeftCorner(1, m) = -k.transpose();
    P_next(m, m) = 1.0;
    Eigen::VectorXd k_next(m + 1);
    k_next.head(m) = at * p * k;
    k_next(m) = -at * p;
    P = std::move(P_next);
    k = std::move(k_next);
    C = 2.0 * (C + L) + C * (a_prev + 1.0) + R * (at + 1.0);
    b = at * p * (q + R * at + R * st.c_tilde + b);
    mu *= 0.5;
    c_prev = st.c_tilde;
    a_prev = at;
  }
  if (certificate) *certificate = std::move(cert);
  return gains;
}

double gain_margin(const GainCertificate& certificate, double q, double L, double r) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& s : certificate.stages) {
    const double inv_c = s.P_min_eig == 0.0 ? 0.0 : 1.0 / s.c_prev;
    const double decay = decay_bound_numerator(s, L) / (s.c_tilde * r + q + s.b);
    margin = std::min(margin, s.p / std::max(inv_c, decay));
  }
  return margin;
}

double saturated_backstepping(const SaturatedGains& gains, std::span<const double> x) {
  if (gains.a.size() != x.size() || gains.p.size() != x.size())
    throw InvalidArgument("gain count differs from state dimension");
  double phi = -gains.a[0] * sat(gains.p[0] * x[0]);
  for (std::size_t i = 1; i < x.size(); ++i) phi = -gains.a[i] * sat(gains.p[i] * (x[i] - phi));
  return phi;
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double f0 = std::exp(-1.0 / s);
  const double f1 = std::exp(-1.0 / (1.0 - s));
  return f0 / (f0 + f1);
}

namespace {

StateVector blend(const StateVector& low, const StateVector& high, double w) {
  if (low.size() != high.size()) throw InvalidArgument("sub-feedbacks differ in input dimension");
  StateVector out(low.size());
  for (std::size_t i = 0; i < low.size(); ++i) out[i] = (1.0 - w) * low[i] + w * high[i];
  return out;
}

StateVector checked(StateVector u, const char* which) {
  for (double v : u)
    if (!std::isfinite(v))
      throw DomainError(std::string("patched feedback evaluated ") + which +
                        " outside its domain");
  return u;
}

}  // namespace

StateVector patch_feedbacks(const PatchInputs& in, std::span<const double> x) {
  if (!(in.eps > 0.0) || !(in.r > 0.0)) throw InvalidArgument("eps and r must be positive");
  if (!in.k1 || !in.k2 || !in.k3 || !in.k_tilde || !in.h)
    throw InvalidArgument("patching needs k1, k2, k3, k~ and h");
  const auto bump = in.bump ? in.bump : std::function<double(double)>(smooth_step);
  const double h = in.h(x);
  const double e = in.eps;
  if (h > 0.8 * e) return checked(in.k1(x), "k1");
  if (h >= 0.6 * e)
    return blend(checked(in.k3(x), "k3"), checked(in.k1(x), "k1"), bump(5.0 * h / e - 3.0));
  if (h > 0.4 * e) return checked(in.k3(x), "k3");
  if (h >= 0.2 * e)
    return blend(checked(in.k2(x), "k2"), checked(in.k3(x), "k3"), bump(5.0 * h / e - 1.0));
  const double nx = euclidean_norm(x);
  const double r = in.r;
  if (nx > 2.0 * r) return checked(in.k2(x), "k2");
  if (nx < r) return checked(in.k_tilde(x), "k~");
  return blend(checked(in.k_tilde(x), "k~"), checked(in.k2(x), "k2"),
               bump((nx * nx - r * r) / (3.0 * r * r)));
}

}  // namespace rclf
