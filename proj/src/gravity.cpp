#include "ksn/gravity.hpp"
#include "ksn/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace ksn::gravity {

namespace {

constexpr double sqrt_pi = 1.7724538509055160273;
constexpr double two_over_sqrt_pi = 1.1283791670955125739;
constexpr double sqrt_two_over_pi = 0.7978845608028653559;

// 7-point Gauss / 15-point Kronrod pair on [-1, 1] (QUADPACK dqk15).
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
    double integral;
    double error;
};

template <typename F>
GkResult gk15(const F& f, double lo, double hi)
{
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    double fv1[7], fv2[7];
    double resk = 0, resg = 0, resabs = 0;
    for (int i = 0; i < 7; ++i) {
        fv1[i] = f(c - h * xgk[i]);
        fv2[i] = f(c + h * xgk[i]);
        resk += wgk[i] * (fv1[i] + fv2[i]);
        resabs += wgk[i] * (std::abs(fv1[i]) + std::abs(fv2[i]));
        if (i % 2 == 1) resg += wg[i / 2] * (fv1[i] + fv2[i]);
    }
    const double fc = f(c);
    resk += wgk[7] * fc;
    resabs += wgk[7] * std::abs(fc);
    resg += wg[3] * fc;
    // QUADPACK dqk15 error model: the raw |K15 - G7| gap is rescaled by the
    // centered first absolute moment and floored at the roundoff level
    const double reskh = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += wgk[i] * (std::abs(fv1[i] - reskh) + std::abs(fv2[i] - reskh));
    const double ah = std::abs(h);
    double err = std::abs(resk - resg) * ah;
    const double resasc_h = resasc * ah;
    if (resasc_h != 0.0 && err != 0.0)
        err = resasc_h * std::min(1.0, std::pow(200.0 * err / resasc_h, 1.5));
    constexpr double eps = 2.220446049250313e-16;
    err = std::max(err, 50.0 * eps * resabs * ah);
    return {resk * h, err};
}

/// Adaptive bisection to an absolute tolerance; simple worst-interval-first
/// refinement is unnecessary here, plain recursion depth-limited by budget.
template <typename F>
double adaptive_gk(const F& f, double lo, double hi, double tol,
                   double* err_out, int* budget)
{
    const GkResult r = gk15(f, lo, hi);
    if (r.error <= tol || hi - lo < 1e-14 * (std::abs(lo) + std::abs(hi))) {
        *err_out += r.error;
        return r.integral;
    }
    if (--(*budget) <= 0)
        throw convergence_error("potential_f_quadrature: interval budget exhausted");
    const double mid = 0.5 * (lo + hi);
    return adaptive_gk(f, lo, mid, 0.5 * tol, err_out, budget)
         + adaptive_gk(f, mid, hi, 0.5 * tol, err_out, budget);
}

} // namespace

GaussianState::GaussianState(double a_, double m_, double t_) : a(a_), m(m_), t(t_)
{
    if (!(a > 0)) throw std::invalid_argument("GaussianState: width must be positive");
    if (!(m > 0)) throw std::invalid_argument("GaussianState: mass must be positive");
    if (t < 0) throw std::invalid_argument("GaussianState: t must be non-negative");
}

double GaussianState::effective_width() const
{
    const double th = theta();
    return a * std::sqrt(1.0 + th * th);
}

std::complex<double> free_gaussian(const GaussianState& s, double r)
{
    if (r < 0) throw std::invalid_argument("free_gaussian: r < 0");
    const std::complex<double> z(1.0, s.theta());
    const double norm = std::pow(M_PI * s.a * s.a, -0.75);
    return norm * std::pow(z, -1.5) * std::exp(-r * r / (2.0 * s.a * s.a * z));
}

PotentialEvaluation potential_f_closed(const GaussianState& s, double r)
{
    if (r < 0) throw std::invalid_argument("potential_f_closed: r < 0");
    const double b = s.effective_width();
    double value;
    if (r == 0.0) {
        value = two_over_sqrt_pi / b;  // lim erf(x)/x = 2/sqrt(pi), x = r/b
    } else {
        value = std::erf(r / b) / r;
    }
    return {value, PotentialMethod::closed, 4.0 * 1e-16 * value};
}

PotentialEvaluation potential_f_quadrature(const GaussianState& s, double r, double tol)
{
    if (r < 0) throw std::invalid_argument("potential_f_quadrature: r < 0");
    if (!(tol > 0)) throw std::invalid_argument("potential_f_quadrature: tol must be positive");

    // |psi|^2 = (pi b^2)^{-3/2} exp(-s^2/b^2); with x = s/b the two shell
    // integrals become dimensionless:
    //   M(x_r) = int_0^{x_r} (4/sqrt(pi)) x^2 e^{-x^2} dx
    //   T(x_r) = int_{x_r}^{inf} (4/sqrt(pi)) x e^{-x^2} dx
    // and f = M(x_r)/(b x_r) + T(x_r)/b.
    const double b = s.effective_width();
    const double xr = r / b;
    const double xcut = 12.0;  // e^{-144}, far below any admissible tol

    const auto inner = [](double x) { return (4.0 / sqrt_pi) * x * x * std::exp(-x * x); };
    const auto outer = [](double x) { return (4.0 / sqrt_pi) * x * std::exp(-x * x); };

    const double tol_x = tol * b;  // absolute tolerance in x-units
    double err = 0.0;
    int budget = 4000;
    double value;
    if (xr == 0.0) {
        value = adaptive_gk(outer, 0.0, xcut, tol_x, &err, &budget) / b;
    } else {
        const double mass_part =
            adaptive_gk(inner, 0.0, std::min(xr, xcut), 0.5 * tol_x * xr, &err, &budget) / xr;
        double tail_part = 0.0;
        if (xr < xcut)
            tail_part = adaptive_gk(outer, xr, xcut, 0.5 * tol_x, &err, &budget);
        value = (mass_part + tail_part) / b;
    }
    // truncation remainder: int_{xcut}^inf (4/sqrt(pi)) x e^{-x^2} dx
    const double tail_bound = (2.0 / sqrt_pi) * std::exp(-xcut * xcut) / b;
    return {value, PotentialMethod::quadrature, err / b + tail_bound};
}

PotentialEvaluation potential_f_mass_expansion(const GaussianState& s, double r)
{
    if (r < 0) throw std::invalid_argument("potential_f_mass_expansion: r < 0");
    if (!(s.t > 0))
        throw std::invalid_argument("potential_f_mass_expansion: undefined at t = 0");
    const double value = 2.0 * s.a * s.m / (sqrt_pi * s.t);
    // next order: -(2/sqrt(pi)) mu^3 (1/(2a) + r^2/(3a^3)), mu = m a^2 / t
    const double mu = s.m * s.a * s.a / s.t;
    const double next = two_over_sqrt_pi * mu * mu * mu
                        * (0.5 / s.a + r * r / (3.0 * s.a * s.a * s.a));
    return {value, PotentialMethod::mass_exp, next};
}

PotentialEvaluation potential_f_time_expansion(const GaussianState& s, double r)
{
    if (r < 0) throw std::invalid_argument("potential_f_time_expansion: r < 0");
    const double x = r / s.a;
    const double leading = (r == 0.0) ? two_over_sqrt_pi / s.a : std::erf(x) / r;
    const double a5 = std::pow(s.a, 5);
    const double value = leading - s.t * s.t * std::exp(-x * x) / (sqrt_pi * s.m * s.m * a5);
    // O(t^4) scale from the next term of erf(x (1+theta^2)^{-1/2})/r
    const double th2 = s.theta() * s.theta();
    const double next = two_over_sqrt_pi * std::exp(-x * x) * th2 * th2
                        * (3.0 / 8.0 + 0.25 * x * x) / s.a;
    return {value, PotentialMethod::time_exp, next};
}

PotentialEvaluation potential_f_width_expansion(const GaussianState& s, double r)
{
    if (r < 0) throw std::invalid_argument("potential_f_width_expansion: r < 0");
    const double x2 = r * r / (s.a * s.a);
    const double a5 = std::pow(s.a, 5);
    const double value =
        two_over_sqrt_pi / s.a * (1.0 - x2 / 3.0 + x2 * x2 / 10.0)
        - s.t * s.t / (sqrt_pi * s.m * s.m * a5);
    // a^-7 scale: r^6 term of the erf series plus the r^2 t^2 cross term
    const double a7 = a5 * s.a * s.a;
    const double next = (two_over_sqrt_pi * std::pow(r, 6) / 42.0
                         + r * r * s.t * s.t / (sqrt_pi * s.m * s.m)) / a7;
    return {value, PotentialMethod::width_exp, next};
}

double expectation_f(const GaussianState& s)
{
    return sqrt_two_over_pi / s.effective_width();
}

double expectation_f_deltam(const GaussianState& s, double delta_m)
{
    const double th2 = s.theta() * s.theta();
    const double coeff = (sqrt_two_over_pi / s.a)
                         * (s.t * s.t / (std::pow(s.m, 3) * std::pow(s.a, 4)))
                         * std::pow(1.0 + th2, -1.5);
    return expectation_f(s) + coeff * delta_m;
}

EnergyShift energy_shift(int scenario, const units::KaonParameters& p,
                         double a, double beta_sq, std::optional<double> source_mass,
                         std::optional<double> g_eff)
{
    if (scenario != 1 && scenario != 2)
        throw std::invalid_argument("energy_shift: scenario must be 1 or 2");
    if (!(a > 0)) throw std::invalid_argument("energy_shift: width must be positive");
    if (!(beta_sq >= 0.0 && beta_sq <= 1.0))
        throw std::invalid_argument("energy_shift: beta_sq must be in [0,1]");
    if (g_eff && *g_eff < 0)
        throw std::invalid_argument("energy_shift: negative g_eff");
    const double g = g_eff.value_or(units::g_natural());
    const double m = source_mass.value_or(p.m_K);
    EnergyShift e;
    e.scenario = scenario;
    e.beta_sq = beta_sq;
    if (scenario == 1) {
        const double shift = -sqrt_two_over_pi * (g * p.m_K / a) * (m + beta_sq * p.delta_m);
        e.delta_E_S = shift;
        e.delta_E_L = shift;
    } else {
        const double pref = -sqrt_two_over_pi * g * m / a;
        e.delta_E_S = pref * (m + beta_sq * p.delta_m);
        e.delta_E_L = pref * (m + (1.0 + beta_sq) * p.delta_m);
    }
    return e;
}

double delta_sn(double m_K, double a)
{
    if (!(a > 0)) throw std::invalid_argument("delta_sn: width must be positive");
    if (m_K < 0) throw std::invalid_argument("delta_sn: negative mass");
    return sqrt_two_over_pi * units::g_natural() * m_K / a;
}

double critical_width(double m_K)
{
    if (!(m_K > 0)) throw std::invalid_argument("critical_width: mass must be positive");
    return sqrt_two_over_pi * units::g_natural() * m_K;
}

} // namespace ksn::gravity
