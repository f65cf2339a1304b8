#include "prw/lamperti_limit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "prw/kv_config.hpp"
#include "prw/numerics.hpp"
#include "prw/scaling_laws.hpp"

namespace prw {

using num::pi;

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");
}

void check_balance(double b)
{
    if (!(b > -1.0 && b < 1.0))
        throw std::invalid_argument("tail balance b must lie in (-1,1)");
}

std::size_t jumps_through(const std::vector<double>& times, double u)
{
    return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), u) - times.begin());
}

LabelledSubordinatorPath attach_labels(SubordinatorPath base, double b, Rng& rng)
{
    const double p_up = 0.5 * (1.0 + b);
    std::vector<std::int8_t> labels(base.jump_count());
    for (auto& l : labels)
        l = rng.uniform() < p_up ? 1 : -1;
    return LabelledSubordinatorPath(std::move(base), std::move(labels), b);
}

} // namespace

LabelledSubordinatorPath::LabelledSubordinatorPath(SubordinatorPath base, std::vector<std::int8_t> labels, double b)
    : base_(std::move(base)), labels_(std::move(labels)), b_(b)
{
    check_balance(b);
    if (labels_.size() != base_.jump_count())
        throw std::invalid_argument("labelled subordinator: one label per jump is required");
    signed_.reserve(labels_.size());
    up_.reserve(labels_.size());
    double s = 0.0, up = 0.0;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != 1 && labels_[i] != -1)
            throw std::invalid_argument("labelled subordinator: labels must be +1 or -1");
        const double j = base_.jump_sizes()[i];
        s += labels_[i] * j;
        if (labels_[i] > 0)
            up += j;
        signed_.push_back(s);
        up_.push_back(up);
    }
}

double LabelledSubordinatorPath::up_value(double u) const
{
    const double drift = 0.5 * (1.0 + b_) * base_.drift_rate() * u;
    const std::size_t k = jumps_through(base_.jump_times(), u);
    return drift + (k > 0 ? up_[k - 1] : 0.0);
}

double LabelledSubordinatorPath::down_value(double u) const
{
    return base_.value(u) - up_value(u);
}

LabelledSubordinatorPath labelled_subordinator(double alpha, double b, double t_max, double epsilon, Rng& rng,
                                               const SubordinatorOptions& opts)
{
    check_balance(b);
    return attach_labels(subordinator_path(alpha, t_max, epsilon, rng, opts), b, rng);
}

LabelledSubordinatorPath labelled_subordinator_until(double alpha, double b, double level, double epsilon, Rng& rng,
                                                     const SubordinatorOptions& opts)
{
    check_balance(b);
    return attach_labels(subordinator_path_until(alpha, level, epsilon, rng, opts), b, rng);
}

RenewalState renewal_state(const SubordinatorPath& path, double t)
{
    const double end = path.terminal_value();
    if (!(t >= 0.0) || t > end * (1.0 + 1e-12))
        throw std::out_of_range("renewal_state: t beyond the path support");
    t = std::min(t, end);
    const auto& after = path.values_after_jumps();
    const auto& times = path.jump_times();
    const std::size_t i = static_cast<std::size_t>(std::lower_bound(after.begin(), after.end(), t) - after.begin());
    RenewalState st;
    if (i < after.size() && t == after[i]) {
        st.G = st.H = t;
        st.N = times[i];
        return st;
    }
    if (i < after.size() && path.before_jump(i) < t) {
        st.G = path.before_jump(i);
        st.H = after[i];
        st.N = times[i];
        st.age = t - st.G;
        st.remaining = st.H - t;
        st.jump = static_cast<std::ptrdiff_t>(i);
        return st;
    }
    const double u0 = i > 0 ? times[i - 1] : 0.0;
    const double v0 = i > 0 ? after[i - 1] : 0.0;
    st.G = st.H = t;
    st.N = std::min(path.t_max(), u0 + (t - v0) / path.drift_rate());
    return st;
}

AnomalousPath::AnomalousPath(LabelledSubordinatorPath path)
    : path_(std::move(path)), horizon_(path_.base().terminal_value())
{
}

double AnomalousPath::coupled_before(std::size_t i) const
{
    const auto& base = path_.base();
    return (i > 0 ? path_.signed_jumps_through(i - 1) : 0.0)
         + path_.residual_slope() * base.drift_rate() * base.jump_times()[i];
}

AnomalousState AnomalousPath::at(double t) const
{
    const RenewalState rs = renewal_state(path_.base(), t);
    t = std::min(t, horizon_);
    AnomalousState out;
    out.G = rs.G;
    out.H = rs.H;
    out.N = rs.N;
    out.age = rs.age;
    out.remaining = rs.remaining;
    const auto& base = path_.base();
    if (rs.jump >= 0) {
        const auto i = static_cast<std::size_t>(rs.jump);
        const double label = path_.labels()[i];
        out.lagging = coupled_before(i);
        out.leading = out.lagging + label * base.jump_sizes()[i];
        out.velocity = label;
        out.S = out.lagging + (t - rs.G) / (rs.H - rs.G) * (out.leading - out.lagging);
        return out;
    }
    const std::size_t k = jumps_through(base.jump_times(), rs.N);
    out.S = (k > 0 ? path_.signed_jumps_through(k - 1) : 0.0) + path_.residual_slope() * base.drift_rate() * rs.N;
    out.lagging = out.leading = out.S;
    out.velocity = path_.residual_slope();
    return out;
}

double AnomalousPath::integral_value(double t) const
{
    if (!(t >= 0.0) || t > horizon_ * (1.0 + 1e-12))
        throw std::out_of_range("anomalous path: t beyond the path support");
    const auto& base = path_.base();
    const double m = path_.residual_slope();
    double pos = 0.0, acc = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < base.jump_count(); ++i) {
        const double flat = base.drift_rate() * (base.jump_times()[i] - prev);
        if (pos + flat >= t)
            return acc + m * (t - pos);
        acc += m * flat;
        pos += flat;
        const double j = base.jump_sizes()[i];
        const double label = path_.labels()[i];
        if (pos + j >= t)
            return acc + label * (t - pos);
        acc += label * j;
        pos += j;
        prev = base.jump_times()[i];
    }
    return acc + m * (t - pos);
}

double sample_anomalous(double alpha, double b, double t, double epsilon, Rng& rng, const SubordinatorOptions& opts)
{
    const AnomalousPath path(labelled_subordinator_until(alpha, b, t, epsilon, rng, opts));
    return path.at(t).S;
}

DensityEvaluator::DensityEvaluator(double alpha, double m) : alpha_(alpha), m_(m)
{
    check_alpha(alpha);
    if (!(m > -1.0 && m < 1.0))
        throw std::invalid_argument("m_S must lie in (-1,1)");
    r_ = (1.0 + m) / (1.0 - m);
    K_ = 2.0 * std::sin(pi * alpha) / pi;
}

// a = (1+x)^alpha, c = (1-x)^alpha
double DensityEvaluator::denominator(double a, double c) const
{
    return r_ * c * c + 2.0 * std::cos(pi * alpha_) * a * c + a * a / r_;
}

double DensityEvaluator::f1(double x) const
{
    return K_ * std::pow(1.0 - x, alpha_ - 1.0) * std::pow(1.0 + x, alpha_ - 1.0)
         / denominator(std::pow(1.0 + x, alpha_), std::pow(1.0 - x, alpha_));
}

double DensityEvaluator::density(double t, double x) const
{
    if (!(t > 0.0))
        throw std::invalid_argument("density: t must be > 0");
    if (!(std::abs(x) < t))
        throw std::domain_error("density: x outside (-t, t)");
    return f1(x / t) / t;
}

// f_1 in the variable v = (1+x)^alpha; 1-x = 2 - v^{1/alpha} keeps full precision near x = -1
double DensityEvaluator::left_weight(double v) const
{
    const double one_minus = 2.0 - std::pow(v, 1.0 / alpha_);
    return K_ / alpha_ * std::pow(one_minus, alpha_ - 1.0) / denominator(v, std::pow(one_minus, alpha_));
}

// f_1 in the variable w = (1-x)^alpha
double DensityEvaluator::right_weight(double w) const
{
    const double one_plus = 2.0 - std::pow(w, 1.0 / alpha_);
    return K_ / alpha_ * std::pow(one_plus, alpha_ - 1.0) / denominator(std::pow(one_plus, alpha_), w);
}

// F_1(x) for x <= 0 with v = (1+x)^alpha
double DensityEvaluator::left_integral(double x) const
{
    const double upper = std::pow(1.0 + x, alpha_);
    return num::integrate([&](double v) { return left_weight(v); }, 0.0, upper, 1e-12);
}

// 1 - F_1(x) for x >= 0 with w = (1-x)^alpha
double DensityEvaluator::right_integral(double x) const
{
    const double upper = std::pow(1.0 - x, alpha_);
    return num::integrate([&](double w) { return right_weight(w); }, 0.0, upper, 1e-12);
}

double DensityEvaluator::cdf(double t, double x) const
{
    if (!(t > 0.0))
        throw std::invalid_argument("cdf: t must be > 0");
    const double z = x / t;
    if (z <= -1.0)
        return 0.0;
    if (z >= 1.0)
        return 1.0;
    const double v = z <= 0.0 ? left_integral(z) : 1.0 - right_integral(z);
    return std::clamp(v, 0.0, 1.0);
}

double DensityEvaluator::quantile(double t, double p) const
{
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("quantile: p must lie in (0,1)");
    auto g = [&](double z) { return cdf(1.0, z) - p; };
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-12; };
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, -1.0, 1.0, -p, 1.0 - p, tol, iters);
    return t * 0.5 * (lo + hi);
}

double DensityEvaluator::sample(double t, Rng& rng) const
{
    return quantile(t, rng.uniform_open());
}

double DensityEvaluator::integrate_against(const std::function<double(double)>& g) const
{
    auto left = [&](double v) { return g(std::pow(v, 1.0 / alpha_) - 1.0) * left_weight(v); };
    auto right = [&](double w) { return g(1.0 - std::pow(w, 1.0 / alpha_)) * right_weight(w); };
    return num::integrate(left, 0.0, 1.0, 1e-12) + num::integrate(right, 0.0, 1.0, 1e-12);
}

double density_f(double alpha, double m, double t, double x)
{
    return DensityEvaluator(alpha, m).density(t, x);
}

double cdf_f(double alpha, double m, double t, double x)
{
    return DensityEvaluator(alpha, m).cdf(t, x);
}

double sample_marginal(double alpha, double m, double t, Rng& rng)
{
    return DensityEvaluator(alpha, m).sample(t, rng);
}

double sample_ratio(double alpha, double b, Rng& rng)
{
    check_alpha(alpha);
    if (!(b >= -1.0 && b <= 1.0))
        throw std::invalid_argument("sample_ratio: b must lie in [-1,1]");
    const double tu = std::pow(0.5 * (1.0 + b), 1.0 / alpha) * sample_positive_stable(alpha, rng);
    const double td = std::pow(0.5 * (1.0 - b), 1.0 / alpha) * sample_positive_stable(alpha, rng);
    return (tu - td) / (tu + td);
}

std::complex<double> flt_f(double alpha, double m, double s, double y)
{
    check_alpha(alpha);
    if (!(s > 0.0))
        throw std::invalid_argument("flt_f: s must be > 0");
    const std::complex<double> A(s, -y);
    const std::complex<double> B(s, y);
    const double p = 0.5 * (1.0 + m);
    const double q = 0.5 * (1.0 - m);
    return (p * std::pow(A, alpha - 1.0) + q * std::pow(B, alpha - 1.0))
         / (p * std::pow(A, alpha) + q * std::pow(B, alpha));
}

LampertiTable lamperti_recursion(const Comb& comb, std::size_t n_max)
{
    if (n_max > 5000)
        throw std::invalid_argument("lamperti_recursion: n_max must be <= 5000");
    const std::size_t N = n_max;
    std::vector<double> u(N + 2), d(N + 2), tu(N + 2), td(N + 2);
    for (std::size_t i = 0; i <= N + 1; ++i) {
        u[i] = i > 0 ? comb.up().pmf(i) : 0.0;
        d[i] = i > 0 ? comb.down().pmf(i) : 0.0;
        tu[i] = comb.up().tail_at(i);
        td[i] = comb.down().tail_at(i);
    }
    LampertiTable table(N);
    // q_{j,k} by column k; p by diagonal D = n - k
    std::vector<std::vector<double>> qcol(N + 1, std::vector<double>(N + 1, 0.0));
    std::vector<std::vector<double>> pdiag(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        for (std::size_t k = 1; k <= n; ++k) {
            const std::vector<double>& P = pdiag[n - k];
            double acc = 0.0;
            for (std::size_t mm = 1; mm <= k; ++mm)
                acc += u[mm] * P[k - mm];
            qcol[k][n] = acc;
        }
        std::vector<double>& row = table.row(n);
        row.assign(n + 1, 0.0);
        row[0] = td[n];
        for (std::size_t k = 1; k <= n; ++k) {
            const std::vector<double>& Q = qcol[k];
            double acc = d[n - k + 1] * tu[k - 1];
            for (std::size_t l = 1; l + k <= n; ++l)
                acc += d[l] * Q[n - l];
            row[k] = acc;
        }
        for (std::size_t k = 0; k <= n; ++k)
            pdiag[n - k].push_back(row[k]);
    }
    return table;
}

namespace {

std::uint64_t series_terms(double z)
{
    return static_cast<std::uint64_t>(std::ceil(std::log(1e-14 * (1.0 - z)) / std::log(z))) + 1;
}

// sum_{n >= 0} T(n) z^n
double tail_series(const PersistenceLaw& law, double z, std::uint64_t terms)
{
    double acc = 0.0, zn = 1.0;
    for (std::uint64_t n = 0; n < terms; ++n) {
        const double t = law.tail_at(n);
        if (t == 0.0)
            break;
        acc += t * zn;
        zn *= z;
    }
    return acc;
}

} // namespace

GfLimit double_gf_limit(const Comb& comb, double x, double lambda, std::uint64_t max_terms)
{
    if (!(x > 0.0 && x < 1.0))
        throw std::invalid_argument("double_gf_limit: x must lie in (0,1)");
    if (!(lambda > 0.0))
        throw std::invalid_argument("double_gf_limit: lambda must be > 0");
    const RegimeReport rep = regime_report(comb);
    const double y = std::exp(-lambda * (1.0 - x));
    const double xy = x * y;
    const std::uint64_t terms = series_terms(x);
    if (terms > max_terms)
        throw std::length_error("double_gf_limit: x too close to 1, needs " + std::to_string(terms)
                                + " series terms (budget " + std::to_string(max_terms) + ")");
    const double Td = tail_series(comb.down(), x, terms);
    const double Tu = tail_series(comb.up(), xy, series_terms(xy));
    const double Fd = 1.0 - (1.0 - x) * Td;
    const double num = Fd * Tu * y + Td;
    const double den = (1.0 - x) * Td + Fd * (1.0 - xy) * Tu;
    GfLimit out;
    out.value = (1.0 - x) * num / den;
    const double a = rep.alpha;
    const double inv_r = 1.0 / rep.r;
    out.target = (std::pow(1.0 + lambda, a - 1.0) + inv_r) / (std::pow(1.0 + lambda, a) + inv_r);
    out.terms = terms;
    return out;
}

KernelDiagnostics markov_kernel_check(const std::vector<RenewalState>& states, double alpha, double a_lo,
                                      double a_hi)
{
    check_alpha(alpha);
    if (!(a_lo > 0.0 && a_hi > a_lo))
        throw std::invalid_argument("markov_kernel_check: need 0 < a_lo < a_hi");
    std::vector<double> ages, rem;
    for (const auto& s : states)
        if (s.age >= a_lo && s.age <= a_hi) {
            ages.push_back(s.age);
            rem.push_back(s.remaining);
        }
    if (ages.size() < 200)
        throw std::runtime_error("markov_kernel_check: only " + std::to_string(ages.size())
                                 + " samples in the age bin (need 200)");
    std::sort(rem.begin(), rem.end());
    const double n = static_cast<double>(rem.size());
    auto mixture = [&](double h) {
        double acc = 0.0;
        for (double a : ages)
            acc += 1.0 - std::pow(a / (a + h), alpha);
        return acc / n;
    };
    KernelDiagnostics out;
    out.samples = rem.size();
    for (std::size_t i = 0; i < rem.size(); ++i) {
        const double F = mixture(rem[i]);
        out.ks = std::max({out.ks, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
    }
    return out;
}

void write_anomalous_csv(std::ostream& out, const AnomalousPath& path, const std::vector<double>& grid)
{
    out << "t,S,label,age\n";
    for (double t : grid) {
        const AnomalousState st = path.at(t);
        out << format_real(t) << ',' << format_real(st.S) << ',' << format_real(st.velocity) << ','
            << format_real(st.age) << '\n';
    }
}

} // namespace prw
