#include "prw/scaling_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prw/numerics.hpp"

namespace prw {

namespace {

int heaviness(TailKind k)
{
    switch (k) {
    case TailKind::vanishing:
        return 0;
    case TailKind::geometric:
        return 1;
    case TailKind::power:
        return 2;
    }
    return 0;
}

std::optional<double> tail_balance(const PersistenceLaw& up, const PersistenceLaw& down)
{
    const int hu = heaviness(up.tail_kind());
    const int hd = heaviness(down.tail_kind());
    if (hu == 0 && hd == 0)
        return std::nullopt;
    if (hu != hd)
        return hu > hd ? 1.0 : -1.0;
    const double pu = up.tail_parameter();
    const double pd = down.tail_parameter();
    if (up.tail_kind() == TailKind::geometric && pu != pd)
        return pu > pd ? 1.0 : -1.0;
    if (up.tail_kind() == TailKind::power && pu != pd)
        return pu < pd ? 1.0 : -1.0;
    return std::tanh(0.5 * (up.log_tail_constant() - down.log_tail_constant()));
}

} // namespace

DriftParameters mean_drift(const Comb& comb)
{
    DriftParameters out;
    out.integrable_up = comb.up().integrable();
    out.integrable_down = comb.down().integrable();
    out.b = tail_balance(comb.up(), comb.down());
    const auto eu = comb.up().mean();
    const auto ed = comb.down().mean();
    if (eu && ed)
        out.d = (*eu - *ed) / (*eu + *ed);
    else if (eu)
        out.d = -1.0;
    else if (ed)
        out.d = 1.0;
    if (!out.integrable_up && !out.integrable_down)
        out.m = *out.b;
    else
        out.m = *out.d;
    if (!(std::abs(out.m) < 1.0))
        throw RegimeUnsupported("extremal mean drift m_S = " + format_real(out.m) + " is not supported");
    return out;
}

double skewness_beta(double m, double b, double alpha)
{
    const double wu = std::pow(1.0 - m, alpha) * (1.0 + b);
    const double wd = std::pow(1.0 + m, alpha) * (1.0 - b);
    return (wu - wd) / (wu + wd);
}

double stable_scale(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("stable_scale: alpha must lie in (0,2]");
    // (2-a) Gamma(2-a) = Gamma(3-a) removes the singularity at a = 2
    const double head = num::gamma(3.0 - alpha) / alpha;
    const double x = alpha - 1.0;
    double g;
    if (std::abs(x) < 1e-4) {
        const double y = 0.5 * num::pi * x;
        g = 0.5 * num::pi * (1.0 - y * y / 6.0 + y * y * y * y / 120.0);
    } else {
        g = std::sin(0.5 * num::pi * x) / x;
    }
    return head * g;
}

Regime classify_regime(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("classify_regime: alpha must lie in (0,2]");
    if (alpha < 1.0)
        return Regime::anomalous;
    if (alpha == 1.0)
        return Regime::cauchy;
    if (alpha < 2.0)
        return Regime::generic_stable;
    return Regime::gaussian;
}

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::gaussian:
        return "gaussian";
    case Regime::generic_stable:
        return "generic-stable";
    case Regime::cauchy:
        return "cauchy";
    case Regime::anomalous:
        return "anomalous";
    }
    return "?";
}

Regime parse_regime(const std::string& name)
{
    for (Regime r : {Regime::gaussian, Regime::generic_stable, Regime::cauchy, Regime::anomalous})
        if (to_string(r) == name)
            return r;
    throw ConfigError("regime", "unknown regime '" + name + "' (gaussian|generic-stable|cauchy|anomalous)");
}

double comb_alpha(const Comb& comb)
{
    double alpha = 2.0;
    for (const auto* law : {&comb.up(), &comb.down()})
        if (auto a = law->tail_index())
            alpha = std::min(alpha, *a);
    return alpha;
}

RegimeReport regime_report(const Comb& comb)
{
    if (comb.up().degenerate() && comb.down().degenerate())
        throw RegimeUnsupported("both run lengths are a.s. constant: the walk has no scaling limit");
    const DriftParameters drift = mean_drift(comb);
    RegimeReport rep;
    rep.alpha = comb_alpha(comb);
    rep.m = drift.m;
    rep.b = drift.b;
    rep.d = drift.d;
    rep.integrable_up = drift.integrable_up;
    rep.integrable_down = drift.integrable_down;
    rep.regime = classify_regime(rep.alpha);
    rep.beta = rep.alpha < 2.0 && rep.b ? skewness_beta(rep.m, *rep.b, rep.alpha) : 0.0;
    rep.r = (1.0 + rep.m) / (1.0 - rep.m);
    return rep;
}

void write_regime_report(Report& out, const RegimeReport& rep, const std::string& prefix)
{
    out.add(prefix + "regime", to_string(rep.regime));
    out.add(prefix + "alpha", rep.alpha);
    out.add(prefix + "m_S", rep.m);
    out.add(prefix + "b_S", rep.b ? format_real(*rep.b) : std::string("undefined"));
    out.add(prefix + "d_S", rep.d ? format_real(*rep.d) : std::string("undefined"));
    out.add(prefix + "integrable_up", rep.integrable_up);
    out.add(prefix + "integrable_down", rep.integrable_down);
    out.add(prefix + "beta", rep.beta);
    out.add(prefix + "r_S", rep.r);
}

NormalizerSet::NormalizerSet(const Comb& comb, double m) : comb_(comb), m_(m)
{
    if (!(std::abs(m) < 1.0))
        throw std::invalid_argument("normalizers: m must lie in (-1,1)");
}

double NormalizerSet::sigma2(double t) const
{
    const double wu = 1.0 - m_;
    const double wd = 1.0 + m_;
    const double x = t / wu;
    const double y = t / wd;
    return wu * wu * comb_.up().truncated_second_moment(x) + wd * wd * comb_.down().truncated_second_moment(y)
         - 2.0 * wu * wd * comb_.up().truncated_first_moment(x) * comb_.down().truncated_first_moment(y);
}

double NormalizerSet::theta(double t) const
{
    return comb_.up().truncated_mean(t) + comb_.down().truncated_mean(t);
}

double NormalizerSet::a(double u) const
{
    if (!(u > 0.0))
        throw std::invalid_argument("normalizers: u must be > 0");
    auto pred = [&](std::uint64_t n) {
        const double t = static_cast<double>(n);
        const double s2 = sigma2(t);
        return s2 > 0.0 && t * t >= u * s2;
    };
    return static_cast<double>(num::first_true(pred, 1));
}

double NormalizerSet::s(double u) const
{
    if (!(u > 0.0))
        throw std::invalid_argument("normalizers: u must be > 0");
    auto pred = [&](std::uint64_t n) {
        const double t = static_cast<double>(n);
        return theta(a(t)) * t >= u;
    };
    return static_cast<double>(num::first_true(pred, 1));
}

double NormalizerSet::lambda(double u) const
{
    return a(s(u));
}

double cauchy_prefactor(const Comb& comb, const NormalizerSet& norm, double u)
{
    const double s = norm.s(u);
    const double as = norm.a(s);
    const auto eu = comb.up().mean();
    const auto ed = comb.down().mean();
    const double D = eu && ed ? *eu + *ed : norm.theta(as);
    return D * s / as;
}

namespace {

// sum_n pmf_B(n) T_A((t + wb n)/wa)
double cross_tail(const PersistenceLaw& B, double wb, const PersistenceLaw& A, double wa, double t)
{
    constexpr std::uint64_t exact_terms = 1u << 16;
    double acc = 0.0;
    std::uint64_t n = 1;
    for (; n <= exact_terms; ++n) {
        const double p = B.pmf(n);
        if (p > 0.0)
            acc += p * A.tail((t + wb * static_cast<double>(n)) / wa);
        if (B.tail_at(n) == 0.0)
            return acc;
    }
    // geometric blocks [n, hi], endpoint average of the monotone factor
    while (n < (std::uint64_t{1} << 60)) {
        const double remaining = B.tail_at(n - 1);
        if (remaining < 1e-20 * std::max(acc, 1e-300))
            break;
        const std::uint64_t hi = std::max(n + 1, static_cast<std::uint64_t>(static_cast<double>(n) * 1.02));
        const double mass = remaining - B.tail_at(hi);
        const double f_lo = A.tail((t + wb * static_cast<double>(n)) / wa);
        const double f_hi = A.tail((t + wb * static_cast<double>(hi)) / wa);
        acc += mass * 0.5 * (f_lo + f_hi);
        n = hi + 1;
    }
    return acc;
}

std::uint64_t effective_support(const PersistenceLaw& law)
{
    std::uint64_t n = 1;
    while (law.tail_at(n) > 1e-17) {
        if (n > 100000)
            throw std::domain_error("central_second_moment: support too large (heavy tail)");
        ++n;
    }
    return n;
}

} // namespace

double central_tail(const Comb& comb, double m, double t)
{
    const double wu = 1.0 - m;
    const double wd = 1.0 + m;
    return cross_tail(comb.down(), wd, comb.up(), wu, t) + cross_tail(comb.up(), wu, comb.down(), wd, t);
}

double central_second_moment(const Comb& comb, double m, double t)
{
    const double wu = 1.0 - m;
    const double wd = 1.0 + m;
    const std::uint64_t ku = effective_support(comb.up());
    const std::uint64_t kd = effective_support(comb.down());
    if (static_cast<double>(ku) * static_cast<double>(kd) > 1e8)
        throw std::domain_error("central_second_moment: support too large");
    double acc = 0.0;
    for (std::uint64_t i = 1; i <= ku; ++i) {
        const double pu = comb.up().pmf(i);
        if (pu == 0.0)
            continue;
        for (std::uint64_t j = 1; j <= kd; ++j) {
            const double x = wu * static_cast<double>(i) - wd * static_cast<double>(j);
            if (std::abs(x) <= t)
                acc += pu * comb.down().pmf(j) * x * x;
        }
    }
    return acc;
}

EquivalenceDiagnostics equivalence_checks(const Comb& comb, const std::vector<double>& grid)
{
    const RegimeReport rep = regime_report(comb);
    EquivalenceDiagnostics out;
    out.t = grid;
    if (rep.alpha < 2.0) {
        const double b = *rep.b;
        const double m = rep.m;
        out.limit_constant = std::pow(1.0 - m, rep.alpha) * 0.5 * (1.0 + b)
                           + std::pow(1.0 + m, rep.alpha) * 0.5 * (1.0 - b);
        for (double t : grid) {
            const double ratio = central_tail(comb, m, t) / (comb.up().tail(t) + comb.down().tail(t));
            out.tail_ratio.push_back(ratio);
            const double dev = std::abs(ratio / out.limit_constant - 1.0);
            out.max_deviation = std::max(out.max_deviation, dev);
            out.last_deviation = dev;
        }
    } else {
        const NormalizerSet norm(comb, rep.m);
        out.limit_constant = 1.0;
        for (double t : grid) {
            const double ratio = central_second_moment(comb, rep.m, t) / norm.sigma2(t);
            out.variance_ratio.push_back(ratio);
            const double dev = std::abs(ratio - 1.0);
            out.max_deviation = std::max(out.max_deviation, dev);
            out.last_deviation = dev;
        }
    }
    return out;
}

} // namespace prw
