#include "prw/comb_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "prw/numerics.hpp"

namespace prw {

namespace {

constexpr std::uint64_t table_floor = 4096;
constexpr double max_power_threshold = 1e6;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

bool is_probability(double p)
{
    return std::isfinite(p) && p >= 0.0 && p <= 1.0;
}

// Smallest n >= 1 with c n^{-a} <= 1.
std::uint64_t power_threshold(double a, double c)
{
    if (c <= 1.0)
        return 1;
    const double x = std::pow(c, 1.0 / a);
    auto n = static_cast<std::uint64_t>(std::ceil(x));
    while (n > 1 && c * std::pow(static_cast<double>(n - 1), -a) <= 1.0)
        --n;
    while (c * std::pow(static_cast<double>(n), -a) > 1.0)
        ++n;
    return n;
}

double power_extension_hazard(double a, std::uint64_t k)
{
    if (k <= 1)
        return 1.0;
    return -std::expm1(a * std::log1p(-1.0 / static_cast<double>(k)));
}

double rule_hazard(const TailRule& rule, std::uint64_t k)
{
    return std::visit(overloaded{[](const ConstantExtension& e) { return e.p; },
                                 [k](const PowerExtension& e) { return power_extension_hazard(e.a, k); }},
                      rule);
}

} // namespace

void validate_family(const HazardFamily& family, const std::string& path)
{
    std::visit(overloaded{
                   [&](const ConstantHazard& h) {
                       if (!is_probability(h.p))
                           throw ConfigError(join(path, "p"), "hazard must lie in [0,1]");
                   },
                   [&](const PowerHazard& h) {
                       if (!std::isfinite(h.a) || h.a <= 0.0)
                           throw ConfigError(join(path, "a"), "tail exponent must be > 0");
                       if (!std::isfinite(h.c) || h.c <= 0.0)
                           throw ConfigError(join(path, "c"), "tail constant must be > 0");
                       if (std::pow(h.c, 1.0 / h.a) > max_power_threshold)
                           throw ConfigError(join(path, "c"), "c^(1/a) exceeds 1e6");
                   },
                   [&](const TableHazard& h) {
                       if (h.values.empty())
                           throw ConfigError(join(path, "values"), "table must be nonempty");
                       for (std::size_t i = 0; i < h.values.size(); ++i)
                           if (!is_probability(h.values[i]))
                               throw ConfigError(join(path, "values[" + std::to_string(i) + "]"),
                                                 "hazard must lie in [0,1]");
                       std::visit(overloaded{[&](const ConstantExtension& e) {
                                                 if (!is_probability(e.p))
                                                     throw ConfigError(join(path, "tail.p"),
                                                                       "hazard must lie in [0,1]");
                                             },
                                             [&](const PowerExtension& e) {
                                                 if (!std::isfinite(e.a) || e.a <= 0.0)
                                                     throw ConfigError(join(path, "tail.a"),
                                                                       "tail exponent must be > 0");
                                             }},
                                  h.tail);
                   }},
               family);
}

bool check_assumption1(const HazardFamily& family)
{
    return std::visit(overloaded{[](const ConstantHazard& h) { return h.p > 0.0; },
                                 [](const PowerHazard&) { return true; },
                                 [](const TableHazard& h) {
                                     if (std::find(h.values.begin(), h.values.end(), 1.0) != h.values.end())
                                         return true;
                                     return std::visit(
                                         overloaded{[](const ConstantExtension& e) { return e.p > 0.0; },
                                                    [](const PowerExtension&) { return true; }},
                                         h.tail);
                                 }},
                      family);
}

std::string describe(const HazardFamily& family)
{
    std::ostringstream os;
    std::visit(overloaded{[&](const ConstantHazard& h) { os << "constant(p=" << h.p << ")"; },
                          [&](const PowerHazard& h) { os << "power(a=" << h.a << ", c=" << h.c << ")"; },
                          [&](const TableHazard& h) {
                              os << "table(" << h.values.size() << " values, ";
                              std::visit(overloaded{[&](const ConstantExtension& e) {
                                                        os << "constant-extension p=" << e.p;
                                                    },
                                                    [&](const PowerExtension& e) {
                                                        os << "power-extension a=" << e.a;
                                                    }},
                                         h.tail);
                              os << ")";
                          }},
               family);
    return os.str();
}

PersistenceLaw::PersistenceLaw(HazardFamily family) : family_(std::move(family))
{
    validate_family(family_);
    if (!check_assumption1(family_))
        throw ConfigError("", "Assumption 1 fails for " + describe(family_) + ": runs may be infinite");

    std::vector<double> head{1.0};
    std::visit(overloaded{[&](const ConstantHazard& h) {
                              q_ = 1.0 - h.p;
                              kind_ = q_ == 0.0 ? TailKind::vanishing : TailKind::geometric;
                          },
                          [&](const PowerHazard& h) {
                              const std::uint64_t n0 = power_threshold(h.a, h.c);
                              head.assign(n0, 1.0);
                              head.push_back(std::min(1.0, h.c * std::pow(static_cast<double>(n0), -h.a)));
                              kind_ = TailKind::power;
                              power_a_ = h.a;
                              power_c_ = h.c;
                          },
                          [&](const TableHazard& h) {
                              for (double v : h.values)
                                  head.push_back(head.back() * (1.0 - v));
                              const double last = head.back();
                              const auto L = static_cast<double>(h.values.size());
                              std::visit(overloaded{[&](const ConstantExtension& e) {
                                                        q_ = 1.0 - e.p;
                                                        kind_ = q_ == 0.0 ? TailKind::vanishing
                                                                          : TailKind::geometric;
                                                    },
                                                    [&](const PowerExtension& e) {
                                                        kind_ = TailKind::power;
                                                        power_a_ = e.a;
                                                        power_c_ = last * std::pow(L, e.a);
                                                    }},
                                         h.tail);
                              if (last == 0.0)
                                  kind_ = TailKind::vanishing;
                          }},
               family_);

    L_ = head.size() - 1;
    P_ = std::max(L_, table_floor);
    tail_ = std::move(head);
    tail_.reserve(P_ + 1);
    for (std::uint64_t n = L_ + 1; n <= P_; ++n) {
        double v = 0.0;
        switch (kind_) {
        case TailKind::vanishing:
            v = 0.0;
            break;
        case TailKind::geometric:
            v = tail_.back() * q_;
            break;
        case TailKind::power:
            v = power_c_ * std::pow(static_cast<double>(n), -power_a_);
            break;
        }
        tail_.push_back(v);
    }
    sum0_.assign(P_ + 2, 0.0);
    sum1_.assign(P_ + 2, 0.0);
    for (std::uint64_t n = 0; n <= P_; ++n) {
        sum0_[n + 1] = sum0_[n] + tail_[n];
        sum1_[n + 1] = sum1_[n] + static_cast<double>(n) * tail_[n];
    }
}

double PersistenceLaw::hazard(std::uint64_t k) const
{
    if (k == 0)
        throw std::invalid_argument("hazard index starts at 1");
    if (k <= L_) {
        if (const auto* t = std::get_if<TableHazard>(&family_))
            return t->values[k - 1];
        return tail_[k - 1] == 0.0 ? 1.0 : 1.0 - tail_[k] / tail_[k - 1];
    }
    switch (kind_) {
    case TailKind::vanishing:
        return 1.0;
    case TailKind::geometric:
        return 1.0 - q_;
    case TailKind::power:
        return power_extension_hazard(power_a_, k);
    }
    return 1.0;
}

double PersistenceLaw::tail_at(std::uint64_t n) const
{
    if (n <= P_)
        return tail_[n];
    switch (kind_) {
    case TailKind::vanishing:
        return 0.0;
    case TailKind::geometric:
        return tail_[L_] * std::pow(q_, static_cast<double>(n - L_));
    case TailKind::power:
        return power_c_ * std::exp(-power_a_ * std::log(static_cast<double>(n)));
    }
    return 0.0;
}

std::uint64_t PersistenceLaw::floor_index(double t) const
{
    if (!(t >= 0.0))
        throw std::invalid_argument("persistence law evaluated at negative or NaN t");
    if (t >= static_cast<double>(max_run))
        return max_run;
    return static_cast<std::uint64_t>(std::floor(t));
}

double PersistenceLaw::tail(double t) const
{
    return tail_at(floor_index(t));
}

double PersistenceLaw::pmf(std::uint64_t n) const
{
    if (n == 0)
        return 0.0;
    if (n <= P_)
        return tail_[n - 1] - tail_[n];
    switch (kind_) {
    case TailKind::vanishing:
        return 0.0;
    case TailKind::geometric:
        return tail_at(n - 1) * (1.0 - q_);
    case TailKind::power:
        return tail_at(n) * std::expm1(-power_a_ * std::log1p(-1.0 / static_cast<double>(n)));
    }
    return 0.0;
}

double PersistenceLaw::sum0_beyond(std::uint64_t lo, std::uint64_t hi) const
{
    if (hi < lo)
        return 0.0;
    switch (kind_) {
    case TailKind::vanishing:
        return 0.0;
    case TailKind::geometric: {
        const double base = tail_at(lo);
        const double m = static_cast<double>(hi - lo + 1);
        return base * -std::expm1(m * std::log(q_)) / (1.0 - q_);
    }
    case TailKind::power:
        return power_c_ * num::power_sum(power_a_, lo, hi);
    }
    return 0.0;
}

double PersistenceLaw::sum1_beyond(std::uint64_t lo, std::uint64_t hi) const
{
    if (hi < lo)
        return 0.0;
    switch (kind_) {
    case TailKind::vanishing:
        return 0.0;
    case TailKind::geometric: {
        const double base = tail_at(lo);
        const double m = static_cast<double>(hi - lo + 1);
        const double qm = std::exp(m * std::log(q_));
        const double g0 = -std::expm1(m * std::log(q_)) / (1.0 - q_);
        const double g1 = (q_ - qm * (m - (m - 1.0) * q_)) / ((1.0 - q_) * (1.0 - q_));
        return base * (static_cast<double>(lo) * g0 + g1);
    }
    case TailKind::power:
        return power_c_ * num::power_sum(power_a_ - 1.0, lo, hi);
    }
    return 0.0;
}

double PersistenceLaw::s0(std::uint64_t n) const
{
    if (n <= P_ + 1)
        return sum0_[n];
    return sum0_[P_ + 1] + sum0_beyond(P_ + 1, n - 1);
}

double PersistenceLaw::s1(std::uint64_t n) const
{
    if (n <= P_ + 1)
        return sum1_[n];
    return sum1_[P_ + 1] + sum1_beyond(P_ + 1, n - 1);
}

double PersistenceLaw::truncated_mean(double t) const
{
    return s0(floor_index(t));
}

double PersistenceLaw::truncated_first_moment(double t) const
{
    const std::uint64_t n = floor_index(t);
    return s0(n) - static_cast<double>(n) * tail_at(n);
}

double PersistenceLaw::truncated_second_moment(double t) const
{
    const std::uint64_t n = floor_index(t);
    const double nd = static_cast<double>(n);
    return 2.0 * s1(n) + s0(n) - nd * nd * tail_at(n);
}

bool PersistenceLaw::integrable() const
{
    return kind_ != TailKind::power || power_a_ > 1.0;
}

bool PersistenceLaw::square_integrable() const
{
    return kind_ != TailKind::power || power_a_ > 2.0;
}

std::optional<double> PersistenceLaw::mean() const
{
    if (!integrable())
        return std::nullopt;
    double m = sum0_[P_ + 1];
    switch (kind_) {
    case TailKind::vanishing:
        break;
    case TailKind::geometric:
        m += tail_at(P_ + 1) / (1.0 - q_);
        break;
    case TailKind::power:
        m += power_c_ * num::power_sum_tail(power_a_, P_ + 1);
        break;
    }
    return m;
}

std::optional<double> PersistenceLaw::tail_index() const
{
    if (kind_ == TailKind::power)
        return power_a_;
    return std::nullopt;
}

double PersistenceLaw::log_tail_constant() const
{
    switch (kind_) {
    case TailKind::vanishing:
        return -std::numeric_limits<double>::infinity();
    case TailKind::geometric:
        return std::log(tail_[L_]) - static_cast<double>(L_) * std::log(q_);
    case TailKind::power:
        return std::log(power_c_);
    }
    return 0.0;
}

bool PersistenceLaw::degenerate() const
{
    for (std::uint64_t n = 1; n <= P_; ++n)
        if (tail_[n] < 1.0)
            return tail_[n] == 0.0;
    return false;
}

std::uint64_t PersistenceLaw::sample(Rng& rng) const
{
    const double u = rng.uniform_pos();
    // first n >= 1 with T(n) < u
    auto it = std::partition_point(tail_.begin() + 1, tail_.end(), [u](double v) { return v >= u; });
    if (it != tail_.end())
        return static_cast<std::uint64_t>(it - tail_.begin());
    double n = 0.0;
    switch (kind_) {
    case TailKind::vanishing:
        return P_;
    case TailKind::geometric:
        n = static_cast<double>(L_) + std::floor(std::log(u / tail_[L_]) / std::log(q_)) + 1.0;
        break;
    case TailKind::power:
        n = std::floor(std::exp((std::log(power_c_) - std::log(u)) / power_a_)) + 1.0;
        break;
    }
    n = std::max(n, static_cast<double>(P_ + 1));
    if (!(n < static_cast<double>(max_run)))
        return max_run;
    return static_cast<std::uint64_t>(n);
}

std::uint64_t PersistenceLaw::sample_sequential(Rng& rng) const
{
    for (std::uint64_t k = 1; k < max_run; ++k)
        if (rng.uniform() < hazard(k))
            return k;
    return max_run;
}

Comb::Comb(const CombSpec& spec)
    : spec_(spec),
      up_([&] {
          validate_family(spec.up, "up");
          if (!check_assumption1(spec.up))
              throw ConfigError("up", "Assumption 1 fails: up-runs may be infinite");
          return PersistenceLaw(spec.up);
      }()),
      down_([&] {
          validate_family(spec.down, "down");
          if (!check_assumption1(spec.down))
              throw ConfigError("down", "Assumption 1 fails: down-runs may be infinite");
          return PersistenceLaw(spec.down);
      }())
{
}

std::size_t GraftSpec::depth() const
{
    std::size_t d = 0;
    for (const auto& [word, q] : entries)
        d = std::max(d, word.size());
    return d;
}

namespace {

// Length of the leading run of a context word.
std::size_t leading_run(const std::string& word)
{
    std::size_t n = 1;
    while (n < word.size() && word[n] == word[0])
        ++n;
    return n;
}

HazardFamily with_overrides(const HazardFamily& family, const std::map<std::uint64_t, double>& overrides)
{
    if (overrides.empty())
        return family;
    const std::uint64_t top = overrides.rbegin()->first;
    TableHazard out;
    std::visit(overloaded{[&](const ConstantHazard& h) {
                              out.values.assign(top, h.p);
                              out.tail = ConstantExtension{h.p};
                          },
                          [&](const PowerHazard& h) {
                              const PersistenceLaw law(h);
                              const std::uint64_t L = std::max(top, power_threshold(h.a, h.c));
                              for (std::uint64_t k = 1; k <= L; ++k)
                                  out.values.push_back(law.hazard(k));
                              out.tail = PowerExtension{h.a};
                          },
                          [&](const TableHazard& h) {
                              out = h;
                              for (std::uint64_t k = out.values.size() + 1; k <= top; ++k)
                                  out.values.push_back(rule_hazard(h.tail, k));
                          }},
               family);
    for (const auto& [n, v] : overrides)
        out.values[n - 1] = v;
    return out;
}

} // namespace

void validate_graft(const GraftSpec& graft)
{
    for (const auto& [word, q] : graft.entries) {
        const std::string key = "graft." + word;
        if (word.find_first_not_of("ud") != std::string::npos)
            throw ConfigError(key, "context words use only the letters u and d");
        if (word.empty() || leading_run(word) >= word.size())
            throw ConfigError(key, "context must contain a direction change (e.g. uud)");
        if (!is_probability(q))
            throw ConfigError(key, "switch probability must lie in [0,1]");
    }
}

std::pair<CombSpec, CombSpec> envelope_transitions(const CombSpec& comb, const GraftSpec& graft)
{
    validate_graft(graft);
    // per run length: (min, max) of the leaf switch probabilities
    std::map<std::uint64_t, std::pair<double, double>> up_leaves, down_leaves;
    for (const auto& [word, q] : graft.entries) {
        auto& leaves = word[0] == 'u' ? up_leaves : down_leaves;
        const std::uint64_t n = leading_run(word);
        auto [it, fresh] = leaves.try_emplace(n, q, q);
        if (!fresh) {
            it->second.first = std::min(it->second.first, q);
            it->second.second = std::max(it->second.second, q);
        }
    }
    std::map<std::uint64_t, double> up_lo, up_hi, down_lo, down_hi;
    for (const auto& [n, mm] : up_leaves) {
        up_lo[n] = mm.second;  // lower walk leaves up-runs as early as possible
        up_hi[n] = mm.first;
    }
    for (const auto& [n, mm] : down_leaves) {
        down_lo[n] = mm.first;
        down_hi[n] = mm.second;
    }
    CombSpec lower{with_overrides(comb.up, up_lo), with_overrides(comb.down, down_lo)};
    CombSpec upper{with_overrides(comb.up, up_hi), with_overrides(comb.down, down_hi)};
    return {lower, upper};
}

HazardFamily read_hazard_family(const KeyValueFile& kv, const std::string& prefix)
{
    const std::string path = prefix.empty() || prefix.back() != '.' ? prefix : prefix.substr(0, prefix.size() - 1);
    const std::string kind = kv.get_string(prefix + "family");
    HazardFamily family;
    if (kind == "constant") {
        family = ConstantHazard{kv.get_double(prefix + "p")};
    } else if (kind == "power") {
        family = PowerHazard{kv.get_double(prefix + "a"), kv.get_double(prefix + "c", 1.0)};
    } else if (kind == "table") {
        TableHazard t;
        t.values = kv.get_doubles(prefix + "values");
        const std::string rule = kv.get_string(prefix + "tail");
        if (rule == "constant")
            t.tail = ConstantExtension{kv.get_double(prefix + "tail.p")};
        else if (rule == "power")
            t.tail = PowerExtension{kv.get_double(prefix + "tail.a")};
        else
            throw ConfigError(prefix + "tail", "unknown tail rule '" + rule + "' (constant|power)");
        family = std::move(t);
    } else {
        throw ConfigError(prefix + "family", "unknown family '" + kind + "' (constant|power|table)");
    }
    validate_family(family, path);
    return family;
}

CombSpec read_comb(const KeyValueFile& kv, const std::string& prefix)
{
    CombSpec spec{read_hazard_family(kv, prefix + "up."), read_hazard_family(kv, prefix + "down.")};
    if (!check_assumption1(spec.up))
        throw ConfigError(prefix + "up", "Assumption 1 fails: up-runs may be infinite");
    if (!check_assumption1(spec.down))
        throw ConfigError(prefix + "down", "Assumption 1 fails: down-runs may be infinite");
    return spec;
}

GraftSpec read_graft(const KeyValueFile& kv, const std::string& prefix)
{
    GraftSpec g;
    for (const auto& key : kv.keys_with_prefix(prefix))
        g.entries[key.substr(prefix.size())] = kv.get_double(key);
    validate_graft(g);
    return g;
}

void write_hazard_family(Report& out, const std::string& prefix, const HazardFamily& family)
{
    std::visit(overloaded{[&](const ConstantHazard& h) {
                              out.add(prefix + "family", "constant");
                              out.add(prefix + "p", h.p);
                          },
                          [&](const PowerHazard& h) {
                              out.add(prefix + "family", "power");
                              out.add(prefix + "a", h.a);
                              out.add(prefix + "c", h.c);
                          },
                          [&](const TableHazard& h) {
                              out.add(prefix + "family", "table");
                              std::string list;
                              for (std::size_t i = 0; i < h.values.size(); ++i)
                                  list += (i ? ", " : "") + format_real(h.values[i]);
                              out.add(prefix + "values", list);
                              std::visit(overloaded{[&](const ConstantExtension& e) {
                                                        out.add(prefix + "tail", "constant");
                                                        out.add(prefix + "tail.p", e.p);
                                                    },
                                                    [&](const PowerExtension& e) {
                                                        out.add(prefix + "tail", "power");
                                                        out.add(prefix + "tail.a", e.a);
                                                    }},
                                         h.tail);
                          }},
               family);
}

void write_comb(Report& out, const CombSpec& comb, const std::string& prefix)
{
    write_hazard_family(out, prefix + "up.", comb.up);
    write_hazard_family(out, prefix + "down.", comb.down);
}

} // namespace prw
