#include "cphase/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>

namespace cphase {

double median(std::vector<double> values)
{
    if (values.empty())
        return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1)
        return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

double tail_energy(std::span<const double> x, std::size_t k)
{
    std::vector<double> sq(x.size());
    std::transform(x.begin(), x.end(), sq.begin(), [](double v) { return v * v; });
    if (k >= sq.size())
        return 0.0;
    std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(k), sq.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = k; i < sq.size(); ++i)
        s += sq[i];
    return s;
}

double energy_outside(std::span<const double> x, std::span<const std::uint32_t> kept)
{
    double total = 0.0;
    for (double v : x)
        total += v * v;
    double inside = 0.0;
    for (std::uint32_t i : kept)
        inside += x[i] * x[i];
    return std::max(0.0, total - inside);
}

Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence)
{
    if (trials == 0 || successes > trials)
        throw std::invalid_argument("clopper_pearson: need 0 <= successes <= trials, trials > 0");
    const double alpha = 1.0 - confidence;
    const auto s = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    Interval ci;
    ci.lo = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<>(s, n - s + 1), alpha / 2);
    ci.hi = successes == trials ? 1.0
                                : boost::math::quantile(boost::math::beta_distribution<>(s + 1, n - s), 1 - alpha / 2);
    return ci;
}

double binomial_upper_tail(std::size_t successes, std::size_t trials, double p)
{
    if (successes == 0)
        return 1.0;
    if (successes > trials)
        return 0.0;
    boost::math::binomial_distribution<> dist(static_cast<double>(trials), p);
    return boost::math::cdf(boost::math::complement(dist, static_cast<double>(successes - 1)));
}

} // namespace cphase
