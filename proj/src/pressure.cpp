#include "pme/pressure.hpp"

#include <algorithm>
#include <cmath>

#include "pme/errors.hpp"
#include "pme/stencil.hpp"

namespace pme {

PressureField pressure_field(const SolutionField& sol)
{
    if (sol.nr() < 5 || sol.nt() < 5)
        throw ConfigError("pressure field needs at least 5 nodes in r and in t");

    const std::size_t nr = sol.nr();
    const std::size_t nt = sol.nt();
    const double m = sol.params().m();
    const double scale = m / (m - 1.0);

    PressureField pf{sol.model(), sol.params(), sol.r(), sol.t(), {}, {}, {}, {}, {}, {}, 0.0, 0.0};
    const std::size_t total = nr * nt;
    pf.v.resize(total);
    pf.v_r.resize(total);
    pf.v_rr.resize(total);
    pf.v_t.resize(total);
    pf.lap.resize(total);
    pf.grad_sq.resize(total);

    for (std::size_t idx = 0; idx < total; ++idx)
        pf.v[idx] = scale * std::pow(sol.values()[idx], m - 1.0);

    const Differentiator dr(pf.r, 5, true);
    const Differentiator dt(pf.t, 3, false);
    for (std::size_t k = 0; k < nt; ++k) {
        const double* row = pf.v.data() + k * nr;
        dr.apply(1, row, 1, pf.v_r.data() + k * nr, 1);
        dr.apply(2, row, 1, pf.v_rr.data() + k * nr, 1);
    }
    for (std::size_t i = 0; i < nr; ++i)
        dt.apply(1, pf.v.data() + i, nr, pf.v_t.data() + i, nr);

    std::vector<double> h(nr, 0.0);
    for (std::size_t i = 0; i < nr; ++i)
        if (pf.r[i] > 0.0)
            h[i] = warp_log_derivative(pf.model, pf.r[i]).h;
    const int n = pf.model.dimension();
    for (std::size_t k = 0; k < nt; ++k) {
        for (std::size_t i = 0; i < nr; ++i) {
            const std::size_t idx = pf.index(k, i);
            if (pf.r[i] == 0.0) {
                pf.v_r[idx] = 0.0; // even symmetry
                pf.lap[idx] = n * pf.v_rr[idx];
            } else {
                pf.lap[idx] = pf.v_rr[idx] + (n - 1) * h[i] * pf.v_r[idx];
            }
            pf.grad_sq[idx] = pf.v_r[idx] * pf.v_r[idx];
        }
    }

    const auto [lo, hi] = std::minmax_element(pf.v.begin(), pf.v.end());
    pf.sup = *hi;
    pf.inf = *lo;
    return pf;
}

Extrema extremal_values(const PressureField& pf, const Region& region)
{
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t k = 0; k < pf.nt(); ++k) {
        for (std::size_t i = 0; i < pf.nr(); ++i) {
            if (!region.contains(pf.r[i], pf.t[k]))
                continue;
            const double v = pf.v[pf.index(k, i)];
            sup = std::max(sup, v);
            inf = std::min(inf, v);
            any = true;
        }
    }
    if (!any)
        throw ConfigError("extremal values requested over an empty region");
    return {sup, inf};
}

ResidualField pressure_identity_residual(const PressureField& pf)
{
    const double m = pf.params.m();
    ResidualField res;
    res.values.resize(pf.v.size());
    for (std::size_t k = 0; k < pf.nt(); ++k) {
        for (std::size_t i = 0; i < pf.nr(); ++i) {
            const std::size_t idx = pf.index(k, i);
            const double value = pf.v_t[idx] - (m - 1.0) * pf.v[idx] * pf.lap[idx] - pf.grad_sq[idx];
            res.values[idx] = value;
            if (k > 0 && k + 1 < pf.nt() && i + 1 < pf.nr())
                res.max_abs = std::max(res.max_abs, std::abs(value));
        }
    }
    return res;
}

double max_abs_in(const PressureField& pf, const ResidualField& res, const Region& region)
{
    double out = 0.0;
    for (std::size_t k = 0; k < pf.nt(); ++k)
        for (std::size_t i = 0; i < pf.nr(); ++i)
            if (region.contains(pf.r[i], pf.t[k]))
                out = std::max(out, std::abs(res.values[pf.index(k, i)]));
    return out;
}

} // namespace pme
