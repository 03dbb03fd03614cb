#include "pme/stencil.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "pme/errors.hpp"

namespace pme {

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order)
{
    const int n = static_cast<int>(nodes.size());
    if (order < 0 || n <= order)
        throw ParameterError("need more nodes than the derivative order");
    // c[j][k]: weight of node j for derivative k
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j)
        w[j] = c[j][order];
    return w;
}

Differentiator::Differentiator(std::span<const double> x, int width, bool even_at_origin)
    : n_(x.size())
{
    if (width < 3 || static_cast<std::size_t>(width) > n_)
        throw ConfigError("differentiation needs at least " + std::to_string(width) + " nodes");
    const bool mirror = even_at_origin && x[0] == 0.0;
    const long half = width / 2;
    const long n = static_cast<long>(n_);
    stencils_.resize(n_);
    for (long i = 0; i < n; ++i) {
        Stencil& st = stencils_[i];
        long lo = i - half;
        long hi = lo + width - 1;
        if (!mirror && lo < 0) {
            lo = 0;
            hi = width - 1;
        }
        if (hi > n - 1) {
            hi = n - 1;
            lo = hi - width + 1;
        }
        std::vector<double> nodes;
        for (long j = lo; j <= hi; ++j) {
            st.index.push_back(j);
            nodes.push_back(j < 0 ? -x[-j] : x[j]);
        }
        st.w1 = fd_weights(x[i], nodes, 1);
        st.w2 = fd_weights(x[i], nodes, 2);
    }
}

void Differentiator::apply(int order, const double* f, std::size_t stride, double* out,
                           std::size_t out_stride) const
{
    for (std::size_t i = 0; i < n_; ++i) {
        const Stencil& st = stencils_[i];
        const std::vector<double>& w = order == 1 ? st.w1 : st.w2;
        double acc = 0.0;
        for (std::size_t j = 0; j < st.index.size(); ++j)
            acc += w[j] * f[static_cast<std::size_t>(std::labs(st.index[j])) * stride];
        out[i * out_stride] = acc;
    }
}

} // namespace pme
