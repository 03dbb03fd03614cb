#pragma once

#include <span>
#include <vector>

namespace pme {

// Finite-difference weights for the derivative of order `order` at x0 on
// arbitrary nodes (Fornberg's recursion). Returns one weight per node.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

// Derivatives of sampled data along one axis. Interior nodes use a centred
// window of `width` nodes; windows are shifted inward near the ends. When
// `even_at_origin` is set and x[0] == 0 the samples are reflected evenly
// about the origin instead of shifting the window.
class Differentiator {
public:
    Differentiator(std::span<const double> x, int width, bool even_at_origin);

    // d^order f / dx^order at every node; f is strided so the same operator
    // serves rows and columns of a row-major array.
    void apply(int order, const double* f, std::size_t stride, double* out,
               std::size_t out_stride) const;

    std::size_t size() const { return n_; }

private:
    struct Stencil {
        std::vector<long> index; // negative: mirrored node -index
        std::vector<double> w1;
        std::vector<double> w2;
    };

    std::size_t n_;
    std::vector<Stencil> stencils_;
};

} // namespace pme
