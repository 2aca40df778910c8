#ifndef CONJSCAN_GRID_HPP
#define CONJSCAN_GRID_HPP

#include "conjscan/errors.hpp"

namespace conjscan {

/// Uniform partition of [0,1] with n nodes (n - 1 elements).
class Grid {
public:
    explicit Grid(int node_count) : n_(node_count) {
        if (n_ < 16)
            throw Error(ErrorCode::parameter_out_of_range,
                        "grid needs at least 16 nodes, got " + std::to_string(n_));
    }

    int node_count() const { return n_; }
    int element_count() const { return n_ - 1; }
    double h() const { return 1.0 / (n_ - 1); }
    double node(int i) const { return static_cast<double>(i) / (n_ - 1); }

private:
    int n_;
};

} // namespace conjscan

#endif
