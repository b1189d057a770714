#pragma once

#include "hilfer/fracops.hpp"
#include "hilfer/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>

namespace hilfer {

/// Per-mode time traces u_n(t_j) on a time grid.
/// The field may blow up like d(t)^e at one end of the interval, where d(t) = t (left end) or
/// T - t (right end) and e = endpoint_exponent <= 0. `regular` stores values / d(t)^e, which is
/// finite everywhere including the endpoint. When `singular` is set the endpoint column of
/// `values` holds NaN for the modes that actually blow up.
struct ModalField {
    std::shared_ptr<const SpectralBasis> basis;
    TimeGrid grid;
    Eigen::MatrixXd values;   ///< modes x nodes
    Eigen::MatrixXd regular;  ///< modes x nodes
    double endpoint_exponent = 0.0;
    bool right_end = false;
    bool singular = false;

    std::size_t modes() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t nodes() const noexcept { return static_cast<std::size_t>(values.cols()); }

    /// Index of the node at the possibly singular end.
    std::size_t endpoint() const noexcept { return right_end ? nodes() - 1 : 0; }

    /// First and one-past-last node index at which every value is finite.
    std::size_t first_regular_node() const noexcept { return singular && !right_end ? 1 : 0; }
    std::size_t end_regular_node() const noexcept { return singular && right_end ? nodes() - 1 : nodes(); }

    GridFunction trace(std::size_t mode) const;
    GridFunction regular_trace(std::size_t mode) const;

    /// The field at node j as an element of the basis span.
    Field snapshot(std::size_t node) const;
};

} // namespace hilfer
