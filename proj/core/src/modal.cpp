#include "hilfer/modal.hpp"

#include "hilfer/error.hpp"

namespace hilfer {

namespace {

GridFunction row_trace(const TimeGrid& grid, const Eigen::MatrixXd& data, std::size_t mode) {
    if (mode >= static_cast<std::size_t>(data.rows()))
        throw ValidationError("mode", "index exceeds the number of modes");
    GridFunction g{grid, std::vector<double>(grid.size())};
    for (std::size_t j = 0; j < grid.size(); ++j)
        g.values[j] = data(static_cast<Eigen::Index>(mode), static_cast<Eigen::Index>(j));
    return g;
}

} // namespace

GridFunction ModalField::trace(std::size_t mode) const { return row_trace(grid, values, mode); }

GridFunction ModalField::regular_trace(std::size_t mode) const { return row_trace(grid, regular, mode); }

Field ModalField::snapshot(std::size_t node) const {
    if (node >= nodes())
        throw ValidationError("node", "index exceeds the time grid");
    return Field{basis, values.col(static_cast<Eigen::Index>(node))};
}

} // namespace hilfer
