#include "vgrid/grid.hpp"

#include <stdexcept>

namespace vgrid {

std::string to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Unknown: return "unknown";
    case CellStatus::Warped: return "warped";
    case CellStatus::Key: return "key";
    case CellStatus::Final: return "final";
  }
  return "unknown";
}

Grid4D::Grid4D(int n_views, int n_frames) : n_views_(n_views), n_frames_(n_frames) {
  if (n_views < 2 || n_frames < 2) throw std::invalid_argument("grid: need N >= 2 and F >= 2");
  cells_.resize(static_cast<size_t>(n_views) * n_frames);
}

Grid4D Grid4D::from_input_row(const std::vector<Frame>& input_row, int n_views) {
  Grid4D grid(n_views, static_cast<int>(input_row.size()));
  for (int i = 0; i < grid.n_frames_; ++i) {
    Cell& cell = grid.cells_[grid.index(0, i)];
    cell.state = input_row[i];
    cell.status = CellStatus::Final;
    cell.sigma = 0.0;
  }
  return grid;
}

size_t Grid4D::index(int view, int time) const {
  if (view < 0 || view >= n_views_ || time < 0 || time >= n_frames_) {
    throw std::out_of_range("grid: cell (" + std::to_string(view) + ", " + std::to_string(time) +
                            ") out of range");
  }
  return static_cast<size_t>(view) * n_frames_ + time;
}

void Grid4D::set_state(int view, int time, Frame frame, double sigma) {
  Cell& cell = cells_[index(view, time)];
  cell.state = std::move(frame);
  cell.sigma = sigma;
}

void Grid4D::advance_status(int view, int time, CellStatus status) {
  Cell& cell = cells_[index(view, time)];
  if (status < cell.status) {
    throw std::logic_error("grid: status of cell (" + std::to_string(view) + ", " +
                           std::to_string(time) + ") may not regress from " +
                           to_string(cell.status) + " to " + to_string(status));
  }
  cell.status = status;
}

bool Grid4D::complete() const {
  for (const Cell& cell : cells_) {
    if (cell.status != CellStatus::Final || cell.sigma != 0.0) return false;
  }
  return true;
}

}  // namespace vgrid
