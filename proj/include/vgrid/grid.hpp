#pragma once

#include <string>
#include <vector>

#include "vgrid/frame.hpp"

namespace vgrid {

enum class CellStatus { Unknown, Warped, Key, Final };

std::string to_string(CellStatus s);

// The N x F camera-time lattice. Row 0 holds the input video and is Final
// from construction; statuses only ever advance Unknown -> Warped -> Key/Final.
class Grid4D {
 public:
  Grid4D(int n_views, int n_frames);

  static Grid4D from_input_row(const std::vector<Frame>& input_row, int n_views);

  int n_views() const { return n_views_; }
  int n_frames() const { return n_frames_; }

  Frame& state(int view, int time) { return cells_[index(view, time)].state; }
  const Frame& state(int view, int time) const { return cells_[index(view, time)].state; }
  CellStatus status(int view, int time) const { return cells_[index(view, time)].status; }
  double sigma(int view, int time) const { return cells_[index(view, time)].sigma; }

  void set_state(int view, int time, Frame frame, double sigma);
  void advance_status(int view, int time, CellStatus status);
  bool known(int view, int time) const { return status(view, time) >= CellStatus::Key; }

  bool complete() const;  // every cell Final at sigma 0

 private:
  struct Cell {
    Frame state;
    CellStatus status = CellStatus::Unknown;
    double sigma = 0.0;
  };

  size_t index(int view, int time) const;

  int n_views_;
  int n_frames_;
  std::vector<Cell> cells_;
};

}  // namespace vgrid
