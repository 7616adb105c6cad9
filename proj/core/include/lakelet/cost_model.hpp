#pragma once

namespace lakelet {

// Modeled cost of pipeline work, charged to the lake clock by the code that
// performs the work. Under a SimulatedClock this makes timings deterministic;
// under a WallClock the charges are ignored and real elapsed time counts.
//
// Both pipelines pay for scanning, writing and committing metadata. Only the
// warehouse path pays per-field parse/validate/flatten work, and
// transform_per_field_ms is an extra per-field transform cost that can be
// zeroed to isolate the parse/validate component.
struct CostModel {
  double scan_per_kib_ms = 0.25;
  double write_fixed_ms = 1.0;
  double write_per_kib_ms = 1.0;
  double commit_ms = 1.0;
  double parse_per_field_ms = 0.04;
  double validate_per_field_ms = 0.04;
  double flatten_per_node_ms = 0.02;
  double transform_per_field_ms = 0.0;

  double scan(double bytes) const { return scan_per_kib_ms * bytes / 1024.0; }
  double write(double bytes) const { return write_fixed_ms + write_per_kib_ms * bytes / 1024.0; }
};

}  // namespace lakelet
