//! Grid sweeps over the slices, boundary tracing, shape diagnostics and
//! dataset emission.

mod boundary;
mod emit;
mod figures;
mod grid;

pub use boundary::{
    bisect, curve_has_straight_segment, detect_straight_segment, line_slice_at, ppt_center, ppt_straight_segment, rays,
    trace_boundary, trace_ppt_boundary, BoundaryCurve, BoundaryPoint, Predicate, Segment, SliceMargin, StraightSegment,
};
pub use emit::{
    curve_to_csv, curve_to_json, emit_curve, emit_rows, fmt_sig, rows_to_csv, rows_to_json, DatasetEntry, Format,
    Manifest, CSV_HEADER, CURVE_HEADER,
};
pub use figures::{
    fraction_tag, fraction_value, generate_figure, separability_near, Figure, FigureOptions, FIG4_ALPHAS, FIG5_BETA,
    FIG6_ALPHAS,
};
pub use grid::{
    scan_point, scan_slice, Axis, Coords, GridSpec, Param, SliceKind, SliceRow, WitnessPolicy, DISPLAY_AXES,
};
