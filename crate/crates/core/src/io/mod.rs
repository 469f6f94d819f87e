//! Configuration, artifact files, plot data and the run driver behind the
//! command-line tool.

mod config;
mod export;
mod formats;
mod run;

pub use config::{
    BoundarySpec, GeometryConfig, InverseConfig, Mode, NoiseConfig, PathsConfig, RunConfig, ScheduleConfig, StudyConfig, TimeConfig,
};
pub use export::{export_plot_data, PlotSeries};
pub use formats::{
    atomic_write, format_schedule, format_snapshot, format_tube, parse_schedule, parse_tube, read_schedule, read_snapshot, read_tube,
    write_residuals, write_schedule, write_snapshots, write_tube, TubeNoise, RESIDUALS_MAGIC, SCHEDULE_MAGIC, TUBE_MAGIC,
};
pub use run::{run, RoundtripReport, RunSummary};
