use std::fmt::Write as _;
use std::path::PathBuf;

use crate::forward::{simulate_forward, MeltingSchedule, SpaceTimeTube};
use crate::inverse::{add_noise, compare_schedules, reconstruct_schedule, sample_variance, ObservedTube, ScheduleErrors};
use crate::Result;

use super::config::{Mode, RunConfig};
use super::export::{export_plot_data, PlotSeries};
use super::formats::{atomic_write, read_tube, write_residuals, write_schedule, write_snapshots, write_tube, TubeNoise};

/// Errors of one reconstruction against the prescribed schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundtripReport {
    pub delta: f64,
    pub seed: u64,
    pub errors: ScheduleErrors,
    /// Sample variance of the reconstructed slopes.
    pub rate_variance: f64,
}

impl RoundtripReport {
    fn line(&self) -> String {
        let e = &self.errors;
        format!(
            "{}, {}, {:.6e}, {:.6e}, {:.6e}, {:.6e}, {:.6e}",
            self.delta, self.seed, e.max_value, e.relative_l2_value, e.max_rate, e.relative_l2_rate, self.rate_variance
        )
    }
}

const REPORT_HEADER: &str = "delta, seed, max_err_um, rel_l2_err_um, max_err_dum, rel_l2_err_dum, var_dum";

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub artifacts: Vec<PathBuf>,
    pub reports: Vec<RoundtripReport>,
}

/// Executes the configured mode and writes its artifacts.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let mut summary = RunSummary::default();
    match config.mode {
        Mode::Forward => {
            let (tube, _) = forward(config, &mut summary)?;
            log::info!("forward run wrote {} records", tube.len());
        }
        Mode::Perturb => {
            let input = config.paths.input_tube.as_ref().expect("validated");
            let (tube, _) = read_tube(input)?;
            let noisy = add_noise(&tube, config.noise.delta, config.noise.seed)?;
            let path = config.output_tube("tube_noisy.csv");
            write_tube(&path, &noisy.tube, Some(noise_header(config.noise.delta, config.noise.seed)))?;
            summary.artifacts.push(path);
        }
        Mode::Invert => {
            let input = config.paths.input_tube.as_ref().expect("validated");
            let (tube, noise) = read_tube(input)?;
            let observed = ObservedTube {
                tube,
                noise_level: noise.map_or(0.0, |n| n.delta),
                seed: noise.map(|n| n.seed),
                source: input.display().to_string(),
            };
            invert(config, &observed, &mut summary)?;
        }
        Mode::Roundtrip => {
            let (tube, truth) = forward(config, &mut summary)?;
            let (delta, seed) = (config.noise.delta, config.noise.seed);
            let noisy = add_noise(&tube, delta, seed)?;
            if delta > 0.0 {
                let path = config.paths.out.join("tube_noisy.csv");
                write_tube(&path, &noisy.tube, Some(noise_header(delta, seed)))?;
                summary.artifacts.push(path);
            }
            let schedule = invert(config, &noisy, &mut summary)?;
            let report = report(&schedule, &truth, delta, seed, None)?;
            log::info!(
                "roundtrip: relative L2 error of u_m {:.3e}, of du_m {:.3e}",
                report.errors.relative_l2_value,
                report.errors.relative_l2_rate
            );
            summary.reports.push(report);
            let series = [
                PlotSeries {
                    label: "true".into(),
                    schedule: truth,
                },
                PlotSeries {
                    label: format!("delta_{delta}"),
                    schedule,
                },
            ];
            write_report(config, &summary.reports, &mut summary.artifacts)?;
            let l = config.geometry.boundary_vertices;
            summary.artifacts.extend(export_plot_data(&config.paths.out.join("plot"), &tube, l, &series)?);
        }
        Mode::Study => {
            let (tube, truth) = match &config.paths.input_tube {
                Some(input) => (read_tube(input)?.0, config.melting_schedule()?),
                None => forward(config, &mut summary)?,
            };
            let mut series = vec![PlotSeries {
                label: "true".into(),
                schedule: truth.clone(),
            }];
            for &delta in &config.study.deltas {
                for s in 0..config.study.seeds {
                    let seed = config.noise.seed + s as u64;
                    let noisy = add_noise(&tube, delta, seed)?;
                    let rec = reconstruct_schedule(&noisy, &config.inverse_params()?)?;
                    let report = report(&rec.schedule, &truth, delta, seed, config.study.until)?;
                    log::info!(
                        "delta {delta}, seed {seed}: relative L2 error of u_m {:.3e}",
                        report.errors.relative_l2_value
                    );
                    summary.reports.push(report);
                    if s == 0 {
                        series.push(PlotSeries {
                            label: format!("delta_{delta}"),
                            schedule: rec.schedule,
                        });
                    }
                }
            }
            write_report(config, &summary.reports, &mut summary.artifacts)?;
            let l = config.geometry.boundary_vertices;
            summary.artifacts.extend(export_plot_data(&config.paths.out.join("plot"), &tube, l, &series)?);
        }
    }
    Ok(summary)
}

fn noise_header(delta: f64, seed: u64) -> TubeNoise {
    TubeNoise { delta, seed }
}

/// Runs the forward problem and writes the tube and snapshots; returns the
/// tube and the prescribed schedule.
fn forward(config: &RunConfig, summary: &mut RunSummary) -> Result<(SpaceTimeTube, MeltingSchedule)> {
    let params = config.forward_params()?;
    let run = simulate_forward(&params)?;
    let path = config.output_tube("tube.csv");
    write_tube(&path, &run.tube, None)?;
    summary.artifacts.push(path);
    if let Some(dir) = &config.paths.snapshots {
        summary.artifacts.extend(write_snapshots(dir, &run.fields)?);
    }
    Ok((run.tube, params.schedule))
}

fn invert(config: &RunConfig, observed: &ObservedTube, summary: &mut RunSummary) -> Result<MeltingSchedule> {
    let rec = reconstruct_schedule(observed, &config.inverse_params()?)?;
    let path = config.output_schedule();
    write_schedule(&path, &rec.schedule)?;
    summary.artifacts.push(path);
    let path = config.paths.out.join("residuals.csv");
    write_residuals(&path, &rec.schedule, &rec.residuals)?;
    summary.artifacts.push(path);
    Ok(rec.schedule)
}

fn report(
    schedule: &MeltingSchedule,
    truth: &MeltingSchedule,
    delta: f64,
    seed: u64,
    until: Option<f64>,
) -> Result<RoundtripReport> {
    Ok(RoundtripReport {
        delta,
        seed,
        errors: compare_schedules(schedule, truth, until)?,
        rate_variance: sample_variance(schedule.slopes()),
    })
}

fn write_report(config: &RunConfig, reports: &[RoundtripReport], artifacts: &mut Vec<PathBuf>) -> Result<()> {
    let mut text = format!("{REPORT_HEADER}\n");
    for r in reports {
        let _ = writeln!(text, "{}", r.line());
    }
    let path = config.paths.out.join("report.csv");
    atomic_write(&path, &text)?;
    artifacts.push(path);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::BoundarySpec;

    fn small(dir: &std::path::Path) -> RunConfig {
        let mut c = RunConfig::default();
        c.geometry.order = 3;
        c.geometry.boundary_vertices = 32;
        c.geometry.rings = 4;
        c.geometry.initial = BoundarySpec::Random {
            amplitude: 0.1,
            seed: 1,
        };
        c.time.final_time = 0.5;
        c.paths.out = dir.to_path_buf();
        c
    }

    #[test]
    fn roundtrip_is_exact_at_equal_discretization() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small(dir.path());
        c.mode = Mode::Roundtrip;
        let summary = run(&c).unwrap();
        let e = summary.reports[0].errors;
        assert!(e.relative_l2_rate < 1e-6, "{e:?}");
        assert!(e.relative_l2_value < 1e-6, "{e:?}");
        assert!(dir.path().join("report.csv").exists());
        assert!(dir.path().join("plot").join("series_true.csv").exists());
    }

    #[test]
    fn perturb_with_zero_noise_keeps_the_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small(dir.path());
        run(&c).unwrap();
        c.mode = Mode::Perturb;
        c.paths.input_tube = Some(dir.path().join("tube.csv"));
        run(&c).unwrap();
        let (a, _) = read_tube(&dir.path().join("tube.csv")).unwrap();
        let (b, noise) = read_tube(&dir.path().join("tube_noisy.csv")).unwrap();
        assert_eq!(a, b);
        assert_eq!(noise, Some(TubeNoise { delta: 0.0, seed: 0 }));
    }
}
