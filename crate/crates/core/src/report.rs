//! Experiments behind the command-line subcommands. Each command builds its
//! data in memory and renders it as CSV or an aligned text table.

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::exact::{logistic_exact, logistic_singularity, spiral_exact, spiral_singularity, Singularity};
use crate::integrator::{integrate, sample, IntegrationConfig, Trajectory, TrajectoryStatus};
use crate::model::{preset_ivp, InitialValueProblem, ModelPreset};
use crate::modelfile::{linspace, ModelFile};
use crate::phase::{default_search_box, fixed_points, Classification, CriticalPoint, DEFAULT_GRID};
use crate::series::{radius_estimate, series_eval, taylor_solve, RadiusMethod};

/// Significant digits of every floating value written to CSV.
pub const CSV_DIGITS: usize = 12;
/// Significant digits of the printed table1 log-errors.
pub const TABLE1_DIGITS: usize = 3;

/// Failure of a command, split by exit code.
#[derive(Debug, Error)]
pub enum CommandError {
    /// Bad input: unreadable or malformed model file, invalid options.
    #[error("{0}")]
    Input(String),
    /// The numerical pipeline could not produce the requested data.
    #[error("{0}")]
    Numerical(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Input(_) => 2,
            CommandError::Numerical(_) => 3,
        }
    }
}

impl From<crate::Error> for CommandError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Singularity(_) | crate::Error::Range { .. } => CommandError::Numerical(e.to_string()),
            _ => CommandError::Input(e.to_string()),
        }
    }
}

pub type CommandResult<T> = std::result::Result<T, CommandError>;

/// Rounds `v` to `digits` significant figures and prints the result in its
/// shortest form, switching to exponent notation for very large or small
/// magnitudes.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, v).parse().expect("formatted float parses");
    let exp = rounded.abs().log10().floor();
    if (-5.0..15.0).contains(&exp) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn csv_num(v: f64) -> String {
    format_sig(v, CSV_DIGITS)
}

/// `log10 |(exact - approx) / exact|`.
pub fn log_error(exact: f64, approx: f64) -> f64 {
    ((exact - approx) / exact).abs().log10()
}

/// Rectangular CSV with a header row, plus optional `#` comment lines after
/// the data.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl CsvTable {
    fn new(header: Vec<String>) -> Self {
        CsvTable {
            header,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        let mut out = String::from_utf8(w.into_inner().expect("flush to vec")).expect("utf-8 csv");
        for line in &self.footer {
            out.push_str("# ");
            out.push_str(line);
            out.push_str("\r\n");
        }
        out
    }
}

fn require_completed(traj: &Trajectory, t_end: f64) -> CommandResult<()> {
    match traj.status() {
        TrajectoryStatus::Completed => Ok(()),
        TrajectoryStatus::BlewUp => Err(CommandError::Numerical(format!(
            "numerical solution blew up at t = {} before t_end = {t_end}",
            traj.last_time()
        ))),
        TrajectoryStatus::StiffAbort => Err(CommandError::Numerical(format!(
            "step budget exhausted at t = {} before t_end = {t_end}",
            traj.last_time()
        ))),
    }
}

fn check_grid(t_end: f64, samples: usize) -> CommandResult<()> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(CommandError::Input(format!("--t-end must be positive, got {t_end}")));
    }
    if samples < 2 {
        return Err(CommandError::Input(format!("--samples must be at least 2, got {samples}")));
    }
    Ok(())
}

// ---------------------------------------------------------------- table1

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub t: f64,
    pub exact: f64,
    pub series: f64,
    pub log_error: f64,
}

pub const TABLE1_ORDER: usize = 4;

/// Fourth-order series of the logistic model (b = 1, a = -3, x0 = 1)
/// against its closed form at t = 0.1, 0.2, ..., 1.0.
pub fn table1() -> Vec<Table1Row> {
    let (b, a, x0) = (1.0, -3.0, 1.0);
    let ivp = preset_ivp(ModelPreset::Logistic { b, a }, &[x0]).expect("1-D preset");
    let sol = taylor_solve(&ivp, TABLE1_ORDER).expect("order >= 1");
    (1..=10)
        .map(|k| {
            let t = k as f64 / 10.0;
            let exact = logistic_exact(b, a, x0, t).expect("no real pole for t > 0");
            let series = series_eval(sol.variable(0), t);
            Table1Row {
                t,
                exact,
                series,
                log_error: log_error(exact, series),
            }
        })
        .collect()
}

pub fn render_table1(rows: &[Table1Row], full_precision: bool) -> String {
    let mut out = String::new();
    let digits = if full_precision { CSV_DIGITS } else { TABLE1_DIGITS };
    if full_precision {
        writeln!(out, "{:>4}  {:>18}  {:>18}  {:>18}", "t", "log10_rel_error", "exact", "series4").unwrap();
    } else {
        writeln!(out, "{:>4}  {:>15}", "t", "log10_rel_error").unwrap();
    }
    for r in rows {
        if full_precision {
            writeln!(
                out,
                "{:>4}  {:>18}  {:>18}  {:>18}",
                r.t,
                format_sig(r.log_error, digits),
                format_sig(r.exact, digits),
                format_sig(r.series, digits)
            )
            .unwrap();
        } else {
            writeln!(out, "{:>4}  {:>15}", r.t, format_sig(r.log_error, digits)).unwrap();
        }
    }
    out
}

// ---------------------------------------------------------------- phase2d

pub const PHASE2D_X0: [f64; 2] = [4.0, 10.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Phase2d {
    pub orders: Vec<usize>,
    pub times: Vec<f64>,
    pub numerical: Vec<Vec<f64>>,
    /// `series[o][k]` is the order `orders[o]` partial sum at `times[k]`.
    pub series: Vec<Vec<Vec<f64>>>,
    /// First sample where the highest order is farther from the numerical
    /// solution than the lowest order.
    pub first_crossing: Option<usize>,
    pub fixed_points: Vec<CriticalPoint>,
}

/// Two-species model from (4, 10): numerical trajectory against partial
/// sums of the requested orders, with the phase-plane fixed points.
pub fn phase2d(orders: &[usize], t_end: f64, samples: usize, cfg: &IntegrationConfig) -> CommandResult<Phase2d> {
    if orders.is_empty() {
        return Err(CommandError::Input("at least one --order is required".into()));
    }
    if orders.contains(&0) {
        return Err(CommandError::Input("series orders must be at least 1".into()));
    }
    check_grid(t_end, samples)?;
    let ivp = preset_ivp(ModelPreset::DEFAULT_TWO_SPECIES, &PHASE2D_X0)?;
    let traj = integrate(&ivp, t_end, cfg)?;
    require_completed(&traj, t_end)?;
    let times = linspace(t_end, samples);
    let numerical = sample(&traj, &times)?;

    let series = orders
        .iter()
        .map(|&k| {
            let sol = taylor_solve(&ivp, k)?;
            Ok(times.iter().map(|&t| sol.eval(t)).collect())
        })
        .collect::<crate::Result<Vec<Vec<Vec<f64>>>>>()?;

    let first_crossing = if orders.len() >= 2 {
        let lo = (0..orders.len()).min_by_key(|&i| orders[i]).expect("non-empty");
        let hi = (0..orders.len()).max_by_key(|&i| orders[i]).expect("non-empty");
        (0..times.len()).find(|&k| distance(&series[hi][k], &numerical[k]) > distance(&series[lo][k], &numerical[k]))
    } else {
        None
    };

    let fixed = fixed_points(&ivp.field, &default_search_box(&ivp.field), DEFAULT_GRID)?;
    Ok(Phase2d {
        orders: orders.to_vec(),
        times,
        numerical,
        series,
        first_crossing,
        fixed_points: fixed,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Phase2d {
    pub fn to_csv(&self) -> CsvTable {
        let mut header = vec!["t".to_string(), "x_num".into(), "y_num".into()];
        for k in &self.orders {
            header.push(format!("x_s{k}"));
            header.push(format!("y_s{k}"));
        }
        header.push("high_order_worse".into());
        let mut table = CsvTable::new(header);
        for (k, &t) in self.times.iter().enumerate() {
            let mut row = vec![csv_num(t), csv_num(self.numerical[k][0]), csv_num(self.numerical[k][1])];
            for s in &self.series {
                row.push(csv_num(s[k][0]));
                row.push(csv_num(s[k][1]));
            }
            row.push(if self.first_crossing == Some(k) { "1" } else { "0" }.into());
            table.rows.push(row);
        }
        table.footer.push("fixed_points: x,y,eigenvalue_1,eigenvalue_2,class".into());
        for p in &self.fixed_points {
            table.footer.push(format!(
                "fixed_point,{},{},{},{},{}",
                csv_num(p.location[0]),
                csv_num(p.location[1]),
                format_complex(p.eigenvalues[0], CSV_DIGITS),
                format_complex(p.eigenvalues[1], CSV_DIGITS),
                p.classification
            ));
        }
        table
    }
}

// ---------------------------------------------------------------- spiral

pub const SPIRAL_X0: [f64; 2] = [2.0, 2.0];
pub const SPIRAL_A: f64 = -0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralRun {
    pub order: usize,
    pub times: Vec<f64>,
    pub numerical: Vec<Vec<f64>>,
    pub exact: Vec<(f64, f64)>,
    pub series: Vec<Vec<f64>>,
}

/// Spiral model (a = -0.5) from (2, 2): numerical, closed-form and
/// series solutions on a uniform grid.
pub fn spiral(order: usize, t_end: f64, samples: usize, cfg: &IntegrationConfig) -> CommandResult<SpiralRun> {
    if order < 1 {
        return Err(CommandError::Input("series order must be at least 1".into()));
    }
    check_grid(t_end, samples)?;
    let ivp = preset_ivp(ModelPreset::Spiral { a: SPIRAL_A }, &SPIRAL_X0)?;
    let traj = integrate(&ivp, t_end, cfg)?;
    require_completed(&traj, t_end)?;
    let times = linspace(t_end, samples);
    let numerical = sample(&traj, &times)?;
    let exact = times
        .iter()
        .map(|&t| spiral_exact(SPIRAL_A, SPIRAL_X0[0], SPIRAL_X0[1], t))
        .collect::<crate::Result<Vec<_>>>()?;
    let sol = taylor_solve(&ivp, order)?;
    let series = times.iter().map(|&t| sol.eval(t)).collect();
    Ok(SpiralRun {
        order,
        times,
        numerical,
        exact,
        series,
    })
}

impl SpiralRun {
    pub fn to_csv(&self) -> CsvTable {
        let header = ["t", "x_num", "y_num", "x_exact", "y_exact", "x_series", "y_series"];
        let mut table = CsvTable::new(header.iter().map(|s| s.to_string()).collect());
        for k in 0..self.times.len() {
            table.rows.push(vec![
                csv_num(self.times[k]),
                csv_num(self.numerical[k][0]),
                csv_num(self.numerical[k][1]),
                csv_num(self.exact[k].0),
                csv_num(self.exact[k].1),
                csv_num(self.series[k][0]),
                csv_num(self.series[k][1]),
            ]);
        }
        table
    }
}

// ---------------------------------------------------------------- radius

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusRow {
    pub variable: String,
    pub method: RadiusMethod,
    pub estimate: f64,
    /// `|estimate - analytic| / analytic`, when a closed form exists.
    pub disagreement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusReport {
    pub order: usize,
    pub singularity: Option<Singularity>,
    pub rows: Vec<RadiusRow>,
}

/// Analytic nearest singularity for the exactly solvable presets.
pub fn analytic_singularity(ivp: &InitialValueProblem, preset: Option<ModelPreset>) -> Option<Singularity> {
    match preset? {
        ModelPreset::Logistic { b, a } => logistic_singularity(b, a, ivp.x0[0]).ok(),
        ModelPreset::Spiral { a } => spiral_singularity(a, ivp.x0[0], ivp.x0[1]).ok(),
        ModelPreset::TwoSpecies { .. } => None,
    }
}

pub fn radius(model: &ModelFile, order: usize) -> CommandResult<RadiusReport> {
    let ivp = model.ivp()?;
    let sol = taylor_solve(&ivp, order)?;
    let singularity = analytic_singularity(&ivp, model.preset());
    let names = variable_names(ivp.dim());
    let mut rows = Vec::new();
    for (i, name) in names.iter().enumerate() {
        for method in [RadiusMethod::Ratio, RadiusMethod::Root] {
            let est = radius_estimate(sol.variable(i), method)?;
            rows.push(RadiusRow {
                variable: name.clone(),
                method,
                estimate: est.value,
                disagreement: singularity
                    .filter(|s| s.modulus.is_finite())
                    .map(|s| (est.value - s.modulus).abs() / s.modulus),
            });
        }
    }
    Ok(RadiusReport { order, singularity, rows })
}

impl RadiusReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "series order: {}", self.order).unwrap();
        match &self.singularity {
            Some(s) => writeln!(
                out,
                "analytic singularity: {} at t = {} (modulus {})",
                s.kind,
                format_complex(s.location, 10),
                format_sig(s.modulus, 10)
            )
            .unwrap(),
            None => writeln!(out, "analytic singularity: none known").unwrap(),
        }
        writeln!(out, "{:<8}  {:<6}  {:>14}  {:>14}  {:>14}", "variable", "method", "estimate", "analytic", "rel_diff").unwrap();
        let analytic = self
            .singularity
            .map(|s| format_sig(s.modulus, 7))
            .unwrap_or_else(|| "-".into());
        for r in &self.rows {
            writeln!(
                out,
                "{:<8}  {:<6}  {:>14}  {:>14}  {:>14}",
                r.variable,
                r.method.to_string(),
                format_sig(r.estimate, 7),
                analytic,
                r.disagreement.map(|d| format_sig(d, 3)).unwrap_or_else(|| "-".into())
            )
            .unwrap();
        }
        out
    }
}

// ---------------------------------------------------------------- solve

pub fn variable_names(n: usize) -> Vec<String> {
    match n {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

/// Numerical and series solutions of a model file on its time grid.
pub fn solve(model: &ModelFile) -> CommandResult<CsvTable> {
    let ivp = model.ivp()?;
    let cfg = model.integration_config();
    let traj = integrate(&ivp, model.grid.end, &cfg)?;
    require_completed(&traj, model.grid.end)?;
    let times = model.grid.times();
    let numerical = sample(&traj, &times)?;
    let sol = taylor_solve(&ivp, model.order)?;

    let names = variable_names(ivp.dim());
    let mut header = vec!["t".to_string()];
    header.extend(names.iter().map(|n| format!("{n}_num")));
    header.extend(names.iter().map(|n| format!("{n}_series")));
    let mut table = CsvTable::new(header);
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![csv_num(t)];
        row.extend(numerical[k].iter().map(|&v| csv_num(v)));
        row.extend(sol.eval(t).into_iter().map(csv_num));
        table.rows.push(row);
    }
    Ok(table)
}

// ---------------------------------------------------------------- fixed points

pub fn fixed_point_table(model: &ModelFile) -> CommandResult<Vec<CriticalPoint>> {
    let field = model.field()?;
    if field.dim() > 2 {
        return Err(CommandError::Input(format!(
            "fixed-point analysis supports at most 2 dimensions, model has {}",
            field.dim()
        )));
    }
    Ok(fixed_points(&field, &default_search_box(&field), DEFAULT_GRID)?)
}

pub fn format_complex(z: Complex64, digits: usize) -> String {
    if z.im == 0.0 {
        format_sig(z.re, digits)
    } else if z.re == 0.0 {
        format!("{}i", format_sig(z.im, digits))
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", format_sig(z.re, digits), format_sig(z.im.abs(), digits))
    }
}

pub fn render_fixed_points(points: &[CriticalPoint]) -> String {
    let mut out = String::new();
    let dim = points.first().map(|p| p.location.len()).unwrap_or(1);
    let names = variable_names(dim);
    let mut header: Vec<String> = names.clone();
    header.extend((1..=dim).map(|i| format!("eigenvalue_{i}")));
    header.push("class".into());
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut r: Vec<String> = p.location.iter().map(|&v| format_sig(clean_zero(v), 6)).collect();
            r.extend(p.eigenvalues.iter().map(|&z| format_complex(z, 6)));
            r.push(p.classification.to_string());
            r
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(&header)).unwrap();
    for r in &rows {
        writeln!(out, "{}", line(r)).unwrap();
    }
    if points.is_empty() {
        writeln!(out, "(no fixed points found in the search box)").unwrap();
    }
    if points.iter().any(|p| p.classification == Classification::CenterLinear) {
        writeln!(
            out,
            "note: center-linear points have purely imaginary eigenvalues; the linearization does not decide whether nearby orbits spiral in or out"
        )
        .unwrap();
    }
    out
}

/// Newton roots of exact zeros can land on tiny negative values.
fn clean_zero(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_figs() {
        assert_eq!(format_sig(-3.1415, 3), "-3.14");
        assert_eq!(format_sig(0.27346, 3), "0.273");
        assert_eq!(format_sig(1.6949, 3), "1.69");
        assert_eq!(format_sig(-0.79849, 3), "-0.798");
        assert_eq!(format_sig(0.1, 12), "0.1");
        assert_eq!(format_sig(1.5e-20, 12), "1.5e-20");
        assert_eq!(format_sig(2.0e20, 12), "2e20");
        assert_eq!(format_sig(0.0, 12), "0");
        let v = 0.8401065778530576;
        assert_eq!(format_sig(v, 12), "0.840106577853");
    }

    #[test]
    fn table1_values() {
        let rows = table1();
        let want = [-3.14, -1.66, -0.798, -0.193, 0.273, 0.651, 0.968, 1.24, 1.48, 1.69];
        for (r, w) in rows.iter().zip(want) {
            let printed: f64 = format_sig(r.log_error, 3).parse().unwrap();
            assert!((printed - w).abs() <= 0.01, "t={}: {printed} vs {w}", r.t);
        }
    }

    #[test]
    fn table1_text() {
        let text = render_table1(&table1(), false);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 11);
        assert!(lines[1].ends_with("-3.14"));
        assert!(lines[10].ends_with("1.69"));
        let full = render_table1(&table1(), true);
        assert!(full.contains("0.840106577853"));
    }

    #[test]
    fn complex_format() {
        assert_eq!(format_complex(Complex64::new(0.0, 1.0), 6), "1i");
        assert_eq!(format_complex(Complex64::new(-0.5, -2.0), 6), "-0.5-2i");
        assert_eq!(format_complex(Complex64::new(0.1, 0.0), 6), "0.1");
    }

    #[test]
    fn csv_quoting() {
        let mut t = CsvTable::new(vec!["a".into(), "b,c".into()]);
        t.rows.push(vec!["1".into(), "say \"hi\"".into()]);
        assert_eq!(t.render(), "a,\"b,c\"\r\n1,\"say \"\"hi\"\"\"\r\n");
    }

    #[test]
    fn phase2d_initial_row_and_crossing() {
        let run = phase2d(&[4, 10], 100.0, 21, &IntegrationConfig::default()).unwrap();
        assert_eq!(run.numerical[0], vec![4.0, 10.0]);
        for s in &run.series {
            assert_eq!(s[0], vec![4.0, 10.0]);
        }
        let k = run.first_crossing.expect("order 10 overtakes order 4");
        assert!(run.times[k] > 10.0);
        let csv = run.to_csv().render();
        let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "t,x_num,y_num,x_s4,y_s4,x_s10,y_s10,high_order_worse");
        assert_eq!(data[1], "0,4,10,4,10,4,10,0");
        assert_eq!(csv.lines().filter(|l| l.starts_with("# fixed_point,")).count(), 4);
        assert_eq!(data.iter().filter(|l| l.ends_with(",1")).count(), 1);
    }

    #[test]
    fn phase2d_input_errors() {
        let cfg = IntegrationConfig::default();
        assert_eq!(phase2d(&[], 10.0, 5, &cfg).unwrap_err().exit_code(), 2);
        assert_eq!(phase2d(&[4], -1.0, 5, &cfg).unwrap_err().exit_code(), 2);
        assert_eq!(phase2d(&[4], 10.0, 1, &cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn spiral_run() {
        let run = spiral(5, 20.0, 201, &IntegrationConfig::default()).unwrap();
        assert_eq!(run.numerical[0], vec![2.0, 2.0]);
        assert_eq!(run.exact[0], (2.0, 2.0));
        assert_eq!(run.series[0], vec![2.0, 2.0]);
        for k in 0..run.times.len() {
            let (x, y) = run.exact[k];
            let rel = (run.numerical[k][0] - x).hypot(run.numerical[k][1] - y) / x.hypot(y);
            assert!(rel < 1e-6, "t={}: {rel}", run.times[k]);
        }
        let k = run.times.iter().position(|&t| t >= 0.5).unwrap();
        let (x, y) = run.exact[k];
        assert!((run.series[k][0] - x).hypot(run.series[k][1] - y) / x.hypot(y) > 1.0);
        assert!(run.to_csv().render().starts_with("t,x_num,y_num,x_exact,y_exact,x_series,y_series\r\n0,2,2,2,2,2,2\r\n"));
    }

    #[test]
    fn radius_reports() {
        let m = ModelFile::parse(r#"{"model": {"kind": "logistic", "b": 1, "a": -3}, "x0": [1]}"#, "m").unwrap();
        let r = radius(&m, 30).unwrap();
        assert!((r.singularity.unwrap().modulus - 0.405465).abs() < 1e-6);
        assert!(r.rows.iter().all(|row| row.disagreement.unwrap() < 0.1));
        assert!(r.render().contains("0.4054651"));

        let m = ModelFile::parse(r#"{"model": {"kind": "logistic", "b": 1, "a": -3}, "x0": [0.1]}"#, "m").unwrap();
        let r = radius(&m, 30).unwrap();
        assert!(r.render().contains("3.253847"));

        let m = ModelFile::parse(r#"{"model": {"kind": "spiral", "a": -0.5}, "x0": [2, 2]}"#, "m").unwrap();
        let r = radius(&m, 30).unwrap();
        assert!((r.singularity.unwrap().modulus - 0.125).abs() < 1e-15);
        assert_eq!(r.rows.len(), 4);

        assert_eq!(radius(&m, 5).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn fixed_point_rendering() {
        let m = ModelFile::parse(r#"{"model": {"kind": "logistic", "b": 1, "a": -3}, "x0": [1]}"#, "m").unwrap();
        let text = render_fixed_points(&fixed_point_table(&m).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0 ") && lines[1].ends_with("unstable-node"));
        assert!(lines[2].starts_with("0.333333") && lines[2].ends_with("stable-node"));

        let m = ModelFile::parse(r#"{"model": {"kind": "spiral", "a": -0.5}, "x0": [2, 2]}"#, "m").unwrap();
        let text = render_fixed_points(&fixed_point_table(&m).unwrap());
        assert!(text.contains("center-linear"));
        assert!(text.contains("note:"));
    }
}
