//! Command-line front end.
//!
//! Map commands translate their flags into a [`RunFile`] and execute it, so
//! every sidecar carries a run description that reproduces its outputs
//! through `structlight run <sidecar.json>`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

pub mod output;
pub mod runfile;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use structlight::beam::{field_components, sample_field, Backend, DerivativeOrder, FieldSample};
use structlight::coupling::{Convention, Multipole, StrengthFunctional};
use structlight::figures::{reproduce, FigureSettings};
use structlight::motion::{
    sideband_from_sample, Branch, SidebandRequest, TrapMode, ATOMIC_MASS_UNIT,
};
use structlight::scan::{run_scans, Component, Grid, ScanError};
use structlight::special::HalfInt;

use output::{read_csv, sidecar, write_atomic, write_map};
use runfile::{
    BeamEntry, GeometrySection, GridSection, ObservableEntry, RunFile, TransitionSection,
    TrapSection,
};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "structlight",
    version,
    about = "Structured-light fields and relative E1/E2 transition strengths on focal-plane grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maps of |Ez|, |E_sigma=+1|, |E_sigma=-1| in the focal plane.
    FieldMap(FieldMapArgs),
    /// Maps of |mu| for each requested dm.
    TransitionMap(TransitionMapArgs),
    /// Carrier and X/Y/Z sideband maps with the trap centred on every node.
    SidebandMap(SidebandMapArgs),
    /// Field, gradients, strengths and sidebands at one position, as JSON.
    Point(PointArgs),
    /// Difference statistics of two CSV maps.
    Compare(CompareArgs),
    /// Convert a CSV map to a gnuplot nonuniform matrix.
    Matrix(MatrixArgs),
    /// Execute a run file (TOML or JSON, or a JSON sidecar written by this tool).
    Run(RunArgs),
    /// Write every panel of the four figure sets.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug, Clone)]
struct BeamArgs {
    /// gaussian | lg:l,p | hg:m,n | radial | azimuthal
    #[arg(long)]
    beam: String,
    /// Polarization index -1, 0 or +1 (ignored by radial and azimuthal beams).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    sigma: i64,
    #[arg(long = "waist-um", default_value_t = 1.0)]
    waist_um: f64,
    #[arg(long = "wavelength-um", default_value_t = 0.729)]
    wavelength_um: f64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Beam name used in output file names.
    #[arg(long)]
    name: Option<String>,
}

impl BeamArgs {
    fn entry(&self) -> BeamEntry {
        BeamEntry {
            name: self.name.clone(),
            beam: self.beam.clone(),
            sigma: self.sigma,
            waist_um: self.waist_um,
            wavelength_um: self.wavelength_um,
            amplitude: self.amplitude,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long, default_value_t = 256)]
    nx: usize,
    /// Defaults to --nx.
    #[arg(long)]
    ny: Option<usize>,
    /// Half-width of the square scan window; defaults to twice the waist.
    #[arg(long = "extent-um", allow_hyphen_values = true)]
    extent_um: Option<f64>,
    #[arg(long = "z-um", default_value_t = 0.0, allow_hyphen_values = true)]
    z_um: f64,
}

impl GridArgs {
    fn section(&self, waist_um: f64) -> GridSection {
        let h = self.extent_um.unwrap_or(2.0 * waist_um);
        GridSection {
            nx: self.nx,
            ny: self.ny.unwrap_or(self.nx),
            x_range_um: [-h, h],
            y_range_um: [-h, h],
            z_um: self.z_um,
        }
    }
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    match s.to_ascii_lowercase().as_str() {
        "auto" => Ok(Backend::Auto),
        "analytic" => Ok(Backend::Analytic),
        "fd" | "finite-difference" => Ok(Backend::FiniteDifference),
        other => Err(format!(
            "unknown backend '{other}' (expected auto, analytic or fd)"
        )),
    }
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    match s.to_ascii_lowercase().as_str() {
        "covariant" => Ok(Convention::Covariant),
        "literal" => Ok(Convention::Literal),
        other => Err(format!(
            "unknown convention '{other}' (expected covariant or literal)"
        )),
    }
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    match s.to_ascii_lowercase().as_str() {
        "bsb" | "blue" => Ok(Branch::Bsb),
        "rsb" | "red" => Ok(Branch::Rsb),
        "carrier" => Ok(Branch::Carrier),
        other => Err(format!(
            "unknown branch '{other}' (expected bsb, rsb or carrier)"
        )),
    }
}

fn parse_axis(s: &str) -> Result<[f64; 3], String> {
    match s.to_ascii_lowercase().as_str() {
        "x" => return Ok([1.0, 0.0, 0.0]),
        "y" => return Ok([0.0, 1.0, 0.0]),
        "z" => return Ok([0.0, 0.0, 1.0]),
        _ => {}
    }
    let v: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("axis must be x, y, z or three comma-separated numbers, got '{s}'"))?;
    let [a, b, c] = v[..] else {
        return Err(format!("axis needs three components, got {}", v.len()));
    };
    let n = (a * a + b * b + c * c).sqrt();
    if !(n > 0.0) {
        return Err("axis must be non-zero".into());
    }
    Ok([a / n, b / n, c / n])
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// auto | analytic | fd
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    backend: Backend,
    /// Also write the raw complex values as <stem>_re.csv and <stem>_im.csv.
    #[arg(long)]
    keep_complex: bool,
}

#[derive(Args, Debug, Clone)]
struct TransitionArgs {
    /// e1 | e2-dj1 | e2-dj2
    #[arg(long, default_value = "e2-dj2")]
    multipole: Multipole,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    j1: HalfInt,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    m1: HalfInt,
    #[arg(long, default_value = "5/2", allow_hyphen_values = true)]
    j2: HalfInt,
    /// Tilt of the quantization axis relative to the beam axis.
    #[arg(long = "theta-deg", default_value_t = 0.0, allow_hyphen_values = true)]
    theta_deg: f64,
    /// Rotation axis: x, y, z or "ax,ay,az".
    #[arg(long, default_value = "y", value_parser = parse_axis, allow_hyphen_values = true)]
    axis: [f64; 3],
    /// covariant | literal coefficient tables.
    #[arg(long, default_value = "covariant", value_parser = parse_convention)]
    convention: Convention,
}

impl TransitionArgs {
    fn section(&self) -> TransitionSection {
        TransitionSection {
            j1: self.j1,
            m1: self.m1,
            j2: self.j2,
            multipole: self.multipole,
        }
    }

    fn geometry(&self) -> GeometrySection {
        GeometrySection {
            theta_deg: self.theta_deg,
            axis: self.axis,
            convention: self.convention,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct TrapArgs {
    /// Atomic mass in unified atomic mass units.
    #[arg(long = "mass-u", default_value_t = 40.0)]
    mass_u: f64,
    /// Trap frequency omega/2pi in MHz: one value for all modes or "fx,fy,fz".
    #[arg(long = "trap-mhz", default_value = "1", value_delimiter = ',')]
    trap_mhz: Vec<f64>,
}

impl TrapArgs {
    fn section(&self) -> Result<TrapSection, CliError> {
        let frequencies_mhz = match self.trap_mhz[..] {
            [f] => [f; 3],
            [x, y, z] => [x, y, z],
            _ => {
                return Err(CliError::Config(
                    "--trap-mhz takes one or three values".into(),
                ))
            }
        };
        Ok(TrapSection {
            mass_u: self.mass_u,
            frequencies_mhz,
            ..TrapSection::default()
        })
    }
}

#[derive(Args, Debug)]
struct FieldMapArgs {
    #[command(flatten)]
    beam: BeamArgs,
    /// Ez | sigma+ | sigma- (repeatable or comma separated); all three by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    component: Vec<Component>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct TransitionMapArgs {
    #[command(flatten)]
    beam: BeamArgs,
    #[command(flatten)]
    transition: TransitionArgs,
    /// Changes of m to map (comma separated); every allowed value by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    dm: Vec<i32>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SidebandMapArgs {
    #[command(flatten)]
    beam: BeamArgs,
    #[command(flatten)]
    transition: TransitionArgs,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    dm: i32,
    #[command(flatten)]
    trap: TrapArgs,
    /// bsb | rsb
    #[arg(long, default_value = "bsb", value_parser = parse_branch)]
    branch: Branch,
    /// Initial motional quantum number.
    #[arg(long, default_value_t = 0)]
    n: u32,
    /// Keep sidebands in absolute units instead of dividing by the Lamb-Dicke parameter.
    #[arg(long)]
    no_rescale: bool,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[command(flatten)]
    beam: BeamArgs,
    #[command(flatten)]
    transition: TransitionArgs,
    /// Changes of m to report; every dm within the tensor rank by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    dm: Vec<i32>,
    #[command(flatten)]
    trap: TrapArgs,
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long = "x-um", default_value_t = 0.0, allow_hyphen_values = true)]
    x_um: f64,
    #[arg(long = "y-um", default_value_t = 0.0, allow_hyphen_values = true)]
    y_um: f64,
    #[arg(long = "z-um", default_value_t = 0.0, allow_hyphen_values = true)]
    z_um: f64,
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    backend: Backend,
}

#[derive(Args, Debug)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    input: PathBuf,
    /// Defaults to the input with extension .mat.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    file: PathBuf,
    /// Override the output directory of the run file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long, default_value = "figures")]
    out: PathBuf,
    /// Figure sets to write (comma separated, 1-4); all by default.
    #[arg(long, value_delimiter = ',')]
    figures: Vec<u8>,
    #[arg(long, default_value_t = 256)]
    nx: usize,
    #[arg(long = "waist-um", default_value_t = 1.0)]
    waist_um: f64,
    #[arg(long = "wavelength-um", default_value_t = 0.729)]
    wavelength_um: f64,
    #[command(flatten)]
    trap: TrapArgs,
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    backend: Backend,
}

/// Run the CLI and return the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("structlight: {e}");
            e.exit_code()
        }
    }
}

/// Print one line to stdout. A reader that went away (`| head`) is not an error.
fn emit(line: std::fmt::Arguments) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::FieldMap(a) => {
            let components = if a.component.is_empty() {
                Component::ALL.to_vec()
            } else {
                a.component.clone()
            };
            let run = RunFile {
                output_dir: a.output.out.clone(),
                backend: a.output.backend,
                keep_complex: a.output.keep_complex,
                grid: a.grid.section(a.beam.waist_um),
                beams: vec![a.beam.entry()],
                transition: TransitionSection::default(),
                geometry: GeometrySection::default(),
                trap: TrapSection::default(),
                observables: components
                    .into_iter()
                    .map(|component| ObservableEntry::Field { component })
                    .collect(),
            };
            execute_run(&run)
        }
        Command::TransitionMap(a) => {
            let transition = a.transition.section();
            let dms = if a.dm.is_empty() {
                transition.allowed_dms()
            } else {
                a.dm.clone()
            };
            let run = RunFile {
                output_dir: a.output.out.clone(),
                backend: a.output.backend,
                keep_complex: a.output.keep_complex,
                grid: a.grid.section(a.beam.waist_um),
                beams: vec![a.beam.entry()],
                transition,
                geometry: a.transition.geometry(),
                trap: TrapSection::default(),
                observables: dms
                    .into_iter()
                    .map(|dm| ObservableEntry::Strength {
                        dm,
                        theta_deg: None,
                    })
                    .collect(),
            };
            execute_run(&run)
        }
        Command::SidebandMap(a) => {
            let mut observables = vec![ObservableEntry::Sideband {
                dm: a.dm,
                mode: TrapMode::X,
                branch: Branch::Carrier,
                n: a.n,
                rescale: !a.no_rescale,
                theta_deg: None,
            }];
            for mode in TrapMode::ALL {
                observables.push(ObservableEntry::Sideband {
                    dm: a.dm,
                    mode,
                    branch: a.branch,
                    n: a.n,
                    rescale: !a.no_rescale,
                    theta_deg: None,
                });
            }
            let run = RunFile {
                output_dir: a.output.out.clone(),
                backend: a.output.backend,
                keep_complex: a.output.keep_complex,
                grid: a.grid.section(a.beam.waist_um),
                beams: vec![a.beam.entry()],
                transition: a.transition.section(),
                geometry: a.transition.geometry(),
                trap: a.trap.section()?,
                observables,
            };
            execute_run(&run)
        }
        Command::Point(a) => cmd_point(&a),
        Command::Compare(a) => cmd_compare(&a.a, &a.b),
        Command::Matrix(a) => {
            let map = read_csv(&a.input)?;
            let out = a
                .out
                .clone()
                .unwrap_or_else(|| a.input.with_extension("mat"));
            write_atomic(&out, output::matrix_text(&map).as_bytes())?;
            emit(format_args!("{}", out.display()));
            Ok(())
        }
        Command::Run(a) => {
            let mut run = RunFile::from_path(&a.file)?;
            if let Some(out) = &a.out {
                run.output_dir = out.clone();
            }
            execute_run(&run)
        }
        Command::Reproduce(a) => cmd_reproduce(&a),
    }
}

/// Execute a run file: one batched scan per beam, one CSV and sidecar per
/// (beam, observable). Paths of the written CSV files go to stdout.
pub fn execute_run(run: &RunFile) -> Result<(), CliError> {
    run.validate()?;
    let grid = run.grid.to_grid();
    for entry in &run.beams {
        let beam = entry.build()?;
        let label = entry.label()?;
        let observables = run
            .observables
            .iter()
            .map(|o| o.resolve(run))
            .collect::<Result<Vec<_>, _>>()?;
        let maps = run_scans(&grid, &beam, &observables, run.backend, run.keep_complex)?;
        for (obs, map) in run.observables.iter().zip(&maps) {
            let stem = format!("{label}_{}", obs.label());
            let meta = sidecar(map, json!(entry), Some(run), json!({}));
            let path = write_map(&run.output_dir, &stem, map, &meta)?;
            emit(format_args!("{}", path.display()));
        }
    }
    Ok(())
}

fn cmd_reproduce(a: &ReproduceArgs) -> Result<(), CliError> {
    let waist = a.waist_um * 1e-6;
    let trap = a.trap.section()?;
    let settings = FigureSettings {
        waist_m: waist,
        wavelength_m: a.wavelength_um * 1e-6,
        grid: Grid::square(2.0 * waist, a.nx, 0.0),
        mass_kg: trap.mass_u * ATOMIC_MASS_UNIT,
        trap_angular_frequencies: trap.frequencies_mhz.map(|f| 2.0 * PI * f * 1e6),
        backend: a.backend,
    };
    if let Some(bad) = a.figures.iter().find(|f| !(1..=4).contains(*f)) {
        return Err(CliError::Config(format!(
            "--figures: no figure set {bad} (expected 1-4)"
        )));
    }
    settings.grid.validate()?;
    let start = Instant::now();
    let maps = reproduce(&settings, &a.figures)?;
    for (panel, map) in &maps {
        let extra = json!({"figure": panel.figure, "panel": panel.id, "figure_settings": settings});
        let meta = sidecar(map, json!(panel.beam_label), None, extra);
        write_map(&a.out, &panel.id, map, &meta)?;
    }
    emit(format_args!(
        "wrote {} maps to {} in {:.2} s",
        maps.len(),
        a.out.display(),
        start.elapsed().as_secs_f64()
    ));
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path) -> Result<(), CliError> {
    let (ma, mb) = (read_csv(a)?, read_csv(b)?);
    if ma.xs_um != mb.xs_um || ma.ys_um != mb.ys_um {
        return Err(CliError::Config(format!(
            "grid mismatch: {}x{} vs {}x{} nodes or different coordinates",
            ma.xs_um.len(),
            ma.ys_um.len(),
            mb.xs_um.len(),
            mb.ys_um.len()
        )));
    }
    let d = structlight::scan::compare_values(&ma.values, &mb.values);
    emit(format_args!(
        "{}",
        json!({"max_abs_diff": d.max_abs_diff, "rms_diff": d.rms_diff})
    ));
    Ok(())
}

fn cplx(v: Complex64) -> Value {
    json!({"re": v.re, "im": v.im})
}

fn finite(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

fn cmd_point(a: &PointArgs) -> Result<(), CliError> {
    let entry = a.beam.entry();
    let beam = entry.build()?;
    let transition = a.transition.section();
    let geometry = a.transition.geometry().geometry(None)?;
    let trap = a.trap.section()?.trap()?;
    let point = [a.x_um * 1e-6, a.y_um * 1e-6, a.z_um * 1e-6];
    let sample: FieldSample = sample_field(&beam, point, DerivativeOrder::Second, a.backend)
        .map_err(|e| CliError::Config(e.to_string()))?;
    if !sample.is_finite() {
        return Err(CliError::Numerical(format!(
            "non-finite field sample at {point:?}"
        )));
    }
    let rank = transition.multipole.rank() as i32;
    let dms: Vec<i32> = if a.dm.is_empty() {
        (-rank..=rank).collect()
    } else {
        a.dm.clone()
    };
    let mut strengths = Vec::new();
    for dm in dms {
        let m2 = transition.m2(dm);
        // Quantum numbers that cannot form a transition give exact zeros.
        let Ok(spec) = transition.with_dm(dm) else {
            strengths.push(json!({"dm": dm, "m2": m2, "allowed": false, "mu": cplx(Complex64::new(0.0, 0.0)), "abs": 0.0}));
            continue;
        };
        let f = StrengthFunctional::new(&spec, &geometry, a.transition.convention);
        let mu = f.evaluate(&sample);
        let mut sidebands = serde_json::Map::new();
        for mode in TrapMode::ALL {
            let req = |branch| SidebandRequest {
                mode,
                n: a.n,
                branch,
            };
            let bsb =
                sideband_from_sample(&f, &sample, &trap.with_center(point), &req(Branch::Bsb));
            let rsb =
                sideband_from_sample(&f, &sample, &trap.with_center(point), &req(Branch::Rsb));
            let dmu = f.evaluate_derivative(&sample, trap.axes()[mode.index()]);
            if !(finite(bsb) && finite(rsb) && finite(dmu)) {
                return Err(CliError::Numerical(format!(
                    "non-finite sideband strength for dm = {dm:+}"
                )));
            }
            sidebands.insert(
                format!("{mode:?}"),
                json!({"dmu_per_m": cplx(dmu), "bsb": cplx(bsb), "rsb": cplx(rsb)}),
            );
        }
        if !finite(mu) {
            return Err(CliError::Numerical(format!(
                "non-finite strength for dm = {dm:+}"
            )));
        }
        strengths.push(json!({
            "dm": dm,
            "m2": m2,
            "allowed": !f.is_forbidden(),
            "mu": cplx(mu),
            "abs": mu.norm(),
            "sidebands": sidebands,
        }));
    }
    let comps = field_components(&beam, point);
    let e: Vec<Value> = sample.e.iter().map(|v| cplx(*v)).collect();
    let jac: Vec<Vec<Value>> = sample
        .jacobian
        .iter()
        .map(|r| r.iter().map(|v| cplx(*v)).collect())
        .collect();
    let record = json!({
        "position_um": [a.x_um, a.y_um, a.z_um],
        "beam": entry,
        "backend": a.backend,
        "transition": transition,
        "geometry": {"theta_deg": a.transition.theta_deg, "axis": a.transition.axis, "convention": a.transition.convention},
        "trap": trap,
        "n": a.n,
        "field": {
            "E": e,
            "Ez": cplx(comps.ez),
            "E_sigma+1": cplx(comps.sigma_plus),
            "E_sigma-1": cplx(comps.sigma_minus),
        },
        "jacobian": jac,
        "jacobian_layout": "jacobian[i][j] = d_i E_j",
        "strengths": strengths,
        "tool_version": structlight::scan::TOOL_VERSION,
    });
    emit(format_args!("{record}"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn axis_parsing() {
        assert_eq!(parse_axis("y"), Ok([0.0, 1.0, 0.0]));
        assert_eq!(parse_axis("0,0,2"), Ok([0.0, 0.0, 1.0]));
        assert!(parse_axis("1,0").is_err());
        assert!(parse_axis("0,0,0").is_err());
    }

    #[test]
    fn missing_beam_is_a_usage_error() {
        let err =
            Cli::try_parse_from(["structlight", "field-map", "--component", "Ez"]).unwrap_err();
        assert!(err.use_stderr());
        assert!(err.to_string().contains("--beam"));
    }

    #[test]
    fn negative_values_parse() {
        let cli = Cli::try_parse_from([
            "structlight",
            "field-map",
            "--beam",
            "lg:1,0",
            "--sigma",
            "-1",
            "--component",
            "sigma-",
        ])
        .unwrap();
        let Command::FieldMap(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.beam.sigma, -1);
        assert_eq!(a.component, vec![Component::SigmaMinus]);
    }
}
