//! CSV grids, JSON sidecars and gnuplot matrices. Every file is written to a
//! temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use structlight::scan::{Grid, MapDataset, Observable};

use super::runfile::RunFile;
use super::CliError;

const UM: f64 = 1e-6;

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Config(format!("cannot write {}: {e}", path.display()));
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(io)
}

/// Row-major grid: header `y_um\x_um,<x...>`, then `<y>,<values...>` per row.
pub fn csv_text(grid: &Grid, values: &[f64]) -> String {
    let mut s = String::from("y_um\\x_um");
    for x in grid.xs() {
        let _ = write!(s, ",{}", x / UM);
    }
    s.push('\n');
    for j in 0..grid.ny {
        let _ = write!(s, "{}", grid.y(j) / UM);
        for i in 0..grid.nx {
            let _ = write!(s, ",{}", values[grid.index(i, j)]);
        }
        s.push('\n');
    }
    s
}

/// Values and axes read back from a CSV grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvMap {
    pub xs_um: Vec<f64>,
    pub ys_um: Vec<f64>,
    /// Row-major, `y` outer.
    pub values: Vec<f64>,
}

pub fn read_csv(path: &Path) -> Result<CsvMap, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let bad =
        |line: usize, what: &str| CliError::Config(format!("{}:{line}: {what}", path.display()));
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let mut cells = header.split(',');
    cells.next();
    let xs_um = cells
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad(1, "malformed header"))?;
    let mut ys_um = Vec::new();
    let mut values = Vec::new();
    for (k, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad(k + 1, "non-numeric cell"))?;
        if row.len() != xs_um.len() + 1 {
            return Err(bad(k + 1, "row length does not match header"));
        }
        ys_um.push(row[0]);
        values.extend_from_slice(&row[1..]);
    }
    Ok(CsvMap {
        xs_um,
        ys_um,
        values,
    })
}

/// Gnuplot `nonuniform matrix` layout: `<nx> <x...>` then `<y> <values...>`.
pub fn matrix_text(map: &CsvMap) -> String {
    let nx = map.xs_um.len();
    let mut s = format!("{nx}");
    for x in &map.xs_um {
        let _ = write!(s, " {x}");
    }
    s.push('\n');
    for (j, y) in map.ys_um.iter().enumerate() {
        let _ = write!(s, "{y}");
        for v in &map.values[j * nx..(j + 1) * nx] {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    s
}

fn grid_json(grid: &Grid) -> Value {
    json!({
        "nx": grid.nx,
        "ny": grid.ny,
        "x_range_um": [grid.x_min / UM, grid.x_max / UM],
        "y_range_um": [grid.y_min / UM, grid.y_max / UM],
        "z_um": grid.z / UM,
        "nodes": "cell centres",
        "layout": "row-major, y outer"
    })
}

/// Sidecar describing one map.
pub fn sidecar(map: &MapDataset, beam_entry: Value, run: Option<&RunFile>, extra: Value) -> Value {
    let cfg = &map.config;
    let (transition, geometry, trap) = match &cfg.observable {
        Observable::Field { .. } => (Value::Null, Value::Null, Value::Null),
        Observable::Strength {
            transition,
            geometry,
            convention,
        }
        | Observable::AveragedStrength {
            transition,
            geometry,
            convention,
            ..
        } => (
            json!(transition),
            json!({"theta_deg": geometry.theta().to_degrees(), "axis": geometry.axis(), "convention": convention}),
            Value::Null,
        ),
        Observable::Sideband {
            transition,
            geometry,
            convention,
            trap,
            ..
        } => (
            json!(transition),
            json!({"theta_deg": geometry.theta().to_degrees(), "axis": geometry.axis(), "convention": convention}),
            json!(trap),
        ),
    };
    let mut v = json!({
        "scale_factor": map.scale_factor,
        "grid": grid_json(&cfg.grid),
        "beam": {"entry": beam_entry, "spec": cfg.beam},
        "transition": transition,
        "geometry": geometry,
        "trap": trap,
        "observable": cfg.observable,
        "backend": cfg.backend,
        "tool_version": map.provenance.tool_version,
        "timestamp": map.provenance.timestamp,
        "run": run,
    });
    if let (Some(obj), Value::Object(extra)) = (v.as_object_mut(), extra) {
        obj.extend(extra);
    }
    v
}

/// Write `<stem>.csv`, `<stem>.json` and, when complex values were kept,
/// `<stem>_re.csv` / `<stem>_im.csv` with the raw values. Returns the CSV path.
pub fn write_map(
    dir: &Path,
    stem: &str,
    map: &MapDataset,
    sidecar: &Value,
) -> Result<PathBuf, CliError> {
    let grid = map.grid();
    let csv = dir.join(format!("{stem}.csv"));
    write_atomic(&csv, csv_text(grid, &map.values).as_bytes())?;
    if let Some(c) = &map.complex {
        let re: Vec<f64> = c.iter().map(|v| v.re).collect();
        let im: Vec<f64> = c.iter().map(|v| v.im).collect();
        write_atomic(
            &dir.join(format!("{stem}_re.csv")),
            csv_text(grid, &re).as_bytes(),
        )?;
        write_atomic(
            &dir.join(format!("{stem}_im.csv")),
            csv_text(grid, &im).as_bytes(),
        )?;
    }
    let text = serde_json::to_string_pretty(sidecar).expect("sidecar is valid JSON");
    write_atomic(&dir.join(format!("{stem}.json")), text.as_bytes())?;
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let grid = Grid::square(2e-6, 3, 0.0);
        let values: Vec<f64> = (0..9).map(|k| (k as f64 * 0.377).sin().abs()).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_atomic(&path, csv_text(&grid, &values).as_bytes()).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.values, values);
        assert_eq!(back.xs_um.len(), 3);
        assert!(back
            .xs_um
            .iter()
            .zip(grid.xs())
            .all(|(a, b)| (a * UM - b).abs() < 1e-20));
        assert!(matrix_text(&back).starts_with("3 "));
        let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }

    #[test]
    fn malformed_csv_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "y_um\\x_um,0,1\n0,1\n").unwrap();
        assert!(matches!(read_csv(&path), Err(CliError::Config(_))));
    }
}
