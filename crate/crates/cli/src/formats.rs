//! Versioned tabular formats: a JSON header line followed by CSV.
//!
//! Floats are written as the shortest decimal that round-trips to the same
//! 64-bit value, so reloading is bit-exact.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use warpflow::curvature::{Boundary, FiberKind, FiberSpec, WarpProfile};
use warpflow::flow::FlowState;
use warpflow::pointpick::SpaceTimeField;

use crate::config::{FORMAT_MAJOR, FORMAT_VERSION};
use crate::error::{CliError, Result};

/// Shortest round-trip decimal.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryHeader {
    Capped,
    FrozenGhost,
    Periodic { period: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileHeader {
    pub format_version: String,
    pub kind: String,
    /// Total dimension `N`.
    pub dim: usize,
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    pub t: f64,
    pub nodes: usize,
    pub boundary: BoundaryHeader,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub format_version: String,
    pub kind: String,
    pub dim: usize,
    pub times: usize,
    pub nodes: usize,
    pub ricci_hypothesis: Option<bool>,
}

/// Rejects files whose major version is newer than this reader.
pub fn check_version(version: &str) -> Result<()> {
    let major: u32 = version
        .split('.')
        .next()
        .and_then(|m| m.parse().ok())
        .ok_or_else(|| CliError::format("header", format!("bad format_version {version:?}")))?;
    if major > FORMAT_MAJOR {
        return Err(CliError::UnsupportedVersion { found: version.into(), supported: FORMAT_MAJOR });
    }
    Ok(())
}

fn header_line<H: Serialize>(header: &H) -> String {
    serde_json::to_string(header).expect("header serializes")
}

fn split_header<R: BufRead>(mut reader: R, what: &str) -> Result<(String, R)> {
    let mut line = String::new();
    reader.read_line(&mut line).map_err(|e| CliError::format(what, e))?;
    if line.trim().is_empty() {
        return Err(CliError::format(what, "missing header line"));
    }
    Ok((line, reader))
}

fn parse_row(record: &csv::StringRecord, what: &str) -> Result<Vec<f64>> {
    record
        .iter()
        .map(|f| f.trim().parse::<f64>().map_err(|e| CliError::format(what, format!("{e} in {f:?}"))))
        .collect()
}

pub fn write_state<W: Write>(out: W, state: &FlowState<f64>) -> Result<()> {
    let p = &state.profile;
    let (kappa, spectrum) = match p.fiber().kind() {
        FiberKind::ConstantCurvature(k) => (Some(*k), None),
        FiberKind::EinsteinSpectrum(s) => (None, Some(s.clone())),
    };
    let boundary = match p.boundary() {
        Boundary::Capped => BoundaryHeader::Capped,
        Boundary::FrozenGhost => BoundaryHeader::FrozenGhost,
        Boundary::Periodic { period } => BoundaryHeader::Periodic { period },
    };
    let header = ProfileHeader {
        format_version: FORMAT_VERSION.into(),
        kind: "profile".into(),
        dim: p.total_dim(),
        kappa,
        spectrum,
        t: state.t,
        nodes: p.len(),
        boundary,
    };
    let mut out = out;
    writeln!(out, "{}", header_line(&header)).map_err(|e| CliError::format("snapshot", e))?;
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| CliError::format("snapshot", e);
    w.write_record(["x", "a", "b", "u"]).map_err(fail)?;
    for i in 0..p.len() {
        w.write_record([num(p.x()[i]), num(p.a()[i]), num(p.b()[i]), num(state.slope[i])]).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::format("snapshot", e))?;
    Ok(())
}

pub fn state_to_string(state: &FlowState<f64>) -> String {
    let mut buf = Vec::new();
    write_state(&mut buf, state).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads a snapshot; the slope column is optional and recomputed when absent.
pub fn read_state<R: BufRead>(input: R) -> Result<FlowState<f64>> {
    let (line, rest) = split_header(input, "snapshot")?;
    let header: ProfileHeader = serde_json::from_str(&line).map_err(|e| CliError::format("snapshot header", e))?;
    check_version(&header.format_version)?;
    if header.kind != "profile" {
        return Err(CliError::format("snapshot header", format!("kind {:?} is not a profile", header.kind)));
    }
    let mut reader = csv::Reader::from_reader(rest);
    let columns: Vec<String> =
        reader.headers().map_err(|e| CliError::format("snapshot", e))?.iter().map(|s| s.trim().to_string()).collect();
    let has_slope = match columns.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "a", "b"] => false,
        ["x", "a", "b", "u"] => true,
        other => return Err(CliError::format("snapshot", format!("unexpected columns {other:?}"))),
    };
    let (mut x, mut a, mut b, mut u) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let row = parse_row(&record.map_err(|e| CliError::format("snapshot", e))?, "snapshot")?;
        x.push(row[0]);
        a.push(row[1]);
        b.push(row[2]);
        if has_slope {
            u.push(row[3]);
        }
    }
    if x.len() != header.nodes {
        return Err(CliError::format("snapshot", format!("header declares {} nodes, found {}", header.nodes, x.len())));
    }
    if header.dim < 2 {
        return Err(CliError::format("snapshot header", "dim must be at least 2"));
    }
    let fiber = match (header.kappa, header.spectrum) {
        (Some(k), None) => FiberSpec::constant(header.dim - 1, k)?,
        (None, Some(s)) => FiberSpec::einstein(header.dim - 1, s)?,
        _ => return Err(CliError::format("snapshot header", "exactly one of kappa and spectrum is required")),
    };
    let boundary = match header.boundary {
        BoundaryHeader::Capped => Boundary::Capped,
        BoundaryHeader::FrozenGhost => Boundary::FrozenGhost,
        BoundaryHeader::Periodic { period } => Boundary::Periodic { period },
    };
    let profile = WarpProfile::new(x, a, b, fiber, boundary)?;
    let mut state = FlowState::new(header.t, profile);
    if has_slope {
        state.slope = u;
    }
    Ok(state)
}

pub fn read_state_file(path: &std::path::Path) -> Result<FlowState<f64>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_state(std::io::BufReader::new(file))
}

/// Long format: one row `t, node, position, scal` per sample.
pub fn write_field<W: Write>(out: W, field: &SpaceTimeField<f64>) -> Result<()> {
    let header = FieldHeader {
        format_version: FORMAT_VERSION.into(),
        kind: "field".into(),
        dim: field.dim(),
        times: field.times().len(),
        nodes: field.node_count(),
        ricci_hypothesis: field.ricci_hypothesis(),
    };
    let mut out = out;
    writeln!(out, "{}", header_line(&header)).map_err(|e| CliError::format("field", e))?;
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| CliError::format("field", e);
    w.write_record(["t", "node", "position", "scal"]).map_err(fail)?;
    for (j, &t) in field.times().iter().enumerate() {
        for i in 0..field.node_count() {
            w.write_record([num(t), i.to_string(), num(field.position(i, j)), num(field.scal(i, j))]).map_err(fail)?;
        }
    }
    w.flush().map_err(|e| CliError::format("field", e))?;
    Ok(())
}

pub fn read_field<R: BufRead>(input: R) -> Result<SpaceTimeField<f64>> {
    let (line, rest) = split_header(input, "field")?;
    let header: FieldHeader = serde_json::from_str(&line).map_err(|e| CliError::format("field header", e))?;
    check_version(&header.format_version)?;
    if header.kind != "field" {
        return Err(CliError::format("field header", format!("kind {:?} is not a field", header.kind)));
    }
    let (nt, nn) = (header.times, header.nodes);
    let mut times = vec![f64::NAN; nt];
    let mut positions = vec![vec![f64::NAN; nn]; nt];
    let mut scal = vec![vec![f64::NAN; nn]; nt];
    let mut reader = csv::Reader::from_reader(rest);
    let mut count = 0;
    for record in reader.records() {
        let row = parse_row(&record.map_err(|e| CliError::format("field", e))?, "field")?;
        let (j, i) = (count / nn.max(1), row[1] as usize);
        if j >= nt || i >= nn || row[1].fract() != 0.0 {
            return Err(CliError::format("field", format!("row {count} outside the declared {nt} x {nn} grid")));
        }
        times[j] = row[0];
        positions[j][i] = row[2];
        scal[j][i] = row[3];
        count += 1;
    }
    if count != nt * nn {
        return Err(CliError::format("field", format!("expected {} rows, found {count}", nt * nn)));
    }
    Ok(SpaceTimeField::new(times, positions, scal, header.dim)?.with_ricci_hypothesis(header.ricci_hypothesis))
}

pub fn read_field_file(path: &std::path::Path) -> Result<SpaceTimeField<f64>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_field(std::io::BufReader::new(file))
}
