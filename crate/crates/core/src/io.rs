//! File formats: state JSON, counts (JSON and CSV), circuit description
//! JSON, and the helpers shared by reports. Everything here is pinned to
//! double precision.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::matrix::ComplexMatrix;
use crate::optics::{ElementKind, OpticalElement, PhaseTarget, PhotonicCircuit, Port};
use crate::quantum::DensityMatrix;
use crate::sequential::OutcomeLabel;
use crate::tomography::{CountRecord, CountRow};

/// A state loaded from file: pure or mixed.
#[derive(Clone, Debug)]
pub enum LoadedState {
    Pure(Ket<f64>),
    Mixed(DensityMatrix<f64>),
}

impl LoadedState {
    pub fn density(&self) -> DensityMatrix<f64> {
        match self {
            LoadedState::Pure(ket) => DensityMatrix::from_ket(ket),
            LoadedState::Mixed(rho) => rho.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LoadedState::Pure(ket) => ket.dim(),
            LoadedState::Mixed(rho) => rho.dim(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    dim: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<Vec<Vec<[f64; 2]>>>,
}

/// Parses the state file format
/// `{"dim": d, "kind": "pure", "amplitudes": [[re, im], ...]}` or
/// `{"dim": d, "kind": "mixed", "rows": [[[re, im], ...], ...]}`,
/// reporting the first violated invariant.
pub fn parse_state_json(text: &str) -> Result<LoadedState> {
    let file: StateFile = serde_json::from_str(text)?;
    match file.kind.as_str() {
        "pure" => {
            let amps = file.amplitudes.ok_or_else(|| {
                Error::InvalidState("kind 'pure' requires an 'amplitudes' array".into())
            })?;
            if amps.len() != file.dim {
                return Err(Error::InvalidState(format!(
                    "expected {} amplitudes, found {}",
                    file.dim,
                    amps.len()
                )));
            }
            let ket = Ket::new(amps.iter().map(|&[re, im]| Complex::new(re, im)).collect())?;
            Ok(LoadedState::Pure(ket))
        }
        "mixed" => {
            let rows = file.rows.ok_or_else(|| {
                Error::InvalidState("kind 'mixed' requires a 'rows' matrix".into())
            })?;
            if rows.len() != file.dim || rows.iter().any(|r| r.len() != file.dim) {
                return Err(Error::InvalidState(format!(
                    "expected a {0}x{0} matrix",
                    file.dim
                )));
            }
            let matrix = rows_to_matrix(&rows)?;
            Ok(LoadedState::Mixed(DensityMatrix::new(matrix)?))
        }
        other => Err(Error::InvalidState(format!(
            "unknown state kind '{other}' (expected 'pure' or 'mixed')"
        ))),
    }
}

pub fn state_to_json(state: &LoadedState) -> String {
    let file = match state {
        LoadedState::Pure(ket) => StateFile {
            dim: ket.dim(),
            kind: "pure".into(),
            amplitudes: Some(ket.amps().iter().map(|z| [z.re, z.im]).collect()),
            rows: None,
        },
        LoadedState::Mixed(rho) => StateFile {
            dim: rho.dim(),
            kind: "mixed".into(),
            amplitudes: None,
            rows: Some(matrix_to_rows(rho.matrix())),
        },
    };
    serde_json::to_string_pretty(&file).expect("state serialization cannot fail")
}

pub fn matrix_to_rows(m: &ComplexMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::InvalidState("ragged matrix rows".into()));
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex::new(re, im))
        .collect();
    ComplexMatrix::new(r, c, data)
}

// ---------------------------------------------------------------------
// Counts
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CountsFile {
    pom: String,
    shots: u64,
    counts: Vec<CountRow>,
}

pub fn counts_to_json(record: &CountRecord) -> String {
    let file = CountsFile {
        pom: record.pom_id().into(),
        shots: record.total(),
        counts: record
            .counts()
            .iter()
            .map(|(l, &c)| CountRow {
                port: l.port,
                result: l.result,
                count: c,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("counts serialization cannot fail")
}

pub fn counts_from_json(text: &str) -> Result<CountRecord> {
    let file: CountsFile = serde_json::from_str(text)?;
    let mut counts = BTreeMap::new();
    for row in file.counts {
        let label = OutcomeLabel::new(row.port, row.result);
        if counts.insert(label, row.count).is_some() {
            return Err(Error::InvalidCounts(format!("duplicate outcome {label}")));
        }
    }
    CountRecord::new(file.pom, file.shots, counts)
}

/// CSV with the exact header `port,result,count`, one row per outcome in
/// lexicographic order.
pub fn counts_to_csv(record: &CountRecord) -> String {
    let mut out = String::from("port,result,count\n");
    for (label, count) in record.counts() {
        out.push_str(&format!("{},{},{}\n", label.port, label.result, count));
    }
    out
}

/// Parses the counts CSV. The POM identity is inferred from the outcome
/// count: 16 rows mean the two-qubit SIC, 4 rows the tetrahedron.
pub fn counts_from_csv(text: &str) -> Result<CountRecord> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidCounts("empty counts file".into()))?;
    if header.trim() != "port,result,count" {
        return Err(Error::InvalidCounts(format!(
            "bad header '{header}', expected 'port,result,count'"
        )));
    }
    let mut counts = BTreeMap::new();
    for line in lines {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 3 {
            return Err(Error::InvalidCounts(format!("bad row '{line}'")));
        }
        let parse = |s: &str| -> Result<u64> {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidCounts(format!("bad number '{s}'")))
        };
        let label = OutcomeLabel::new(parse(fields[0])? as usize, parse(fields[1])? as usize);
        if counts.insert(label, parse(fields[2])?).is_some() {
            return Err(Error::InvalidCounts(format!("duplicate outcome {label}")));
        }
    }
    let shots: u64 = counts.values().sum();
    let pom = match counts.len() {
        16 => "sic-d4",
        4 => "sic-d2",
        n => {
            return Err(Error::InvalidCounts(format!(
                "expected 16 or 4 outcome rows, found {n}"
            )))
        }
    };
    CountRecord::new(pom, shots, counts)
}

/// Parses counts from either format: JSON object or CSV table.
pub fn counts_from_str(text: &str) -> Result<CountRecord> {
    if text.trim_start().starts_with('{') {
        counts_from_json(text)
    } else {
        counts_from_csv(text)
    }
}

// ---------------------------------------------------------------------
// Circuit description
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum ElementFile {
    Bs {
        r: f64,
        modes: [String; 2],
    },
    Ppbs {
        r_v: f64,
        r_h: f64,
        modes: [String; 2],
    },
    Hwp {
        angle: f64,
        mode: String,
    },
    Ps {
        phase: f64,
        target: String,
        mode: String,
    },
}

#[derive(Serialize, Deserialize)]
struct PortFile {
    label: String,
    modes: [String; 2],
}

#[derive(Serialize, Deserialize)]
struct CircuitFile {
    polarized: bool,
    modes: Vec<String>,
    elements: Vec<ElementFile>,
    input: [String; 2],
    ports: Vec<PortFile>,
}

pub fn circuit_to_json(circuit: &PhotonicCircuit<f64>) -> String {
    let name = |m: usize| circuit.mode_names()[m].clone();
    let elements = circuit
        .elements()
        .iter()
        .map(|e| match &e.kind {
            ElementKind::BeamSplitter { reflectivity } => ElementFile::Bs {
                r: *reflectivity,
                modes: [name(e.modes[0]), name(e.modes[1])],
            },
            ElementKind::Ppbs { r_v, r_h } => ElementFile::Ppbs {
                r_v: *r_v,
                r_h: *r_h,
                modes: [name(e.modes[0]), name(e.modes[1])],
            },
            ElementKind::HalfWavePlate { angle } => ElementFile::Hwp {
                angle: *angle,
                mode: name(e.modes[0]),
            },
            ElementKind::PhaseShifter { phase, target } => ElementFile::Ps {
                phase: *phase,
                target: match target {
                    PhaseTarget::Path => "path",
                    PhaseTarget::PolV => "pol-v",
                    PhaseTarget::PolH => "pol-h",
                }
                .into(),
                mode: name(e.modes[0]),
            },
        })
        .collect();
    let file = CircuitFile {
        polarized: circuit.polarized(),
        modes: circuit.mode_names().to_vec(),
        elements,
        input: [name(circuit.input().0), name(circuit.input().1)],
        ports: circuit
            .ports()
            .iter()
            .map(|p| PortFile {
                label: p.label.clone(),
                modes: [name(p.modes.0), name(p.modes.1)],
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("circuit serialization cannot fail")
}

pub fn circuit_from_json(text: &str) -> Result<PhotonicCircuit<f64>> {
    let file: CircuitFile = serde_json::from_str(text)?;
    let index = |name: &str| -> Result<usize> {
        file.modes
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| Error::InvalidCircuit(format!("unknown mode '{name}'")))
    };
    let mut elements = Vec::with_capacity(file.elements.len());
    for e in &file.elements {
        elements.push(match e {
            ElementFile::Bs { r, modes } => {
                OpticalElement::beam_splitter(*r, index(&modes[0])?, index(&modes[1])?)
            }
            ElementFile::Ppbs { r_v, r_h, modes } => {
                OpticalElement::ppbs(*r_v, *r_h, index(&modes[0])?, index(&modes[1])?)
            }
            ElementFile::Hwp { angle, mode } => OpticalElement::hwp(*angle, index(mode)?),
            ElementFile::Ps {
                phase,
                target,
                mode,
            } => {
                let mode = index(mode)?;
                match target.as_str() {
                    "path" => OpticalElement::path_phase(*phase, mode),
                    "pol-v" => OpticalElement::pol_phase(*phase, PhaseTarget::PolV, mode),
                    "pol-h" => OpticalElement::pol_phase(*phase, PhaseTarget::PolH, mode),
                    other => {
                        return Err(Error::InvalidCircuit(format!(
                            "unknown phase target '{other}'"
                        )))
                    }
                }
            }
        });
    }
    let ports = file
        .ports
        .iter()
        .map(|p| {
            Ok(Port {
                label: p.label.clone(),
                modes: (index(&p.modes[0])?, index(&p.modes[1])?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PhotonicCircuit::new(
        file.polarized,
        file.modes.clone(),
        elements,
        (index(&file.input[0])?, index(&file.input[1])?),
        ports,
    )
}
