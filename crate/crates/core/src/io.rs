//! Readers and writers for network JSON and the numeric CSV formats.
//!
//! CSV numbers are written with 17 significant digits. JSON numbers use the
//! shortest representation that parses back to the same `f64`. Every writer
//! goes through [`write_atomic`], so a failed run never leaves a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::apps::{LabeledPoint, Spectrogram};
use crate::error::{MgspError, Result};
use crate::network::{build_from_edges, Edge, MultilayerNetwork};
use crate::signal::MlnSignal;

/// `{"M": …, "N": …, "directed": …, "edges": [{"a","i","b","j","w"}, …]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<Edge>,
}

impl NetworkFile {
    pub fn from_network(net: &MultilayerNetwork) -> Self {
        Self {
            m: net.layers(),
            n: net.entities(),
            directed: net.is_directed(),
            edges: net.edges(),
        }
    }

    pub fn into_network(self) -> Result<MultilayerNetwork> {
        build_from_edges(self.m, self.n, self.directed, &self.edges)
    }
}

/// Write `bytes` to a sibling temporary file, then rename it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| MgspError::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Pretty JSON text with a trailing newline.
pub fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| MgspError::InvalidArgument(format!("cannot serialize: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, json_text(value)?.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        MgspError::parse(
            format!("{}:{}:{}", path.display(), e.line(), e.column()),
            e.to_string(),
        )
    })
}

pub fn read_network(path: &Path) -> Result<MultilayerNetwork> {
    let file: NetworkFile = read_json(path)?;
    file.into_network().map_err(|e| match e {
        MgspError::Io(_) => e,
        other => MgspError::parse(path.display().to_string(), other.to_string()),
    })
}

pub fn write_network(path: &Path, net: &MultilayerNetwork) -> Result<()> {
    write_json(path, &NetworkFile::from_network(net))
}

/// A number with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.16e}")
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| MgspError::parse(path.display().to_string(), e.to_string()))
}

/// Numeric CSV rows. A first line whose fields are not all numbers is
/// treated as a header and skipped.
pub fn read_numeric_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (idx, rec) in csv_reader(path)?.records().enumerate() {
        let rec = rec.map_err(|e| MgspError::parse(path.display().to_string(), e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(idx as u64 + 1);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => {
                if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                    return Err(MgspError::parse(
                        format!("{}:{line}", path.display()),
                        format!("non-finite value {bad}"),
                    ));
                }
                rows.push(v);
            }
            Err(_) if idx == 0 => continue,
            Err(e) => {
                return Err(MgspError::parse(format!("{}:{line}", path.display()), e.to_string()));
            }
        }
    }
    Ok(rows)
}

pub fn write_numeric_csv(path: &Path, header: Option<&[String]>, rows: &[Vec<f64>]) -> Result<()> {
    write_atomic(path, numeric_csv(header, rows).as_bytes())
}

/// CSV text of `rows`, optionally preceded by a header line.
pub fn numeric_csv(header: Option<&[String]>, rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&h.join(","));
        out.push('\n');
    }
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn rectangular(path: &Path, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map(Vec::len).unwrap_or(0);
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
        return Err(MgspError::parse(
            path.display().to_string(),
            format!("row {} has {} fields, expected {c}", i + 1, row.len()),
        ));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(r, c, &flat))
}

/// `M` rows of `N` samples.
pub fn read_signal(path: &Path) -> Result<MlnSignal> {
    let rows = read_numeric_csv(path)?;
    MlnSignal::new(rectangular(path, &rows)?)
}

pub fn write_signal(path: &Path, s: &MlnSignal) -> Result<()> {
    write_matrix(path, s.matrix())
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let rows = read_numeric_csv(path)?;
    rectangular(path, &rows)
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect();
    write_numeric_csv(path, None, &rows)
}

/// One layer of entity features: `N` rows × feature dimension.
pub fn read_features(path: &Path) -> Result<Vec<Vec<f64>>> {
    let rows = read_numeric_csv(path)?;
    rectangular(path, &rows)?;
    Ok(rows)
}

/// `entity,label` rows with labels in `{−1, 0, +1}`; entities not listed
/// are unlabeled.
pub fn read_labels(path: &Path, n: usize) -> Result<Vec<f64>> {
    let mut labels = vec![0.0; n];
    let rows = read_numeric_csv(path)?;
    for (k, row) in rows.iter().enumerate() {
        let ctx = format!("{} row {}", path.display(), k + 1);
        if row.len() != 2 {
            return Err(MgspError::parse(ctx, "expected entity,label"));
        }
        let (e, l) = (row[0], row[1]);
        if e < 0.0 || e.fract() != 0.0 || e as usize >= n {
            return Err(MgspError::parse(ctx, format!("entity {e} outside 0..{n}")));
        }
        if ![-1.0, 0.0, 1.0].contains(&l) {
            return Err(MgspError::parse(ctx, format!("label {l} not in {{-1,0,1}}")));
        }
        labels[e as usize] = l;
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[f64]) -> Result<()> {
    let mut out = String::from("entity,label\n");
    for (i, l) in labels.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", *l as i64));
    }
    write_atomic(path, out.as_bytes())
}

/// `label,x,y,z` rows of one frame.
pub fn read_frame(path: &Path) -> Result<Vec<LabeledPoint>> {
    let rows = read_numeric_csv(path)?;
    rows.iter()
        .enumerate()
        .map(|(k, row)| {
            if row.len() != 4 || row[0].fract() != 0.0 {
                return Err(MgspError::parse(
                    format!("{} row {}", path.display(), k + 1),
                    "expected integer label followed by x,y,z",
                ));
            }
            Ok(LabeledPoint {
                label: row[0] as i64,
                xyz: [row[1], row[2], row[3]],
            })
        })
        .collect()
}

pub fn write_frame(path: &Path, points: &[LabeledPoint]) -> Result<()> {
    let mut out = String::from("label,x,y,z\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.label,
            fmt_num(p.xyz[0]),
            fmt_num(p.xyz[1]),
            fmt_num(p.xyz[2])
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Index written next to a spectrogram CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrogramIndex {
    pub window: usize,
    pub hop: usize,
    pub layers: usize,
    pub labels: Vec<i64>,
    pub starts: Vec<usize>,
    pub energies: Vec<f64>,
    pub csv: String,
}

/// Windows × flattened coefficients as CSV, plus a JSON index.
pub fn write_spectrogram(csv_path: &Path, index_path: &Path, sg: &Spectrogram) -> Result<()> {
    let rows = sg.rows();
    let n = sg.labels.len();
    let header: Vec<String> = (0..sg.window)
        .flat_map(|a| (0..n).map(move |i| format!("c{a}_{i}")))
        .collect();
    write_numeric_csv(csv_path, Some(&header), &rows)?;
    let index = SpectrogramIndex {
        window: sg.window,
        hop: sg.hop,
        layers: sg.window,
        labels: sg.labels.clone(),
        starts: sg.starts.clone(),
        energies: sg.energies(),
        csv: csv_path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    write_json(index_path, &index)
}

/// Rows of a matrix as nested vectors, for JSON output.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::x4;
    use crate::network::gen_er_multiplex;

    #[test]
    fn network_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("net.json");
        for net in [x4(), gen_er_multiplex(0.5, 0.5, 3, 4, 1).unwrap(), crate::network::gen_cyclic(5).unwrap()] {
            write_network(&p, &net).unwrap();
            assert_eq!(read_network(&p).unwrap(), net);
        }
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"M\"") && text.contains("\"edges\""));
    }

    #[test]
    fn signal_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let s = MlnSignal::new(DMatrix::from_fn(2, 3, |a, i| (a as f64 + 0.1) / (i as f64 + 3.0))).unwrap();
        write_signal(&p, &s).unwrap();
        assert_eq!(read_signal(&p).unwrap(), s);
    }

    #[test]
    fn parse_errors_carry_location() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        fs::write(&p, "1,2\n3,x\n").unwrap();
        let err = read_signal(&p).unwrap_err().to_string();
        assert!(err.contains("bad.csv:2"), "{err}");
        fs::write(&p, "1,2\n3\n").unwrap();
        assert!(read_signal(&p).is_err());
        let j = dir.path().join("bad.json");
        fs::write(&j, "{\"M\": 2,\n \"N\": }").unwrap();
        let err = read_network(&j).unwrap_err().to_string();
        assert!(err.contains("bad.json:2"), "{err}");
        fs::write(&j, r#"{"M":1,"N":2,"directed":false,"edges":[{"a":0,"i":0,"b":0,"j":5,"w":1}]}"#).unwrap();
        assert!(read_network(&j).is_err());
    }

    #[test]
    fn labels_and_frames() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.csv");
        fs::write(&p, "entity,label\n0,1\n3,-1\n").unwrap();
        assert_eq!(read_labels(&p, 4).unwrap(), vec![1.0, 0.0, 0.0, -1.0]);
        assert!(read_labels(&p, 3).is_err());
        fs::write(&p, "0,2\n").unwrap();
        assert!(read_labels(&p, 3).is_err());

        let f = dir.path().join("frame.csv");
        let pts = vec![
            LabeledPoint { label: 4, xyz: [0.5, -1.0, 2.25] },
            LabeledPoint { label: 9, xyz: [1e-3, 0.0, 7.0] },
        ];
        write_frame(&f, &pts).unwrap();
        assert_eq!(read_frame(&f).unwrap(), pts);
    }

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"hello").unwrap();
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.txt"), b"x").is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        let s = fmt_num(0.1);
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(s, "1.0000000000000001e-1");
    }
}
