//! Sampled graphs as `x,y` CSV at 17 significant digits, with a `key=value`
//! sidecar (`<file>.meta`) holding what the numbers alone do not say.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::SampledGraph;
use crate::io::fmt_real;

/// Sidecar contents. Unknown keys are kept in `extra`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GraphMetadata {
    pub name: String,
    pub n: usize,
    pub eval_error: f64,
    pub depth: Option<usize>,
    pub extra: BTreeMap<String, String>,
}

impl GraphMetadata {
    pub fn of(g: &SampledGraph<f64>) -> Self {
        Self {
            name: g.name().to_string(),
            n: g.n(),
            eval_error: g.eval_error(),
            depth: g.depth(),
            extra: BTreeMap::new(),
        }
    }
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn csv_err(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Parse {
            line: p.line() as usize,
            column: 1,
            message: e.to_string(),
        },
        None => Error::Io(e.to_string()),
    }
}

pub fn write_graph_csv<W: Write>(g: &SampledGraph<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"]).map_err(csv_err)?;
    for (x, y) in g.xs().iter().zip(g.ys()) {
        w.write_record([fmt_real(*x), fmt_real(*y)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x,y` rows. The evaluation error and name come from `meta` when
/// given; otherwise the samples are taken as exact.
pub fn read_graph_csv<R: Read>(input: R, meta: Option<&GraphMetadata>) -> Result<SampledGraph<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("expected header x,y, found {}", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<f64> {
            rec[i].trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                column: i + 1,
                message: format!("{:?}: {e}", &rec[i]),
            })
        };
        xs.push(field(0)?);
        ys.push(field(1)?);
    }
    let (err, name, depth) = meta.map_or((0.0, "custom".to_string(), None), |m| (m.eval_error, m.name.clone(), m.depth));
    Ok(SampledGraph::from_samples(xs, ys, err, name)?.with_depth(depth))
}

pub fn write_sidecar<W: Write>(m: &GraphMetadata, mut out: W) -> Result<()> {
    writeln!(out, "name={}", m.name)?;
    writeln!(out, "n={}", m.n)?;
    writeln!(out, "eval_error={}", fmt_real(m.eval_error))?;
    if let Some(d) = m.depth {
        writeln!(out, "depth={d}")?;
    }
    for (k, v) in &m.extra {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

pub fn read_sidecar(text: &str) -> Result<GraphMetadata> {
    let mut m = GraphMetadata::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let perr = |message: String| Error::Parse {
            line: i + 1,
            column: 1,
            message,
        };
        let (k, v) = line.split_once('=').ok_or_else(|| perr(format!("expected key=value, got {line:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "name" => m.name = v.to_string(),
            "n" => m.n = v.parse().map_err(|e| perr(format!("n: {e}")))?,
            "eval_error" => m.eval_error = v.parse().map_err(|e| perr(format!("eval_error: {e}")))?,
            "depth" => m.depth = Some(v.parse().map_err(|e| perr(format!("depth: {e}")))?),
            _ => {
                m.extra.insert(k.to_string(), v.to_string());
            }
        }
    }
    Ok(m)
}

/// Writes `path` and its sidecar.
pub fn save_graph(g: &SampledGraph<f64>, path: &Path, extra: BTreeMap<String, String>) -> Result<()> {
    write_graph_csv(g, fs::File::create(path)?)?;
    let mut meta = GraphMetadata::of(g);
    meta.extra = extra;
    write_sidecar(&meta, fs::File::create(sidecar_path(path))?)
}

/// Reads `path`, using its sidecar when one exists.
pub fn load_graph(path: &Path) -> Result<SampledGraph<f64>> {
    let side = sidecar_path(path);
    let meta = if side.exists() {
        Some(read_sidecar(&fs::read_to_string(side)?)?)
    } else {
        None
    };
    read_graph_csv(fs::File::open(path)?, meta.as_ref())
}
