//! Environment interchange file.
//!
//! A JSON document with fields `version` (integer), `window`
//! `{anchor_x, anchor_y, side}`, `cells` `[{id, rings: [{hole, points}]}]`,
//! `edges` `[{a, b, conductance}]`, and `meta` `{generator, seed,
//! parameters}`. Rings carry an orientation flag (`hole`); a hole ring
//! belongs to the most recent non-hole ring of its cell. All reals are
//! serialized with 17 significant digits, so emission is byte-deterministic
//! and round trips are lossless. The loader rejects unknown versions.

use super::{CellConfiguration, CellConfigurationBuilder, CellId};
use crate::error::{Error, Result};
use crate::geometry::{Point, Region, Square};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const ENV_FILE_VERSION: u64 = 1;

/// Provenance block carried by every environment file.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct EnvMeta {
    pub generator: String,
    pub seed: u64,
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct FileWindow {
    anchor_x: f64,
    anchor_y: f64,
    side: f64,
}

#[derive(Serialize, Deserialize)]
struct FileRing {
    hole: bool,
    points: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct FileCell {
    id: u32,
    rings: Vec<FileRing>,
}

#[derive(Serialize, Deserialize)]
struct FileEdge {
    a: u32,
    b: u32,
    conductance: f64,
}

#[derive(Serialize, Deserialize)]
struct EnvFile {
    version: u64,
    window: FileWindow,
    cells: Vec<FileCell>,
    edges: Vec<FileEdge>,
    meta: EnvMeta,
}

/// Formats a real with 17 significant digits (lossless for f64).
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        writer.write_all(fmt_real(value).as_bytes())
    }
}

fn to_file(config: &CellConfiguration) -> EnvFile {
    let window = config.window();
    let cells = config
        .ids()
        .map(|id| {
            let mut rings = Vec::new();
            for comp in &config.region(id).components {
                rings.push(FileRing {
                    hole: false,
                    points: comp.outer.iter().map(|p| [p.x, p.y]).collect(),
                });
                for h in &comp.holes {
                    rings.push(FileRing {
                        hole: true,
                        points: h.iter().map(|p| [p.x, p.y]).collect(),
                    });
                }
            }
            FileCell { id: id.0, rings }
        })
        .collect();
    let edges = config
        .edges()
        .map(|(a, b, c)| FileEdge { a: a.0, b: b.0, conductance: c })
        .collect();
    EnvFile {
        version: ENV_FILE_VERSION,
        window: FileWindow {
            anchor_x: window.anchor.x,
            anchor_y: window.anchor.y,
            side: window.side,
        },
        cells,
        edges,
        meta: config.meta().clone(),
    }
}

/// Serializes an environment to the interchange format.
pub fn write_env_file(config: &CellConfiguration, path: &Path) -> Result<()> {
    let file = to_file(config);
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter);
    file.serialize(&mut ser)
        .map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    atomic_write(path, &buf)
}

/// Writes bytes through a temporary file and an atomic rename.
pub(crate) fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Serializes any value as JSON with 17-significant-digit reals and writes
/// it atomically.
pub fn write_json_17<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    atomic_write(path, &buf)
}

/// Loads an environment from the interchange format.
pub fn read_env_file(path: &Path) -> Result<CellConfiguration> {
    let text = std::fs::read_to_string(path)?;
    let file: EnvFile =
        serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    if file.version != ENV_FILE_VERSION {
        return Err(Error::Format(format!(
            "unsupported environment file version {} (supported: {})",
            file.version, ENV_FILE_VERSION
        )));
    }
    let window = Square::new(
        Point::new(file.window.anchor_x, file.window.anchor_y),
        file.window.side,
    )?;
    let mut builder = CellConfigurationBuilder::new(window);
    for (expected, cell) in (0u32..).zip(&file.cells) {
        if cell.id != expected {
            return Err(Error::Format(format!(
                "cell ids must be dense and ordered; expected {expected}, got {}",
                cell.id
            )));
        }
        let mut components: Vec<(Vec<Point>, Vec<Vec<Point>>)> = Vec::new();
        for ring in &cell.rings {
            let pts: Vec<Point> = ring.points.iter().map(|&[x, y]| Point::new(x, y)).collect();
            if ring.hole {
                match components.last_mut() {
                    Some((_, holes)) => holes.push(pts),
                    None => {
                        return Err(Error::Format(format!(
                            "cell {} starts with a hole ring",
                            cell.id
                        )))
                    }
                }
            } else {
                components.push((pts, Vec::new()));
            }
        }
        builder.add_cell(Region::new(components)?);
    }
    for e in &file.edges {
        builder.add_edge(CellId(e.a), CellId(e.b), e.conductance);
    }
    builder.set_meta(file.meta);
    builder.build()
}
