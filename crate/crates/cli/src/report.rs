//! The `report` bundle: every table and figure dataset plus a manifest.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use euler_core::compare::Family;

use crate::tables;

pub const MANIFEST: &str = "manifest.json";

/// Everything that determines the bundle's contents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settings {
    pub families: Vec<String>,
    pub m_max: usize,
    pub roots: usize,
    pub steps_per_unit: usize,
    pub scan_points: usize,
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: String,
    pub settings: Settings,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn families(settings: &Settings) -> Result<(bool, bool)> {
    let mut comb = false;
    let mut grid = false;
    for f in &settings.families {
        match f.parse::<Family>()? {
            Family::Comb => comb = true,
            Family::Grid2 => grid = true,
            Family::Path => bail!("the report covers comb and grid2 only"),
        }
    }
    if !comb && !grid {
        bail!("no families selected");
    }
    Ok((comb, grid))
}

/// Builds all datasets in memory, then writes them and the manifest.
pub fn run(settings: &Settings, out: &Path) -> Result<Manifest> {
    let (comb, grid) = families(settings)?;
    let mut files: Vec<(String, String)> = Vec::new();
    let comb_spec = if comb {
        Some(tables::comb_spectrum(
            settings.roots,
            settings.steps_per_unit,
        )?)
    } else {
        None
    };
    let grid_spec = if grid {
        Some(tables::grid_spectrum(
            settings.roots,
            settings.steps_per_unit,
        )?)
    } else {
        None
    };
    if let Some(spec) = &comb_spec {
        let t1 = tables::compare_table(
            Family::Comb,
            settings.m_max,
            settings.roots,
            settings.steps_per_unit,
        )?;
        files.push(("table1_comb.csv".into(), t1.0.to_csv()));
        files.push((
            "table2.csv".into(),
            tables::comb_table(spec, settings.steps_per_unit).to_csv(),
        ));
        let fig = tables::figure_scan(
            "comb",
            settings.scan_points,
            settings.steps_per_unit,
            (-0.5, 0.5),
            (-0.12, 0.12),
        )?;
        files.push(("fig2.csv".into(), fig.to_csv()));
    }
    if let Some(spec) = &grid_spec {
        let t1 = tables::compare_table(
            Family::Grid2,
            settings.m_max,
            settings.roots,
            settings.steps_per_unit,
        )?;
        files.push(("table1_grid2.csv".into(), t1.0.to_csv()));
        files.push((
            "table3.csv".into(),
            tables::grid_table(spec, settings.steps_per_unit).to_csv(),
        ));
        let fig = tables::figure_scan(
            "grid2",
            settings.scan_points,
            settings.steps_per_unit,
            (-0.5, 0.5),
            (-0.1, 0.1),
        )?;
        files.push(("fig4.csv".into(), fig.to_csv()));
    }
    let eig = tables::eigenfunction_table(
        comb_spec.as_ref(),
        grid_spec.as_ref(),
        settings.stride,
        settings.steps_per_unit,
    )?;
    files.push(("eigenfunctions.csv".into(), eig.to_csv()));

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut entries = Vec::new();
    for (name, body) in files {
        let path = out.join(&name);
        fs::write(&path, &body).with_context(|| format!("writing {}", path.display()))?;
        entries.push(FileEntry {
            name,
            bytes: body.len(),
            sha256: hex::encode(Sha256::digest(body.as_bytes())),
        });
    }
    let manifest = Manifest {
        generator: format!("bieuler {}", env!("CARGO_PKG_VERSION")),
        settings: settings.clone(),
        files: entries,
    };
    let path = out.join(MANIFEST);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(manifest)
}
