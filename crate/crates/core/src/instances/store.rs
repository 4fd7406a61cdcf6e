use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mtx::{read_matrix, read_vector, write_matrix, write_vector};
use super::{BpInstance, InstanceError};

pub const MATRIX_FILE: &str = "A.mtx";
pub const RHS_FILE: &str = "b.mtx";
pub const PLANTED_FILE: &str = "xtrue.mtx";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstanceMeta {
    pub label: String,
    pub seed: Option<u64>,
    pub s: Option<usize>,
    pub dynrange: Option<f64>,
    pub erc_value: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MetaFile {
    label: String,
    seed: Option<u64>,
    m: usize,
    n: usize,
    s: Option<usize>,
    dynrange: Option<f64>,
    erc_value: Option<f64>,
}

/// Writes `A.mtx`, `b.mtx`, `xtrue.mtx` (if planted) and `meta.json` into `dir`.
pub fn write_instance(inst: &BpInstance, dir: &Path) -> Result<(), InstanceError> {
    fs::create_dir_all(dir).map_err(|e| InstanceError::io(dir, e))?;
    write_matrix(&dir.join(MATRIX_FILE), &inst.matrix)?;
    write_vector(&dir.join(RHS_FILE), &inst.rhs)?;
    let planted_path = dir.join(PLANTED_FILE);
    match &inst.planted {
        Some(x) => write_vector(&planted_path, x)?,
        None if planted_path.exists() => {
            fs::remove_file(&planted_path).map_err(|e| InstanceError::io(&planted_path, e))?
        }
        None => {}
    }
    let meta = MetaFile {
        label: inst.meta.label.clone(),
        seed: inst.meta.seed,
        m: inst.rows(),
        n: inst.cols(),
        s: inst.meta.s,
        dynrange: inst.meta.dynrange,
        erc_value: inst.meta.erc_value,
    };
    let meta_path = dir.join(META_FILE);
    let text = serde_json::to_string_pretty(&meta).map_err(|e| InstanceError::Meta {
        path: meta_path.clone(),
        source: e,
    })?;
    fs::write(&meta_path, text + "\n").map_err(|e| InstanceError::io(&meta_path, e))
}

/// Reads an instance directory. `meta.json` and `xtrue.mtx` are optional.
pub fn read_instance(dir: &Path) -> Result<BpInstance, InstanceError> {
    if !dir.is_dir() {
        return Err(InstanceError::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "instance directory not found"),
        ));
    }
    let matrix = read_matrix(&dir.join(MATRIX_FILE))?;
    let rhs_path = dir.join(RHS_FILE);
    let rhs = read_vector(&rhs_path)?;
    if rhs.len() != matrix.rows() {
        return Err(InstanceError::Dimension(format!(
            "{}: b has length {} but A has {} rows",
            rhs_path.display(),
            rhs.len(),
            matrix.rows()
        )));
    }
    let mut inst = BpInstance::new(matrix, rhs)?;
    let planted_path = dir.join(PLANTED_FILE);
    if planted_path.exists() {
        inst = inst.with_planted(read_vector(&planted_path)?)?;
    }
    let meta_path = dir.join(META_FILE);
    if meta_path.exists() {
        let text = fs::read_to_string(&meta_path).map_err(|e| InstanceError::io(&meta_path, e))?;
        let meta: MetaFile = serde_json::from_str(&text).map_err(|e| InstanceError::Meta {
            path: meta_path.clone(),
            source: e,
        })?;
        if meta.m != inst.rows() || meta.n != inst.cols() {
            return Err(InstanceError::Dimension(format!(
                "{}: declares {}x{} but A is {}x{}",
                meta_path.display(),
                meta.m,
                meta.n,
                inst.rows(),
                inst.cols()
            )));
        }
        inst.meta = InstanceMeta {
            label: meta.label,
            seed: meta.seed,
            s: meta.s,
            dynrange: meta.dynrange,
            erc_value: meta.erc_value,
        };
    } else {
        inst.meta.label = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(inst)
}
