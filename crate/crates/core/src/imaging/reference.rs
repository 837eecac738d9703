use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::problem::CompositeProblem;
use crate::solver::{gfista_fixed, Reference, SolverConfig};
use crate::space::Point;

/// File signature of cached reference solutions.
pub const REFERENCE_MAGIC: &[u8; 6] = b"GFREF1";

/// Points that can be stored as a dense row-major grid.
pub trait GridPoint: Point + Sized {
    /// `(rows, cols)` of the stored layout.
    fn grid_shape(&self) -> (usize, usize);
    fn from_grid(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self>;
}

impl GridPoint for ScalarField {
    fn grid_shape(&self) -> (usize, usize) {
        self.shape()
    }

    fn from_grid(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        ScalarField::from_vec(rows, cols, data)
    }
}

/// Stored as `rows x 2 cols` with the two components interleaved.
impl GridPoint for VectorField {
    fn grid_shape(&self) -> (usize, usize) {
        let (m, n) = self.shape();
        (m, 2 * n)
    }

    fn from_grid(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if cols % 2 != 0 {
            return Err(Error::Shape {
                expected: format!("even column count for {rows} rows"),
                actual: format!("{cols}"),
            });
        }
        VectorField::from_vec(rows, cols / 2, data)
    }
}

impl GridPoint for Vec<f64> {
    fn grid_shape(&self) -> (usize, usize) {
        (1, self.len())
    }

    fn from_grid(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows != 1 || data.len() != cols {
            return Err(Error::Shape {
                expected: format!("1 x {}", data.len()),
                actual: format!("{rows} x {cols}"),
            });
        }
        Ok(data)
    }
}

/// Long-run solution of `problem` by fixed-step GFISTA with `tau = 1/L`,
/// `t0 = 1`, started at `x_init`.
pub fn compute_reference<Pr: CompositeProblem>(
    problem: &Pr,
    x_init: &Pr::Point,
    iters: usize,
) -> Result<Reference<Pr::Point>> {
    let lipschitz = problem
        .lipschitz_f()
        .ok_or_else(|| Error::Config("reference solve needs a Lipschitz constant".into()))?;
    let config = SolverConfig::fixed(1.0 / lipschitz, iters);
    let trace = gfista_fixed(problem, &config, x_init)?;
    let objective = problem.objective(&trace.solution);
    if !objective.is_finite() {
        return Err(Error::NumericalFailure {
            step: "reference objective",
            iteration: Some(iters),
        });
    }
    Ok(Reference {
        point: trace.solution,
        objective,
    })
}

/// Stable 64-bit fingerprint of a problem instance: a label, its scalar
/// parameters and its data, hashed bitwise.
pub fn problem_hash(label: &str, params: &[f64], data: &[f64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    for block in [params, data] {
        hasher.update((block.len() as u64).to_le_bytes());
        for v in block {
            hasher.update(v.to_bits().to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Directory of reference solutions keyed by `(problem hash, iterations, seed)`.
#[derive(Debug, Clone)]
pub struct ReferenceCache {
    dir: PathBuf,
}

impl ReferenceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, hash: u64, iters: usize, seed: u64) -> PathBuf {
        self.dir.join(format!("ref-{hash:016x}-{iters}-{seed}.bin"))
    }

    /// `Ok(None)` if no entry exists; an error if one exists but is unusable.
    pub fn load<P: GridPoint>(&self, hash: u64, iters: usize, seed: u64) -> Result<Option<Reference<P>>> {
        let path = self.path_for(hash, iters, seed);
        match fs::read(&path) {
            Ok(bytes) => decode(&bytes).map(Some).map_err(|reason| Error::Cache { path, reason }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Write through a temporary file and rename, so readers never see a
    /// partial entry.
    pub fn store<P: GridPoint>(&self, hash: u64, iters: usize, seed: u64, reference: &Reference<P>) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(hash, iters, seed);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let bytes = encode(reference).map_err(|reason| Error::Cache { path: path.clone(), reason })?;
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(&bytes)?;
            file.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Load the entry, or compute and store it.
    pub fn get_or_compute<P: GridPoint>(
        &self,
        hash: u64,
        iters: usize,
        seed: u64,
        compute: impl FnOnce() -> Result<Reference<P>>,
    ) -> Result<Reference<P>> {
        if let Some(found) = self.load(hash, iters, seed)? {
            return Ok(found);
        }
        let reference = compute()?;
        self.store(hash, iters, seed, &reference)?;
        Ok(reference)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

fn encode<P: GridPoint>(reference: &Reference<P>) -> std::result::Result<Vec<u8>, String> {
    let (rows, cols) = reference.point.grid_shape();
    let data = reference.point.as_slice();
    let rows32 = u32::try_from(rows).map_err(|_| format!("{rows} rows exceed u32"))?;
    let cols32 = u32::try_from(cols).map_err(|_| format!("{cols} columns exceed u32"))?;
    let mut out = Vec::with_capacity(REFERENCE_MAGIC.len() + 8 + 8 * (data.len() + 1));
    out.extend_from_slice(REFERENCE_MAGIC);
    out.extend_from_slice(&rows32.to_le_bytes());
    out.extend_from_slice(&cols32.to_le_bytes());
    for v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&reference.objective.to_le_bytes());
    Ok(out)
}

fn decode<P: GridPoint>(bytes: &[u8]) -> std::result::Result<Reference<P>, String> {
    let header = REFERENCE_MAGIC.len() + 8;
    if bytes.len() < header || &bytes[..REFERENCE_MAGIC.len()] != REFERENCE_MAGIC {
        return Err("missing GFREF1 header".into());
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
    let rows = word(REFERENCE_MAGIC.len());
    let cols = word(REFERENCE_MAGIC.len() + 4);
    let expected = rows
        .checked_mul(cols)
        .and_then(|count| count.checked_add(1))
        .and_then(|words| words.checked_mul(8))
        .and_then(|bytes| bytes.checked_add(header))
        .ok_or_else(|| format!("shape {rows} x {cols} overflows"))?;
    if bytes.len() != expected {
        return Err(format!("expected {expected} bytes for {rows} x {cols}, found {}", bytes.len()));
    }
    let mut values: Vec<f64> = bytes[header..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let objective = values.pop().expect("objective present");
    let point = P::from_grid(rows, cols, values).map_err(|e| e.to_string())?;
    Ok(Reference { point, objective })
}
