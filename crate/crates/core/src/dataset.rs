//! Labelled design matrices, the two-class Gaussian toy generator, and the
//! reference weight map used to score interpretability.
//!
//! A [`Dataset`] stores the `n x p` design matrix column-major (the solver
//! walks columns) together with `n` labels in `{-1, +1}`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative cut-off below which eigenvalues are treated as zero in
/// [`pseudo_inverse_sym`].
pub const PINV_RCOND: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: Vec<f64>,
}

impl Dataset {
    /// Validates and wraps a design matrix and its labels.
    pub fn new(x: DMatrix<f64>, y: Vec<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::Input(format!(
                "design matrix has {} rows but {} labels were given",
                x.nrows(),
                y.len()
            )));
        }
        if y.len() < 2 {
            return Err(Error::Input(format!("need at least 2 samples, got {}", y.len())));
        }
        if x.ncols() == 0 {
            return Err(Error::Input("need at least one feature".into()));
        }
        if let Some(i) = y.iter().position(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::Input(format!("label {} at sample {i} is not -1 or +1", y[i])));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("design matrix contains non-finite values".into()));
        }
        Ok(Dataset { x, y })
    }

    /// Builds a dataset from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::Input(format!("row {i} has {} features, expected {p}", rows[i].len())));
        }
        let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        Dataset::new(x, y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.x.row(i).iter().copied().collect()
    }

    /// Returns `(positive, negative)` label counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&v| v > 0.0).count();
        (pos, self.y.len() - pos)
    }

    /// Gathers the given rows (repeats allowed) into a new dataset.
    ///
    /// The result skips label-diversity checks: a bootstrap multiset is a
    /// legitimate fitting set even if the caller has not yet vetted it.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        let x = self.x.select_rows(indices);
        let y = indices.iter().map(|&i| self.y[i]).collect();
        Dataset { x, y }
    }
}

/// Two-class Gaussian generator: class `+1` centred on `class_offsets[0]`,
/// class `-1` on `class_offsets[1]`, both with additive noise drawn from
/// `N(0, noise_covariance)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub n_per_class: usize,
    pub class_offsets: [Vec<f64>; 2],
    /// Row-major `p x p` covariance.
    pub noise_covariance: Vec<Vec<f64>>,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            n_per_class: 500,
            class_offsets: [vec![1.5, 0.0], vec![-1.5, 0.0]],
            noise_covariance: vec![vec![1.02, -0.3], vec![-0.3, 0.15]],
            seed: 42,
        }
    }
}

impl ToyConfig {
    pub fn p(&self) -> usize {
        self.class_offsets[0].len()
    }

    /// Same class layout with the noise switched off.
    pub fn noiseless(&self) -> ToyConfig {
        let p = self.p();
        ToyConfig {
            noise_covariance: vec![vec![0.0; p]; p],
            ..self.clone()
        }
    }

    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        let p = self.noise_covariance.len();
        DMatrix::from_fn(p, p, |i, j| self.noise_covariance[i].get(j).copied().unwrap_or(f64::NAN))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_per_class == 0 {
            return Err(Error::Config("n_per_class must be positive".into()));
        }
        let p = self.p();
        if p == 0 {
            return Err(Error::Config("class offsets must have at least one feature".into()));
        }
        if self.class_offsets[1].len() != p {
            return Err(Error::Config(format!(
                "class offsets differ in length ({} vs {})",
                p,
                self.class_offsets[1].len()
            )));
        }
        if self.class_offsets.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("class offsets must be finite".into()));
        }
        if self.noise_covariance.len() != p || self.noise_covariance.iter().any(|r| r.len() != p) {
            return Err(Error::Config(format!("noise covariance must be {p}x{p}")));
        }
        let cov = self.covariance_matrix();
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("noise covariance must be finite".into()));
        }
        for i in 0..p {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::Config(format!("noise covariance is not symmetric at ({i}, {j})")));
                }
            }
        }
        let min_eig = SymmetricEigen::new(cov).eigenvalues.min();
        if min_eig < -PSD_TOL {
            return Err(Error::Config(format!(
                "noise covariance is not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(())
    }
}

/// Symmetric square root `A` with `A A^T = cov`, built from the eigen
/// decomposition so singular (even zero) covariances are accepted.
fn noise_factor(cov: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(cov.clone());
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals)
}

/// Draws `2 * n_per_class` samples, alternating `+1, -1, +1, ...`.
pub fn generate_toy(config: &ToyConfig) -> Result<Dataset> {
    config.validate()?;
    let p = config.p();
    let n = 2 * config.n_per_class;
    let factor = noise_factor(&config.covariance_matrix());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut x = DMatrix::zeros(n, p);
    let mut y = Vec::with_capacity(n);
    let mut z = DVector::zeros(p);
    for i in 0..n {
        let class = i % 2;
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let noise = &factor * &z;
        for j in 0..p {
            x[(i, j)] = config.class_offsets[class][j] + noise[j];
        }
        y.push(if class == 0 { 1.0 } else { -1.0 });
    }
    Dataset::new(x, y)
}

/// The reference weight map: raw vector and its unit-norm direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub theta_star: Vec<f64>,
    pub mbm_star: Vec<f64>,
}

impl ReferenceSolution {
    /// Wraps a user-supplied reference direction.
    pub fn from_direction(theta: Vec<f64>) -> Result<Self> {
        let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::DegenerateReference("reference vector has zero or non-finite norm".into()));
        }
        let mbm_star = theta.iter().map(|v| v / norm).collect();
        Ok(ReferenceSolution { theta_star: theta, mbm_star })
    }
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix; eigenvalues below
/// `PINV_RCOND * max_eigenvalue` are dropped.
pub fn pseudo_inverse_sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let cutoff = PINV_RCOND * max;
    let inv_vals = eig.eigenvalues.map(|v| if v > cutoff { 1.0 / v } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose()
}

/// Mean-centred sample covariance with `1/n` normalisation.
pub fn sample_covariance(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let mean = x.row_mean();
    let mut centred = x.clone();
    for mut row in centred.row_iter_mut() {
        row -= &mean;
    }
    centred.transpose() * centred / n
}

/// `theta_star = pinv(Cov(X)) X^T y` and its normalisation.
pub fn reference_solution(data: &Dataset) -> Result<ReferenceSolution> {
    let y = DVector::from_column_slice(data.y());
    let xty = data.x().transpose() * y;
    if xty.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateReference("X^T y is the zero vector (no class signal)".into()));
    }
    let theta = pseudo_inverse_sym(&sample_covariance(data.x())) * xty;
    ReferenceSolution::from_direction(theta.iter().copied().collect())
}

/// Reference computed from the noise-free version of a toy configuration.
pub fn generative_reference(config: &ToyConfig) -> Result<ReferenceSolution> {
    reference_solution(&generate_toy(&config.noiseless())?)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file)
}

/// Parses the `x1,...,xp,y` format from any reader.
pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(Error::Parse { line: 1, message: "no samples".into() }),
        Some(r) => r.map_err(|e| csv_error(e, 1))?,
    };
    let p = header.len().saturating_sub(1);
    let header_ok = p >= 1
        && header.iter().take(p).enumerate().all(|(j, h)| h == format!("x{}", j + 1))
        && &header[p] == "y";
    if !header_ok {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header x1,...,xp,y, found {:?}", header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut values = Vec::new();
    let mut y = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(e, 0))?;
        let line = rec.position().map_or(0, |pos| pos.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != p + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", p + 1, rec.len()),
            });
        }
        for field in rec.iter().take(p) {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { line, message: format!("non-finite value {field:?}") });
            }
            values.push(v);
        }
        let label: f64 = rec[p].parse().map_err(|_| Error::Parse {
            line,
            message: format!("cannot parse label {:?}", &rec[p]),
        })?;
        if label != 1.0 && label != -1.0 {
            return Err(Error::Parse { line, message: format!("label {} is not -1 or +1", &rec[p]) });
        }
        y.push(label);
    }
    if y.is_empty() {
        return Err(Error::Parse { line: 2, message: "no samples".into() });
    }
    let x = DMatrix::from_row_slice(y.len(), p, &values);
    Dataset::new(x, y).map_err(|e| Error::Parse { line: 0, message: e.to_string() })
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_csv(data, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Floats are written in shortest round-trip form, so a reload is exact.
pub fn write_csv<W: Write>(data: &Dataset, w: &mut W) -> std::io::Result<()> {
    let header: Vec<String> = (1..=data.p()).map(|j| format!("x{j}")).chain(["y".into()]).collect();
    writeln!(w, "{}", header.join(","))?;
    for i in 0..data.n() {
        for j in 0..data.p() {
            write!(w, "{},", data.x[(i, j)])?;
        }
        writeln!(w, "{}", data.y[i])?;
    }
    Ok(())
}
