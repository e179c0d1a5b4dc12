//! Dataset generation and ingestion.
//!
//! Synthetic sources: `gaussian_ring` (Gaussian blobs with means on a
//! circle) and `random_weight_matrix` (Gaussian edge weights or squared
//! distances of uniform points). File formats: points CSV with an optional
//! trailing integer `label` column, the plain-text weight-matrix format
//! (first line n, then n whitespace-separated rows), and MNIST IDX with
//! thresholded binarization. All generators draw from purpose-specific
//! substreams of the master seed, so outputs are reproducible bit-for-bit.

use std::fs::File;
use std::io::{BufReader, ErrorKind, Read};
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::partition::Partition;
use crate::rng::{self, stream};

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// Points with optional ground-truth labels.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Option<Vec<usize>>,
    pub name: String,
}

impl LabeledDataset {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Ground-truth labels as a `Partition` (k = max label + 1), when labels
    /// are present.
    pub fn label_partition(&self) -> Result<Option<Partition>> {
        match &self.labels {
            None => Ok(None),
            Some(labels) => {
                let k = labels.iter().max().map_or(0, |m| m + 1);
                Ok(Some(Partition::new(labels.clone(), k)?))
            }
        }
    }
}

/// `clusters` isotropic Gaussians of `per_cluster` 2-D points each, with
/// mean c at angle 2πc/clusters on a circle of the given radius and standard
/// deviation `sigma` per coordinate. Labels record the generating cluster.
pub fn gaussian_ring(
    clusters: usize,
    per_cluster: usize,
    sigma: f64,
    radius: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if clusters < 1 || per_cluster < 1 {
        return Err(Error::invalid(
            "gaussian_ring requires clusters >= 1 and per_cluster >= 1",
        ));
    }
    if !sigma.is_finite() || sigma < 0.0 || !radius.is_finite() || radius < 0.0 {
        return Err(Error::invalid(
            "gaussian_ring requires sigma >= 0 and radius >= 0",
        ));
    }
    let mut gen_rng = rng::substream(seed, stream::RING);
    let mut points = Vec::with_capacity(clusters * per_cluster);
    let mut labels = Vec::with_capacity(clusters * per_cluster);
    for c in 0..clusters {
        let angle = 2.0 * std::f64::consts::PI * c as f64 / clusters as f64;
        let (mx, my) = (radius * angle.cos(), radius * angle.sin());
        for _ in 0..per_cluster {
            let zx: f64 = gen_rng.sample(StandardNormal);
            let zy: f64 = gen_rng.sample(StandardNormal);
            points.push(vec![mx + sigma * zx, my + sigma * zy]);
            labels.push(c);
        }
    }
    Ok(LabeledDataset {
        points,
        labels: Some(labels),
        name: format!("gaussian-ring-{clusters}x{per_cluster}"),
    })
}

/// Weight-matrix families for the random benchmark instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFamily {
    /// i.i.d. N(0,1) on each pair i < j, zero diagonal; weights may be
    /// negative.
    GaussianWeights,
    /// Squared distances of n points uniform on [0,1]^d.
    EuclideanUniform(usize),
}

pub fn random_weight_matrix(n: usize, family: WeightFamily, seed: u64) -> Result<SymMatrix> {
    if n < 2 {
        return Err(Error::invalid("random_weight_matrix requires n >= 2"));
    }
    let mut gen_rng = rng::substream(seed, stream::WEIGHTS);
    match family {
        WeightFamily::GaussianWeights => {
            let mut m = SymMatrix::zeros(n);
            for i in 0..n {
                for j in (i + 1)..n {
                    m.set(i, j, gen_rng.sample(StandardNormal));
                }
            }
            Ok(m)
        }
        WeightFamily::EuclideanUniform(d) => {
            if d < 1 {
                return Err(Error::invalid("EuclideanUniform requires dimension >= 1"));
            }
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| gen_rng.random::<f64>()).collect())
                .collect();
            crate::cluster::pairwise_sq_dist_weights(&points)
        }
    }
}

/// Writes points as CSV with a header `x0,…,x{d−1}[,label]`. Coordinates use
/// the shortest round-trip decimal form, so a save/load cycle is lossless.
pub fn save_points_csv(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    let d = ds.dim();
    if let Some(labels) = &ds.labels {
        if labels.len() != ds.points.len() {
            return Err(Error::dims(format!(
                "dataset has {} points but {} labels",
                ds.points.len(),
                labels.len()
            )));
        }
    }
    for j in 0..d {
        if j > 0 {
            out.push(',');
        }
        out.push_str(&format!("x{j}"));
    }
    if ds.labels.is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for (i, p) in ds.points.iter().enumerate() {
        for (j, v) in p.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        if let Some(labels) = &ds.labels {
            out.push_str(&format!(",{}", labels[i]));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a points CSV. A first line with any non-numeric field is taken as a
/// header; labels are expected exactly when such a header ends in `label`.
/// Malformed rows are reported with their line number.
pub fn load_points_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let file = File::open(path.as_ref())?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    let mut records: Vec<(u64, csv::StringRecord)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Format(format!("csv: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec));
    }
    if records.is_empty() {
        return Err(Error::Format("points file has no rows".into()));
    }

    let header = records[0]
        .1
        .iter()
        .any(|field| field.parse::<f64>().is_err());
    let labeled = header
        && records[0]
            .1
            .iter()
            .next_back()
            .is_some_and(|s| s.eq_ignore_ascii_case("label"));
    let data = if header { &records[1..] } else { &records[..] };
    if data.is_empty() {
        return Err(Error::Format("points file has a header but no rows".into()));
    }
    let cols = if header {
        records[0].1.len()
    } else {
        data[0].1.len()
    };
    let d = if labeled { cols - 1 } else { cols };
    if d == 0 {
        return Err(Error::Format("points file has no coordinate columns".into()));
    }

    let mut points = Vec::with_capacity(data.len());
    let mut labels = if labeled {
        Some(Vec::with_capacity(data.len()))
    } else {
        None
    };
    for (line, rec) in data {
        let line = *line as usize;
        if rec.len() != cols {
            return Err(Error::Parse {
                line,
                message: format!("expected {cols} columns, found {}", rec.len()),
            });
        }
        let mut p = Vec::with_capacity(d);
        for field in rec.iter().take(d) {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad coordinate '{field}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite coordinate '{field}'"),
                });
            }
            p.push(v);
        }
        if let Some(ls) = labels.as_mut() {
            let field = rec.get(cols - 1).unwrap_or("");
            let l: usize = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad label '{field}'"),
            })?;
            ls.push(l);
        }
        points.push(p);
    }
    let name = path
        .as_ref()
        .file_stem()
        .map_or_else(|| "points".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(LabeledDataset {
        points,
        labels,
        name,
    })
}

/// Writes the plain-text weight-matrix format: first line n, then n rows of
/// n whitespace-separated entries.
pub fn save_weight_matrix(m: &SymMatrix, path: impl AsRef<Path>) -> Result<()> {
    let n = m.n();
    let mut out = String::new();
    out.push_str(&format!("{n}\n"));
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&m.get(i, j).to_string());
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn load_weight_matrix(path: impl AsRef<Path>) -> Result<SymMatrix> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Format("weight file is empty".into()))?;
    let n: usize = first.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        message: format!("expected matrix size, found '{}'", first.trim()),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            message: "matrix size must be positive".into(),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let line_no = i + 2;
        let line = lines.next().ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected {n} matrix rows, file ends after {i}"),
        })?;
        let mut row = Vec::with_capacity(n);
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad entry '{tok}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite entry '{tok}'"),
                });
            }
            row.push(v);
        }
        if row.len() != n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {n} entries, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    for (extra, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(Error::Parse {
                line: n + 2 + extra,
                message: "unexpected content after matrix rows".into(),
            });
        }
    }
    SymMatrix::from_rows(&rows)
}

/// Loads a seeded subset of MNIST from the standard IDX pair: `per_digit`
/// examples of each requested digit, sampled without replacement, binarized
/// to {0,1} by `pixel > threshold`, flattened row-major. Labels are the
/// digits themselves.
pub fn load_mnist_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    digits: &[usize],
    per_digit: usize,
    threshold: u8,
    seed: u64,
) -> Result<LabeledDataset> {
    if digits.is_empty() {
        return Err(Error::invalid("load_mnist_idx requires at least one digit"));
    }
    if per_digit < 1 {
        return Err(Error::invalid("load_mnist_idx requires per_digit >= 1"));
    }
    let mut wanted = digits.to_vec();
    wanted.sort_unstable();
    if wanted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("duplicate digit requested"));
    }
    if wanted.iter().any(|&d| d > 9) {
        return Err(Error::invalid("digits must lie in 0..=9"));
    }

    let (pixels, rows, cols) = read_idx_images(images_path.as_ref())?;
    let labels = read_idx_labels(labels_path.as_ref())?;
    let count = labels.len();
    if pixels.len() != count * rows * cols {
        return Err(Error::Format(format!(
            "images file holds {} examples, labels file holds {count}",
            pixels.len() / (rows * cols)
        )));
    }

    let dim = rows * cols;
    let mut sel_rng = rng::substream(seed, stream::MNIST);
    let mut points = Vec::with_capacity(wanted.len() * per_digit);
    let mut out_labels = Vec::with_capacity(wanted.len() * per_digit);
    for &digit in &wanted {
        let pool: Vec<usize> = (0..count).filter(|&i| labels[i] as usize == digit).collect();
        if pool.len() < per_digit {
            return Err(Error::invalid(format!(
                "only {} examples of digit {digit}, need {per_digit}",
                pool.len()
            )));
        }
        let mut chosen: Vec<usize> = rand::seq::index::sample(&mut sel_rng, pool.len(), per_digit)
            .iter()
            .map(|i| pool[i])
            .collect();
        chosen.sort_unstable();
        for idx in chosen {
            let start = idx * dim;
            let v: Vec<f64> = pixels[start..start + dim]
                .iter()
                .map(|&p| if p > threshold { 1.0 } else { 0.0 })
                .collect();
            points.push(v);
            out_labels.push(digit);
        }
    }
    Ok(LabeledDataset {
        points,
        labels: Some(out_labels),
        name: format!("mnist-{}x{per_digit}", wanted.len()),
    })
}

fn read_idx_images(path: &Path) -> Result<(Vec<u8>, usize, usize)> {
    let mut f = BufReader::new(File::open(path)?);
    let magic = f.read_u32::<BigEndian>()?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::Format(format!(
            "images file magic {magic:#010x}, expected {IDX_IMAGES_MAGIC:#010x}"
        )));
    }
    let count = f.read_u32::<BigEndian>()? as usize;
    let rows = f.read_u32::<BigEndian>()? as usize;
    let cols = f.read_u32::<BigEndian>()? as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::Format("images file declares zero-sized images".into()));
    }
    let mut pixels = vec![0u8; count * rows * cols];
    read_exact_or_truncated(&mut f, &mut pixels, "images")?;
    expect_eof(&mut f, "images")?;
    Ok((pixels, rows, cols))
}

fn read_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let mut f = BufReader::new(File::open(path)?);
    let magic = f.read_u32::<BigEndian>()?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::Format(format!(
            "labels file magic {magic:#010x}, expected {IDX_LABELS_MAGIC:#010x}"
        )));
    }
    let count = f.read_u32::<BigEndian>()? as usize;
    let mut labels = vec![0u8; count];
    read_exact_or_truncated(&mut f, &mut labels, "labels")?;
    expect_eof(&mut f, "labels")?;
    Ok(labels)
}

fn read_exact_or_truncated(f: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    f.read_exact(buf).map_err(|e| {
        if e.kind() == ErrorKind::UnexpectedEof {
            Error::Format(format!(
                "{what} file truncated: shorter than its declared dimensions"
            ))
        } else {
            Error::Io(e)
        }
    })
}

fn expect_eof(f: &mut impl Read, what: &str) -> Result<()> {
    let mut probe = [0u8; 1];
    match f.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::Format(format!(
            "{what} file longer than its declared dimensions"
        ))),
    }
}
