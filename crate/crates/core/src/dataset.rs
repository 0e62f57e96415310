//! Point datasets: CSV ingestion, synthetic generators and Euclidean
//! distances.
//!
//! A [`Dataset`] is an immutable dense `n × d` matrix stored row-major. Row
//! order defines the point index used by every [`Labeling`].

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::labeling::Labeling;

/// Angular extent of every spiral arm, in radians.
const SPIRAL_ARM_EXTENT: f64 = 2.5 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    #[default]
    Comma,
    /// Any run of spaces or tabs.
    Whitespace,
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub has_header: bool,
    pub delimiter: Delimiter,
    /// Treat the first column as a row identifier instead of a coordinate.
    pub id_column: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    points: Vec<f64>,
    point_ids: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from row-major coordinates.
    pub fn from_flat(n: usize, d: usize, points: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptyInput(format!(
                "dataset must have n >= 1 and d >= 1 (got n={n}, d={d})"
            )));
        }
        if points.len() != n * d {
            return Err(Error::Dimension {
                expected: n * d,
                found: points.len(),
            });
        }
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line: pos / d + 1,
                message: format!("non-finite coordinate in column {}", pos % d + 1),
            });
        }
        Ok(Self {
            n,
            d,
            points,
            point_ids: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        let mut points = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::Dimension {
                    expected: d,
                    found: row.len(),
                });
            }
            points.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), d, points)
    }

    pub fn with_point_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: ids.len(),
            });
        }
        self.point_ids = Some(ids);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn point_ids(&self) -> Option<&[String]> {
        self.point_ids.as_deref()
    }

    /// Hex SHA-256 over the shape and the raw coordinate bits.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        hasher.update((self.d as u64).to_le_bytes());
        for v in &self.points {
            hasher.update(v.to_bits().to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Concatenates the rows of `other` below `self`.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.d != other.d {
            return Err(Error::Dimension {
                expected: self.d,
                found: other.d,
            });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Dataset::from_flat(self.n + other.n, self.d, points)
    }

    /// Writes the coordinates as comma separated rows without a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_csv(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }
}

pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Dataset> {
    load_csv_with(
        path,
        &CsvOptions {
            has_header,
            ..CsvOptions::default()
        },
    )
}

pub fn load_csv_with(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, options).map_err(|e| match e {
        Error::Csv(inner) if inner.is_io_error() => {
            Error::io(path, std::io::Error::other(inner.to_string()))
        }
        other => other,
    })
}

/// Parses a numeric table from any reader.
pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    match options.delimiter {
        Delimiter::Comma => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(reader);
            for record in rdr.records() {
                let record = record?;
                let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
                if record.len() == 1 && record[0].is_empty() {
                    continue;
                }
                rows.push((line, record.iter().map(str::to_owned).collect()));
            }
        }
        Delimiter::Whitespace => {
            for (idx, line) in BufReader::new(reader).lines().enumerate() {
                let line = line.map_err(|e| Error::io("<input>", e))?;
                let cells: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
                if !cells.is_empty() {
                    rows.push((idx + 1, cells));
                }
            }
        }
    }
    if options.has_header && !rows.is_empty() {
        rows.remove(0);
    }
    let Some((_, first)) = rows.first() else {
        return Err(Error::EmptyInput("no data rows".into()));
    };
    let width = first.len();
    let skip = usize::from(options.id_column);
    if width <= skip {
        return Err(Error::Format {
            line: rows[0].0,
            message: "row has no coordinate columns".into(),
        });
    }
    let d = width - skip;
    let mut points = Vec::with_capacity(rows.len() * d);
    let mut ids = Vec::new();
    for (line, cells) in &rows {
        if cells.len() != width {
            return Err(Error::Format {
                line: *line,
                message: format!("expected {width} columns, found {}", cells.len()),
            });
        }
        if options.id_column {
            ids.push(cells[0].clone());
        }
        for (col, cell) in cells.iter().enumerate().skip(skip) {
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                line: *line,
                message: format!("column {}: {cell:?} is not a number", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("column {}: non-finite value", col + 1),
                });
            }
            points.push(value);
        }
    }
    let ds = Dataset::from_flat(rows.len(), d, points)?;
    if options.id_column {
        ds.with_point_ids(ids)
    } else {
        Ok(ds)
    }
}

fn normal(sd: f64) -> Result<Option<Normal<f64>>> {
    if !sd.is_finite() || sd < 0.0 {
        return Err(Error::Parameter(format!(
            "standard deviation must be finite and >= 0, got {sd}"
        )));
    }
    if sd == 0.0 {
        Ok(None)
    } else {
        Normal::new(0.0, sd)
            .map(Some)
            .map_err(|e| Error::Parameter(e.to_string()))
    }
}

/// Interleaved Archimedean spiral arms in the plane.
///
/// Arm `a` follows `r = 1 + θ` at polar angle `θ + 2πa/arms` for
/// `θ ∈ [0, 2.5π]`, sampled at `n_per_arm` equally spaced angles, then
/// jittered with isotropic Gaussian noise. Points are ordered arm by arm.
pub fn synth_spiral(n_per_arm: usize, arms: usize, noise_sd: f64, seed: u64) -> Result<Dataset> {
    if n_per_arm == 0 || arms == 0 {
        return Err(Error::Parameter(
            "spiral needs n_per_arm >= 1 and arms >= 1".into(),
        ));
    }
    let jitter = normal(noise_sd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(2 * n_per_arm * arms);
    for arm in 0..arms {
        let offset = std::f64::consts::TAU * arm as f64 / arms as f64;
        for i in 0..n_per_arm {
            let t = if n_per_arm == 1 {
                0.0
            } else {
                i as f64 / (n_per_arm - 1) as f64
            };
            let theta = t * SPIRAL_ARM_EXTENT;
            let r = 1.0 + theta;
            let (mut x, mut y) = (r * (theta + offset).cos(), r * (theta + offset).sin());
            if let Some(dist) = &jitter {
                x += dist.sample(&mut rng);
                y += dist.sample(&mut rng);
            }
            points.push(x);
            points.push(y);
        }
    }
    Dataset::from_flat(n_per_arm * arms, 2, points)
}

/// Ground truth for [`synth_spiral`]: arm index per point.
pub fn spiral_arm_labels(n_per_arm: usize, arms: usize) -> Labeling {
    Labeling::new(
        (0..arms)
            .flat_map(|a| std::iter::repeat_n(a as u32, n_per_arm))
            .collect(),
    )
}

/// Isotropic Gaussian blobs, `n_per_center` samples around each center,
/// ordered center by center. Returns the generating center index per point
/// alongside.
pub fn synth_blobs(
    centers: &[Vec<f64>],
    n_per_center: usize,
    sd: f64,
    seed: u64,
) -> Result<(Dataset, Labeling)> {
    let Some(first) = centers.first() else {
        return Err(Error::EmptyInput("no blob centers".into()));
    };
    if n_per_center == 0 {
        return Err(Error::Parameter("n_per_center must be >= 1".into()));
    }
    let d = first.len();
    if let Some(bad) = centers.iter().find(|c| c.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            found: bad.len(),
        });
    }
    let jitter = normal(sd)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(centers.len() * n_per_center * d);
    let mut truth = Vec::with_capacity(centers.len() * n_per_center);
    for (ci, center) in centers.iter().enumerate() {
        for _ in 0..n_per_center {
            for &c in center {
                let noise = jitter.as_ref().map_or(0.0, |dist| dist.sample(&mut rng));
                points.push(c + noise);
            }
            truth.push(ci as u32);
        }
    }
    let ds = Dataset::from_flat(centers.len() * n_per_center, d, points)?;
    Ok((ds, Labeling::new(truth)))
}

/// Appends `n_noise` points drawn uniformly from the bounding box of `ds`
/// enlarged by `margin` on every side.
pub fn add_uniform_noise(ds: &Dataset, n_noise: usize, margin: f64, seed: u64) -> Result<Dataset> {
    if n_noise == 0 {
        return Ok(ds.clone());
    }
    let d = ds.d();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in ds.points() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_noise * d);
    for _ in 0..n_noise {
        for k in 0..d {
            let (a, b) = (lo[k] - margin, hi[k] + margin);
            points.push(if b > a { rng.random_range(a..b) } else { a });
        }
    }
    ds.concat(&Dataset::from_flat(n_noise, d, points)?)
}

/// Dense symmetric `n × n` matrix of non-negative dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry, zero diagonal and non-negative finite entries.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: data.len(),
            });
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::Validation(format!(
                    "distance matrix diagonal entry {i} is not zero"
                )));
            }
            for j in (i + 1)..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 || v != data[j * n + i] {
                    return Err(Error::Validation(format!(
                        "distance matrix entry ({i},{j}) is negative, non-finite or asymmetric"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub(crate) fn from_vec_unchecked(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn pairwise_distances(ds: &Dataset) -> DistanceMatrix {
    let n = ds.n();
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let p = ds.point(i);
        for (j, out) in row.iter_mut().enumerate() {
            if j != i {
                *out = euclidean(p, ds.point(j));
            }
        }
    });
    DistanceMatrix::from_vec_unchecked(n, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, options: &CsvOptions) -> Result<Dataset> {
        read_csv(text.as_bytes(), options)
    }

    #[test]
    fn parses_three_rows() {
        let ds = parse("0,0\n1,0\n0,1", &CsvOptions::default()).unwrap();
        assert_eq!((ds.n(), ds.d()), (3, 2));
        assert_eq!(ds.point(2), &[0.0, 1.0]);
    }

    #[test]
    fn header_and_whitespace() {
        let opts = CsvOptions {
            has_header: true,
            delimiter: Delimiter::Whitespace,
            id_column: false,
        };
        let ds = parse("x y\n1 2\n3\t4\n", &opts).unwrap();
        assert_eq!(ds.as_flat(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn id_column_is_kept_apart() {
        let opts = CsvOptions {
            id_column: true,
            ..Default::default()
        };
        let ds = parse("a,1,2\nb,3,4\n", &opts).unwrap();
        assert_eq!(ds.d(), 2);
        assert_eq!(ds.point_ids().unwrap(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn non_numeric_cell_reports_line() {
        match parse("1,x\n", &CsvOptions::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match parse("0,0\n1,nan\n", &CsvOptions::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_report_line() {
        match parse("0,0\n1,2,3\n", &CsvOptions::default()) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            parse("", &CsvOptions::default()),
            Err(Error::EmptyInput(_))
        ));
        let header_only = CsvOptions {
            has_header: true,
            ..Default::default()
        };
        assert!(matches!(
            parse("a,b\n", &header_only),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn missing_file_is_io() {
        let err = load_csv("/definitely/not/here.csv", false).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn csv_round_trip() {
        let ds = synth_spiral(10, 2, 0.3, 5).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let back = parse(std::str::from_utf8(&buf).unwrap(), &CsvOptions::default()).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn spiral_shapes() {
        let ds = synth_spiral(104, 3, 0.0, 7).unwrap();
        assert_eq!((ds.n(), ds.d()), (312, 2));
        let one = synth_spiral(1, 1, 0.0, 0).unwrap();
        assert_eq!(one.point(0), &[1.0, 0.0]);
        assert_eq!(
            synth_spiral(50, 2, 0.1, 42).unwrap(),
            synth_spiral(50, 2, 0.1, 42).unwrap()
        );
        assert_ne!(
            synth_spiral(50, 2, 0.1, 42).unwrap(),
            synth_spiral(50, 2, 0.1, 43).unwrap()
        );
        assert!(synth_spiral(0, 3, 0.0, 0).is_err());
        assert!(synth_spiral(3, 3, -1.0, 0).is_err());
    }

    #[test]
    fn blobs() {
        let centers = vec![vec![0.0, 0.0], vec![10.0, 10.0]];
        let (ds, truth) = synth_blobs(&centers, 5, 0.01, 1).unwrap();
        assert_eq!(ds.n(), 10);
        assert_eq!(truth.labels(), &[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        let (exact, _) = synth_blobs(&centers, 3, 0.0, 1).unwrap();
        assert_eq!(exact.point(4), &[10.0, 10.0]);
        assert_eq!(
            synth_blobs(&centers, 5, 0.5, 9).unwrap(),
            synth_blobs(&centers, 5, 0.5, 9).unwrap()
        );
        let bad = vec![vec![0.0, 0.0], vec![1.0]];
        assert!(matches!(
            synth_blobs(&bad, 2, 0.1, 0),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn uniform_noise_stays_in_box() {
        let (ds, _) = synth_blobs(&[vec![0.0, 0.0], vec![4.0, 2.0]], 20, 0.1, 3).unwrap();
        let noisy = add_uniform_noise(&ds, 50, 1.0, 4).unwrap();
        assert_eq!(noisy.n(), 90);
        for p in noisy.points().skip(40) {
            assert!(p[0] > -2.0 && p[0] < 6.0 && p[1] > -2.0 && p[1] < 4.0);
        }
    }

    #[test]
    fn three_four_five() {
        let ds = Dataset::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let dm = pairwise_distances(&ds);
        assert_eq!(dm.get(0, 1), 5.0);
        assert_eq!(dm.get(1, 0), 5.0);
        assert_eq!(dm.get(1, 1), 0.0);
    }

    #[test]
    fn distances_match_independent_loop() {
        let (ds, _) =
            synth_blobs(&[vec![0.0, 1.0, 2.0], vec![3.0, -1.0, 0.5]], 3, 1.0, 11).unwrap();
        let dm = pairwise_distances(&ds);
        for i in 0..6 {
            for j in 0..6 {
                let mut acc = 0.0;
                for k in 0..3 {
                    let diff = ds.as_flat()[i * 3 + k] - ds.as_flat()[j * 3 + k];
                    acc += diff * diff;
                }
                assert!((dm.get(i, j) - acc.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fingerprint_changes_with_data() {
        let a = Dataset::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let b = Dataset::from_rows(&[vec![0.0, 1.0]]).unwrap();
        assert_eq!(a.fingerprint().len(), 64);
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn rejects_bad_distance_matrix() {
        assert!(DistanceMatrix::from_vec(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DistanceMatrix::from_vec(2, vec![1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(DistanceMatrix::from_vec(2, vec![0.0, 1.0, 1.0, 0.0]).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn distance_matrix_is_a_metric(rows in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3), 1..20)) {
                let ds = Dataset::from_rows(&rows).unwrap();
                let dm = pairwise_distances(&ds);
                let n = ds.n();
                for i in 0..n {
                    prop_assert_eq!(dm.get(i, i), 0.0);
                    for j in 0..n {
                        prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                        for k in 0..n {
                            prop_assert!(dm.get(i, k) <= dm.get(i, j) + dm.get(j, k) + 1e-9);
                        }
                    }
                }
            }
        }
    }
}
