//! Partition agreement: Rand index, adjusted Rand index and
//! cross-tabulation.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;

/// A labelling of `n` items. Label values are arbitrary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition(Vec<i64>);

impl Partition {
    pub fn new(labels: Vec<i64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("a partition needs at least one item".into()));
        }
        Ok(Self(labels))
    }

    /// From 1-based component labels such as MAP classifications.
    pub fn from_usize(labels: &[usize]) -> Result<Self> {
        Self::new(labels.iter().map(|&l| l as i64).collect())
    }

    pub fn labels(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Distinct labels in order of first appearance, and each item's index
/// into that list.
fn encode(labels: &[i64]) -> (Vec<i64>, Vec<usize>) {
    let mut seen: HashMap<i64, usize> = HashMap::new();
    let mut order = Vec::new();
    let codes = labels
        .iter()
        .map(|&l| {
            *seen.entry(l).or_insert_with(|| {
                order.push(l);
                order.len() - 1
            })
        })
        .collect();
    (order, codes)
}

/// Counts `n_ij` of items with label `i` in `rows` and `j` in `cols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub row_labels: Vec<i64>,
    pub col_labels: Vec<i64>,
    /// Row-major, `row_labels.len() x col_labels.len()`.
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.col_labels.len())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.row_totals().iter().sum()
    }

    /// Comma-separated rendering with a header of column labels.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("truth");
        for c in &self.col_labels {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.counts) {
            out.push_str(&label.to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ContingencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut cells: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["truth\\pred".to_string()];
        header.extend(self.col_labels.iter().map(|c| c.to_string()));
        cells.push(header);
        for (label, row) in self.row_labels.iter().zip(&self.counts) {
            let mut line = vec![label.to_string()];
            line.extend(row.iter().map(|v| v.to_string()));
            cells.push(line);
        }
        let widths: Vec<usize> = (0..cells[0].len())
            .map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(0))
            .collect();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(j, (c, w))| if j == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            writeln!(f, "{}", line.join("  "))?;
        }
        Ok(())
    }
}

fn check_lengths(a: &Partition, b: &Partition) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Cross-tabulation with rows and columns ordered by first appearance.
pub fn cross_tab(truth: &Partition, pred: &Partition) -> Result<ContingencyTable> {
    check_lengths(truth, pred)?;
    let (row_labels, rows) = encode(truth.labels());
    let (col_labels, cols) = encode(pred.labels());
    let mut counts = vec![vec![0u64; col_labels.len()]; row_labels.len()];
    for (&r, &c) in rows.iter().zip(&cols) {
        counts[r][c] += 1;
    }
    Ok(ContingencyTable {
        row_labels,
        col_labels,
        counts,
    })
}

fn pairs(k: u64) -> i128 {
    let k = k as i128;
    k * (k - 1) / 2
}

struct PairCounts {
    /// `sum_ij C(n_ij, 2)`
    index: i128,
    /// `sum_i C(a_i, 2)`
    rows: i128,
    /// `sum_j C(b_j, 2)`
    cols: i128,
    /// `C(n, 2)`
    total: i128,
}

fn pair_counts(a: &Partition, b: &Partition) -> Result<PairCounts> {
    let table = cross_tab(a, b)?;
    Ok(PairCounts {
        index: table.counts.iter().flatten().map(|&v| pairs(v)).sum(),
        rows: table.row_totals().into_iter().map(pairs).sum(),
        cols: table.col_totals().into_iter().map(pairs).sum(),
        total: pairs(table.total()),
    })
}

/// Share of item pairs on which the two partitions agree. With a single
/// item there are no pairs and the index is 1.
pub fn rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    let c = pair_counts(a, b)?;
    if c.total == 0 {
        return Ok(1.0);
    }
    // agreements = C(n,2) + 2 sum C(n_ij,2) - sum C(a_i,2) - sum C(b_j,2)
    let agree = c.total + 2 * c.index - c.rows - c.cols;
    Ok(agree as f64 / c.total as f64)
}

/// Adjusted Rand index together with a flag that is set when the index is
/// undefined (both partitions trivial in the same way) and 0 was returned.
pub fn adjusted_rand_index_detailed(a: &Partition, b: &Partition) -> Result<(f64, bool)> {
    let c = pair_counts(a, b)?;
    // Multiply numerator and denominator by C(n,2) to stay in integers.
    let num = 2 * (c.index * c.total - c.rows * c.cols);
    let den = (c.rows + c.cols) * c.total - 2 * c.rows * c.cols;
    if den == 0 {
        return Ok((0.0, true));
    }
    Ok((num as f64 / den as f64, false))
}

/// Adjusted Rand index of Hubert and Arabie.
pub fn adjusted_rand_index(a: &Partition, b: &Partition) -> Result<f64> {
    adjusted_rand_index_detailed(a, b).map(|(v, _)| v)
}
