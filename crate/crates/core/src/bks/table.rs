//! Outcome tables and the two independent non-colourability checks on them:
//! the parity count and an explicit backtracking search.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::atlas::{Atlas, DIM};
use crate::error::{Error, Result};
use crate::pauli::Sign;

use super::measurement::{outcomes_of, HybridMeasurement};

/// Reference label grid for the bundled eleven-row scheme, row-major.
pub const FIG2_LABEL_GRID: [[usize; DIM]; 11] = [
    [1, 2, 3, 4, 5, 6, 7, 8],
    [9, 10, 11, 12, 5, 13, 14, 8],
    [15, 16, 17, 18, 6, 13, 19, 8],
    [20, 21, 22, 23, 7, 14, 19, 8],
    [20, 24, 25, 23, 3, 26, 27, 4],
    [9, 28, 11, 29, 22, 23, 25, 30],
    [15, 31, 17, 32, 21, 23, 24, 30],
    [1, 3, 33, 26, 16, 31, 17, 34],
    [9, 28, 10, 35, 17, 18, 32, 34],
    [9, 35, 29, 12, 1, 4, 36, 26],
    [1, 2, 3, 4, 33, 36, 26, 27],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableCell {
    pub signs: [Sign; 3],
    pub ray_id: usize,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub measurement: HybridMeasurement,
    pub cells: [TableCell; DIM],
}

impl TableRow {
    pub fn labels(&self) -> [usize; DIM] {
        self.cells.map(|c| c.label)
    }

    pub fn cell_of_ray(&self, ray_id: usize) -> Option<usize> {
        self.cells.iter().position(|c| c.ray_id == ray_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasurementTable {
    pub rows: Vec<TableRow>,
    /// ray id -> outcome label
    pub labels: BTreeMap<usize, usize>,
}

impl MeasurementTable {
    pub fn label_grid(&self) -> Vec<[usize; DIM]> {
        self.rows.iter().map(TableRow::labels).collect()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of cells carrying each label.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for row in &self.rows {
            for c in &row.cells {
                *m.entry(c.label).or_insert(0) += 1;
            }
        }
        m
    }
}

/// Builds the outcome table, numbering distinct rays by first occurrence in
/// row-major order starting from 1.
pub fn generate_table(atlas: &Atlas, scheme: &[HybridMeasurement]) -> Result<MeasurementTable> {
    if scheme.is_empty() {
        return Err(Error::usage("a table needs at least one measurement"));
    }
    let mut labels = BTreeMap::new();
    let mut rows = Vec::with_capacity(scheme.len());
    for m in scheme {
        let outcomes = outcomes_of(atlas, m)?;
        let cells = outcomes.map(|o| {
            let next = labels.len() + 1;
            let label = *labels.entry(o.ray_id).or_insert(next);
            TableCell {
                signs: o.signs,
                ray_id: o.ray_id,
                label,
            }
        });
        rows.push(TableRow {
            measurement: *m,
            cells,
        });
    }
    Ok(MeasurementTable { rows, labels })
}

/// First cell where `grid` differs from `reference`, as (row, col, got, want).
/// Row-count mismatches are reported at column 0 with a 0 placeholder.
pub fn first_grid_mismatch(
    grid: &[[usize; DIM]],
    reference: &[[usize; DIM]],
) -> Option<(usize, usize, usize, usize)> {
    for r in 0..grid.len().max(reference.len()) {
        match (grid.get(r), reference.get(r)) {
            (Some(g), Some(w)) => {
                if let Some(c) = (0..DIM).find(|&c| g[c] != w[c]) {
                    return Some((r, c, g[c], w[c]));
                }
            }
            (g, w) => return Some((r, 0, g.map_or(0, |g| g[0]), w.map_or(0, |w| w[0]))),
        }
    }
    None
}

/// Labels assigned the value 1; every other label is 0.
pub type Witness = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityVerdict {
    pub row_count: usize,
    /// multiplicity -> number of distinct outcomes with that multiplicity
    pub multiplicity_histogram: BTreeMap<usize, usize>,
    pub is_contradiction: bool,
    /// Filled by the backtracking search when parity does not already rule
    /// out an assignment. `None` for contradictions, and for the rare
    /// non-contradictions that are nonetheless unsatisfiable.
    pub witness: Option<Witness>,
}

/// Odd number of rows with every outcome occurring an even number of times
/// means no 0/1 assignment with exactly one 1 per row exists.
pub fn parity_check(table: &MeasurementTable) -> ParityVerdict {
    let mut histogram = BTreeMap::new();
    for count in table.multiplicities().into_values() {
        *histogram.entry(count).or_insert(0) += 1;
    }
    let row_count = table.rows.len();
    let is_contradiction = row_count % 2 == 1 && histogram.keys().all(|m| m % 2 == 0);
    let witness = if is_contradiction {
        None
    } else {
        match search_assignment(table) {
            SearchOutcome::Witness(w) => Some(w),
            SearchOutcome::Exhausted { .. } => None,
        }
    };
    ParityVerdict {
        row_count,
        multiplicity_histogram: histogram,
        is_contradiction,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOutcome {
    Witness(Witness),
    Exhausted { nodes: usize },
}

impl SearchOutcome {
    pub fn is_exhausted(&self) -> bool {
        matches!(self, SearchOutcome::Exhausted { .. })
    }
}

struct Search<'a> {
    rows: Vec<[usize; DIM]>,
    value: &'a mut BTreeMap<usize, bool>,
    nodes: usize,
}

impl Search<'_> {
    fn solve(&mut self, row: usize) -> bool {
        self.nodes += 1;
        let Some(labels) = self.rows.get(row).copied() else {
            return true;
        };
        let ones = labels
            .iter()
            .filter(|l| self.value.get(l) == Some(&true))
            .count();
        match ones {
            0 => {}
            1 => {
                let forced = self.force_zero(&labels, None);
                if self.solve(row + 1) {
                    return true;
                }
                self.undo(&forced);
                return false;
            }
            _ => return false,
        }
        for &pick in &labels {
            if self.value.contains_key(&pick) {
                continue;
            }
            self.value.insert(pick, true);
            let forced = self.force_zero(&labels, Some(pick));
            if self.solve(row + 1) {
                return true;
            }
            self.undo(&forced);
            self.value.remove(&pick);
        }
        false
    }

    fn force_zero(&mut self, labels: &[usize], keep: Option<usize>) -> Vec<usize> {
        let mut forced = Vec::new();
        for &l in labels {
            if Some(l) != keep && !self.value.contains_key(&l) {
                self.value.insert(l, false);
                forced.push(l);
            }
        }
        forced
    }

    fn undo(&mut self, forced: &[usize]) {
        for l in forced {
            self.value.remove(l);
        }
    }
}

/// Backtracking over 0/1 values per label with exactly one 1 per row. Rows
/// are visited in order and cells left to right, so witnesses are deterministic.
pub fn search_assignment(table: &MeasurementTable) -> SearchOutcome {
    let mut value = BTreeMap::new();
    let mut search = Search {
        rows: table.label_grid(),
        value: &mut value,
        nodes: 0,
    };
    if search.solve(0) {
        SearchOutcome::Witness(
            value
                .into_iter()
                .filter(|&(_, v)| v)
                .map(|(l, _)| l)
                .collect(),
        )
    } else {
        SearchOutcome::Exhausted {
            nodes: search.nodes,
        }
    }
}

/// True when `witness` puts exactly one 1 in every row.
pub fn witness_is_valid(table: &MeasurementTable, witness: &Witness) -> bool {
    table
        .label_grid()
        .iter()
        .all(|row| row.iter().filter(|l| witness.contains(l)).count() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bks::scheme::{fig2_scheme, parse_measurement};

    fn table(lines: &[&str]) -> MeasurementTable {
        let atlas = Atlas::standard();
        let scheme: Vec<_> = lines
            .iter()
            .map(|l| parse_measurement(atlas.pentagram(), l).unwrap())
            .collect();
        generate_table(&atlas, &scheme).unwrap()
    }

    #[test]
    fn reference_grid_multiplicities() {
        let mut counts = BTreeMap::new();
        for row in FIG2_LABEL_GRID {
            for l in row {
                *counts.entry(l).or_insert(0usize) += 1;
            }
        }
        assert_eq!(counts.len(), 36);
        let fours: Vec<usize> = counts
            .iter()
            .filter(|(_, &c)| c == 4)
            .map(|(&l, _)| l)
            .collect();
        assert_eq!(fours, vec![1, 3, 4, 8, 9, 17, 23, 26]);
        assert_eq!(counts.values().filter(|&&c| c == 2).count(), 28);
    }

    #[test]
    fn bundled_scheme_reproduces_reference_grid() {
        let atlas = Atlas::standard();
        let t = generate_table(&atlas, &fig2_scheme(atlas.pentagram())).unwrap();
        assert_eq!(first_grid_mismatch(&t.label_grid(), &FIG2_LABEL_GRID), None);
        assert_eq!(t.label_count(), 36);
    }

    #[test]
    fn single_pure_row_is_labelled_one_to_eight() {
        let t = table(&["E1-E1"]);
        assert_eq!(t.label_grid(), vec![[1, 2, 3, 4, 5, 6, 7, 8]]);
        let verdict = parity_check(&t);
        assert!(!verdict.is_contradiction);
        assert_eq!(verdict.multiplicity_histogram, BTreeMap::from([(1, 8)]));
        assert!(verdict.witness.is_some());
        assert!(!search_assignment(&t).is_exhausted());
    }

    #[test]
    fn degenerate_row_after_e1_e5_shares_first_four_labels() {
        let t = table(&["A | E5 {B,C} ; E1 {z1,z2}", "A | E5 {B,C} ; E5 {B,C}"]);
        assert_eq!(&t.label_grid()[1][..4], &[1, 2, 3, 4]);
    }

    #[test]
    fn duplicated_rows_are_satisfiable() {
        let t = table(&["E1-E5-", "E1-E5-"]);
        let SearchOutcome::Witness(w) = search_assignment(&t) else {
            panic!("expected witness");
        };
        assert!(witness_is_valid(&t, &w));
    }

    #[test]
    fn mismatch_locator() {
        let mut grid = FIG2_LABEL_GRID.to_vec();
        assert_eq!(first_grid_mismatch(&grid, &FIG2_LABEL_GRID), None);
        grid[3][5] = 99;
        assert_eq!(
            first_grid_mismatch(&grid, &FIG2_LABEL_GRID),
            Some((3, 5, 99, 14))
        );
        grid.truncate(2);
        assert_eq!(first_grid_mismatch(&grid, &FIG2_LABEL_GRID).unwrap().0, 2);
    }
}
