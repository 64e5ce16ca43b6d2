//! The two-observer experiment: each run prepares a fresh |Ψ>, both parties
//! pick a row of the measurement menu and perform it on their own qubits.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::atlas::{Atlas, DIM};
use crate::bks::measurement::{cell_index, cell_signs, outcome_ray, HybridMeasurement};
use crate::bks::scheme::fig2_scheme;
use crate::bks::table::{generate_table, MeasurementTable};
use crate::error::{Error, Result};
use crate::pauli::{sign_string, Sign};

use super::rng::{RandomSource, Substream};
use super::state::{measure_observable, prepare_psi, project, Party, Probability, SixQubitState};

const ALICE_CHOICE_EVENT: u64 = 0;
const BOB_CHOICE_EVENT: u64 = 1;
const ALICE_FIRST_MEASUREMENT_EVENT: u64 = 2;
const BOB_FIRST_MEASUREMENT_EVENT: u64 = 5;

fn party_events(party: Party) -> u64 {
    match party {
        Party::Alice => ALICE_FIRST_MEASUREMENT_EVENT,
        Party::Bob => BOB_FIRST_MEASUREMENT_EVENT,
    }
}

/// Result of one party's three-step hybrid measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridOutcome {
    pub signs: [Sign; 3],
    pub cell: usize,
    pub ray_id: usize,
    pub probabilities: [Probability; 3],
    pub state: SixQubitState,
}

/// Pivot, then the branch pair in the order given by the measurement.
pub fn perform_hybrid(
    atlas: &Atlas,
    s: &SixQubitState,
    party: Party,
    m: &HybridMeasurement,
    stream: &mut Substream,
) -> Result<HybridOutcome> {
    let p = atlas.pentagram();
    let first = measure_observable(s, p.word(m.pivot()), party, stream)?;
    let (_, pair) = m.branch(first.sign);
    let second = measure_observable(&first.state, p.word(pair[0]), party, stream)?;
    let third = measure_observable(&second.state, p.word(pair[1]), party, stream)?;
    let signs = [first.sign, second.sign, third.sign];
    finish(
        atlas,
        party,
        m,
        signs,
        [first.probability, second.probability, third.probability],
        third.state,
    )
}

fn finish(
    atlas: &Atlas,
    party: Party,
    m: &HybridMeasurement,
    signs: [Sign; 3],
    probabilities: [Probability; 3],
    state: SixQubitState,
) -> Result<HybridOutcome> {
    let ray_id = outcome_ray(atlas, m, signs)?;
    let conditional = state.conditional_state(party);
    if conditional != Some(atlas.ray(ray_id).vector) {
        return Err(Error::defect(format!(
            "{party} measured {m} with signs {} but holds {:?}, expected ray {ray_id}",
            sign_string(&signs),
            conditional.map(|v| v.to_string())
        )));
    }
    Ok(HybridOutcome {
        signs,
        cell: cell_index(signs),
        ray_id,
        probabilities,
        state,
    })
}

/// Forces the branch given by `signs`. `Ok(None)` when it has probability zero.
pub fn perform_hybrid_forced(
    atlas: &Atlas,
    s: &SixQubitState,
    party: Party,
    m: &HybridMeasurement,
    signs: [Sign; 3],
) -> Result<Option<HybridOutcome>> {
    let p = atlas.pentagram();
    let (_, pair) = m.branch(signs[0]);
    let words = [m.pivot(), pair[0], pair[1]];
    let mut state = s.clone();
    let mut probabilities = [Probability::one(); 3];
    for k in 0..3 {
        let (prob, next) = project(&state, p.word(words[k]), party, signs[k])?;
        probabilities[k] = prob;
        match next {
            Some(n) => state = n,
            None => return Ok(None),
        }
    }
    finish(atlas, party, m, signs, probabilities, state).map(Some)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoicePolicy {
    /// Each party picks a menu row uniformly and independently.
    Uniform,
    Fixed {
        alice: usize,
        bob: usize,
    },
    /// Run `i` uses Alice row `i mod n`, Bob row `(i / n) mod n`, cycling
    /// through all ordered pairs.
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasurementOrder {
    #[default]
    AliceFirst,
    BobFirst,
}

fn ser_signs<S: Serializer>(signs: &[Sign; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&sign_string(signs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub run_index: u64,
    pub alice_choice: usize,
    pub bob_choice: usize,
    pub alice_row: String,
    pub bob_row: String,
    #[serde(serialize_with = "ser_signs")]
    pub alice_signs: [Sign; 3],
    #[serde(serialize_with = "ser_signs")]
    pub bob_signs: [Sign; 3],
    pub alice_ray: usize,
    pub bob_ray: usize,
    pub alice_cell: usize,
    pub bob_cell: usize,
    pub alice_label: usize,
    pub bob_label: usize,
    /// Alice's three event probabilities, then Bob's.
    pub probability_trace: [Probability; 6],
    /// After the first party finished, the second party's conditional state
    /// was exactly the first party's outcome ray.
    pub twin_collapse: bool,
}

/// Menu of measurements both parties choose from, with its outcome labels.
#[derive(Debug, Clone)]
pub struct Protocol {
    atlas: Atlas,
    menu: Vec<HybridMeasurement>,
    table: MeasurementTable,
}

impl Protocol {
    pub fn new(atlas: Atlas, menu: Vec<HybridMeasurement>) -> Result<Self> {
        let table = generate_table(&atlas, &menu)?;
        Ok(Self { atlas, menu, table })
    }

    /// The bundled eleven-row scheme on the standard atlas.
    pub fn fig2() -> Self {
        let atlas = Atlas::standard();
        let menu = fig2_scheme(atlas.pentagram());
        Self::new(atlas, menu).expect("bundled scheme builds a table")
    }

    pub fn atlas(&self) -> &Atlas {
        &self.atlas
    }

    pub fn menu(&self) -> &[HybridMeasurement] {
        &self.menu
    }

    pub fn table(&self) -> &MeasurementTable {
        &self.table
    }

    /// Index of `m` in the menu, appending it if absent.
    pub fn ensure_row(&mut self, m: HybridMeasurement) -> Result<usize> {
        if let Some(i) = self.menu.iter().position(|x| *x == m) {
            return Ok(i);
        }
        self.menu.push(m);
        self.table = generate_table(&self.atlas, &self.menu)?;
        Ok(self.menu.len() - 1)
    }

    pub fn row_name(&self, row: usize) -> String {
        let m = &self.menu[row];
        format!("{} {}", m.edge_symbol(), m)
    }

    fn label(&self, row: usize, cell: usize) -> usize {
        self.table.rows[row].cells[cell].label
    }

    fn choices(
        &self,
        run: u64,
        policy: ChoicePolicy,
        source: &RandomSource,
    ) -> Result<(usize, usize)> {
        let n = self.menu.len();
        match policy {
            ChoicePolicy::Uniform => Ok((
                source.rng(run, ALICE_CHOICE_EVENT).random_range(0..n),
                source.rng(run, BOB_CHOICE_EVENT).random_range(0..n),
            )),
            ChoicePolicy::Fixed { alice, bob } => {
                if alice >= n || bob >= n {
                    return Err(Error::usage(format!(
                        "row index out of range: menu has {n} rows"
                    )));
                }
                Ok((alice, bob))
            }
            ChoicePolicy::RoundRobin => {
                let k = (run % (n * n) as u64) as usize;
                Ok((k % n, k / n))
            }
        }
    }

    /// One run on a fresh |Ψ>.
    pub fn run_once(
        &self,
        run: u64,
        policy: ChoicePolicy,
        source: &RandomSource,
        order: MeasurementOrder,
    ) -> Result<RunRecord> {
        let (alice_choice, bob_choice) = self.choices(run, policy, source)?;
        let (first, second) = match order {
            MeasurementOrder::AliceFirst => (Party::Alice, Party::Bob),
            MeasurementOrder::BobFirst => (Party::Bob, Party::Alice),
        };
        let row_of = |party| match party {
            Party::Alice => alice_choice,
            Party::Bob => bob_choice,
        };
        let mut first_stream = source.substream(run, party_events(first));
        let first_out = perform_hybrid(
            &self.atlas,
            &prepare_psi(),
            first,
            &self.menu[row_of(first)],
            &mut first_stream,
        )?;
        let twin_collapse = first_out.state.conditional_state(second)
            == Some(self.atlas.ray(first_out.ray_id).vector);
        let mut second_stream = source.substream(run, party_events(second));
        let second_out = perform_hybrid(
            &self.atlas,
            &first_out.state,
            second,
            &self.menu[row_of(second)],
            &mut second_stream,
        )?;
        let (a, b) = match order {
            MeasurementOrder::AliceFirst => (first_out, second_out),
            MeasurementOrder::BobFirst => (second_out, first_out),
        };
        let trace = [
            a.probabilities[0],
            a.probabilities[1],
            a.probabilities[2],
            b.probabilities[0],
            b.probabilities[1],
            b.probabilities[2],
        ];
        Ok(RunRecord {
            run_index: run,
            alice_choice,
            bob_choice,
            alice_row: self.row_name(alice_choice),
            bob_row: self.row_name(bob_choice),
            alice_signs: a.signs,
            bob_signs: b.signs,
            alice_ray: a.ray_id,
            bob_ray: b.ray_id,
            alice_cell: a.cell,
            bob_cell: b.cell,
            alice_label: self.label(alice_choice, a.cell),
            bob_label: self.label(bob_choice, b.cell),
            probability_trace: trace,
            twin_collapse,
        })
    }

    /// `trials` independent runs, executed in parallel and returned in run order.
    pub fn run_experiment(
        &self,
        trials: u64,
        policy: ChoicePolicy,
        seed: u64,
        order: MeasurementOrder,
    ) -> Result<Vec<RunRecord>> {
        if trials == 0 {
            return Err(Error::usage("trials must be at least 1"));
        }
        let source = RandomSource::new(seed);
        (0..trials)
            .into_par_iter()
            .map(|run| self.run_once(run, policy, &source, order))
            .collect()
    }

    /// Exact probability of each cell of `row` for one party on a fresh |Ψ>.
    pub fn outcome_probabilities(&self, row: usize, party: Party) -> Result<[Probability; DIM]> {
        let psi = prepare_psi();
        let mut out = [Probability::new(0, 1); DIM];
        for (cell, slot) in out.iter_mut().enumerate() {
            if let Some(o) =
                perform_hybrid_forced(&self.atlas, &psi, party, &self.menu[row], cell_signs(cell))?
            {
                *slot = o.probabilities[0] * o.probabilities[1] * o.probabilities[2];
            }
        }
        Ok(out)
    }

    /// Exact joint distribution `P(alice cell, bob cell)` with the given
    /// measurement order.
    #[allow(clippy::needless_range_loop)]
    pub fn joint_distribution(
        &self,
        alice_row: usize,
        bob_row: usize,
        order: MeasurementOrder,
    ) -> Result<[[Probability; DIM]; DIM]> {
        let (first, second, first_row, second_row) = match order {
            MeasurementOrder::AliceFirst => (Party::Alice, Party::Bob, alice_row, bob_row),
            MeasurementOrder::BobFirst => (Party::Bob, Party::Alice, bob_row, alice_row),
        };
        let zero = Probability::new(0, 1);
        let mut out = [[zero; DIM]; DIM];
        let psi = prepare_psi();
        for c1 in 0..DIM {
            let Some(o1) = perform_hybrid_forced(
                &self.atlas,
                &psi,
                first,
                &self.menu[first_row],
                cell_signs(c1),
            )?
            else {
                continue;
            };
            let p1 = o1.probabilities[0] * o1.probabilities[1] * o1.probabilities[2];
            for c2 in 0..DIM {
                let Some(o2) = perform_hybrid_forced(
                    &self.atlas,
                    &o1.state,
                    second,
                    &self.menu[second_row],
                    cell_signs(c2),
                )?
                else {
                    continue;
                };
                let p = p1 * o2.probabilities[0] * o2.probabilities[1] * o2.probabilities[2];
                match order {
                    MeasurementOrder::AliceFirst => out[c1][c2] = p,
                    MeasurementOrder::BobFirst => out[c2][c1] = p,
                }
            }
        }
        Ok(out)
    }

    /// Labels appearing in both rows.
    pub fn common_labels(&self, a: usize, b: usize) -> BTreeSet<usize> {
        let la: BTreeSet<usize> = self.table.rows[a].labels().into_iter().collect();
        let lb: BTreeSet<usize> = self.table.rows[b].labels().into_iter().collect();
        la.intersection(&lb).copied().collect()
    }

    /// Whether the two rows involve a common pentagram edge.
    pub fn share_edge(&self, a: usize, b: usize) -> bool {
        let eb = self.menu[b].edges();
        self.menu[a].edges().iter().any(|e| eb.contains(e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub runs: usize,
    pub same_choice_runs: usize,
    pub same_choice_mismatches: usize,
    pub twin_collapse_failures: usize,
    pub shared_edge_runs: usize,
    /// Runs where some label common to both rows occurred for one party only.
    pub common_outcome_violations: usize,
    pub alice_cell_counts: [u64; DIM],
    pub bob_cell_counts: [u64; DIM],
    pub alice_frequencies: [f64; DIM],
    pub bob_frequencies: [f64; DIM],
    pub expected_frequency: Probability,
    pub max_frequency_deviation: f64,
}

impl CorrelationReport {
    pub fn correlations_hold(&self) -> bool {
        self.same_choice_mismatches == 0
            && self.twin_collapse_failures == 0
            && self.common_outcome_violations == 0
    }
}

pub fn verify_twin_collapse(protocol: &Protocol, records: &[RunRecord]) -> CorrelationReport {
    let mut report = CorrelationReport {
        runs: records.len(),
        same_choice_runs: 0,
        same_choice_mismatches: 0,
        twin_collapse_failures: 0,
        shared_edge_runs: 0,
        common_outcome_violations: 0,
        alice_cell_counts: [0; DIM],
        bob_cell_counts: [0; DIM],
        alice_frequencies: [0.0; DIM],
        bob_frequencies: [0.0; DIM],
        expected_frequency: Probability::new(1, DIM as u64),
        max_frequency_deviation: 0.0,
    };
    for r in records {
        if r.alice_choice == r.bob_choice {
            report.same_choice_runs += 1;
            if r.alice_label != r.bob_label {
                report.same_choice_mismatches += 1;
            }
        }
        if !r.twin_collapse {
            report.twin_collapse_failures += 1;
        }
        if protocol.share_edge(r.alice_choice, r.bob_choice) {
            report.shared_edge_runs += 1;
        }
        let violated = protocol
            .common_labels(r.alice_choice, r.bob_choice)
            .into_iter()
            .any(|l| (r.alice_label == l) != (r.bob_label == l));
        if violated {
            report.common_outcome_violations += 1;
        }
        report.alice_cell_counts[r.alice_cell] += 1;
        report.bob_cell_counts[r.bob_cell] += 1;
    }
    if !records.is_empty() {
        let n = records.len() as f64;
        let expected = report.expected_frequency.to_f64();
        for k in 0..DIM {
            report.alice_frequencies[k] = report.alice_cell_counts[k] as f64 / n;
            report.bob_frequencies[k] = report.bob_cell_counts[k] as f64 / n;
            report.max_frequency_deviation = report
                .max_frequency_deviation
                .max((report.alice_frequencies[k] - expected).abs())
                .max((report.bob_frequencies[k] - expected).abs());
        }
    }
    report
}
