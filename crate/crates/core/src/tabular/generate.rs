//! Synthetic dataset generators used by experiments and tests.

use crate::prng::{substream, Stream};
use crate::tabular::value::Value;
use crate::tabular::{Dataset, TabularError};

/// Hard cap on generated record counts, to fail fast instead of thrashing.
const MAX_GENERATED_RECORDS: u64 = 4_000_000;

/// The complete product dataset: one record per tuple in {1..B}^k, plus a
/// uniformly random binary secret attribute `s`.
///
/// Attribute names are `a1..ak`; uids are `u1..u(B^k)` in tuple order.
/// Deterministic for fixed `(b, k, seed)`.
pub fn generate_complete_k(b: u32, k: u32, seed: u64) -> Result<Dataset, TabularError> {
    if b < 2 || k < 1 {
        return Err(TabularError::BadGeneratorParams {
            detail: format!("complete_k needs B >= 2 and k >= 1, got B={b}, k={k}"),
        });
    }
    let total = (b as u64)
        .checked_pow(k)
        .filter(|&n| n <= MAX_GENERATED_RECORDS)
        .ok_or(TabularError::BadGeneratorParams {
            detail: format!("B^k = {b}^{k} exceeds the {MAX_GENERATED_RECORDS}-record budget"),
        })?;

    let mut attributes: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    attributes.push("s".into());

    let mut secret_stream = Stream::new(substream(seed, 0));
    let mut uids = Vec::with_capacity(total as usize);
    let mut rows = Vec::with_capacity(total as usize);
    let mut tuple = vec![1u32; k as usize];
    for i in 0..total {
        uids.push(format!("u{}", i + 1));
        let mut row: Vec<Value> = tuple.iter().map(|&v| Value::Int(v as i64)).collect();
        row.push(Value::Int(i64::from(secret_stream.next_bool())));
        rows.push(row);
        // next tuple, last coordinate fastest
        for slot in tuple.iter_mut().rev() {
            if *slot < b {
                *slot += 1;
                break;
            }
            *slot = 1;
        }
    }
    Dataset::new(attributes, "s", uids, rows)
}

/// A sparse skewed-binary dataset: `attrs` binary attributes `b1..bm` plus a
/// binary secret `s`, each positive independently with `positive_rate`.
///
/// Stand-in for very wide, heavily zero-skewed corpora where the secret
/// distribution is extreme.
pub fn generate_sparse_binary(
    records: u64,
    attrs: u32,
    positive_rate: f64,
    seed: u64,
) -> Result<Dataset, TabularError> {
    if records < 1 || attrs < 1 || !(0.0..=1.0).contains(&positive_rate) {
        return Err(TabularError::BadGeneratorParams {
            detail: format!(
                "sparse_binary needs records >= 1, attrs >= 1, rate in [0,1]; \
                 got {records}, {attrs}, {positive_rate}"
            ),
        });
    }
    if records > MAX_GENERATED_RECORDS {
        return Err(TabularError::BadGeneratorParams {
            detail: format!("{records} exceeds the {MAX_GENERATED_RECORDS}-record budget"),
        });
    }
    let mut attributes: Vec<String> = (1..=attrs).map(|i| format!("b{i}")).collect();
    attributes.push("s".into());

    let mut uids = Vec::with_capacity(records as usize);
    let mut rows = Vec::with_capacity(records as usize);
    for i in 0..records {
        let mut stream = Stream::new(substream(seed, i + 1));
        uids.push(format!("u{}", i + 1));
        let row: Vec<Value> = (0..=attrs)
            .map(|_| Value::Int(i64::from(stream.next_f64() < positive_rate)))
            .collect();
        rows.push(row);
    }
    Dataset::new(attributes, "s", uids, rows)
}

/// One attribute of the census-style generator: a name plus a weighted
/// value table (text or integer values).
struct MarginalTable {
    name: &'static str,
    values: Vec<(Value, u32)>,
    total: u64,
}

impl MarginalTable {
    fn text(name: &'static str, weighted: &[(&str, u32)]) -> MarginalTable {
        MarginalTable {
            name,
            total: weighted.iter().map(|(_, w)| u64::from(*w)).sum(),
            values: weighted
                .iter()
                .map(|(v, w)| (Value::text(*v), *w))
                .collect(),
        }
    }

    fn int(name: &'static str, weighted: &[(i64, u32)]) -> MarginalTable {
        MarginalTable {
            name,
            total: weighted.iter().map(|(_, w)| u64::from(*w)).sum(),
            values: weighted.iter().map(|(v, w)| (Value::Int(*v), *w)).collect(),
        }
    }

    fn pick(&self, stream: &mut Stream) -> Value {
        let mut at = stream.next_below(self.total);
        for (v, w) in &self.values {
            if at < u64::from(*w) {
                return v.clone();
            }
            at -= u64::from(*w);
        }
        self.values.last().expect("nonempty marginal").0.clone()
    }
}

/// Integer ages 17..=90 with a broad working-age plateau; fine granularity
/// keeps near-coincidences on many-attribute subsets rare, like a real
/// census table.
fn age_marginal() -> MarginalTable {
    let weight = |a: i64| -> u32 {
        match a {
            17..=19 => 30,
            20..=24 => 48,
            25..=34 => 52,
            35..=44 => 44,
            45..=54 => 32,
            55..=64 => 18,
            _ => 1,
        }
    };
    let table: Vec<(i64, u32)> = (17..=90).map(|a| (a, weight(a))).collect();
    MarginalTable::int("age", &table)
}

/// Weekly hours with the heavy 40-hour spike and a long sparse tail.
fn hours_marginal() -> MarginalTable {
    MarginalTable::int(
        "hours_per_week",
        &[
            (40, 450),
            (50, 80),
            (45, 60),
            (35, 45),
            (60, 38),
            (20, 36),
            (30, 32),
            (25, 28),
            (38, 22),
            (48, 20),
            (55, 18),
            (36, 16),
            (15, 15),
            (32, 12),
            (44, 12),
            (10, 11),
            (42, 10),
            (65, 9),
            (70, 8),
            (24, 7),
            (12, 1), (28, 1), (52, 1), (37, 1), (5, 1), (18, 1), (33, 1),
            (46, 1), (75, 1), (80, 1), (8, 1), (16, 1), (22, 1), (58, 1),
            (84, 1), (90, 1), (99, 1), (2, 1), (6, 1), (14, 1), (26, 1),
            (34, 1), (39, 1), (41, 1), (43, 1), (47, 1), (54, 1), (56, 1),
            (62, 1), (66, 1), (72, 1), (77, 1), (85, 1), (88, 1), (91, 1),
            (95, 1), (97, 1), (3, 1), (7, 1), (11, 1), (13, 1), (17, 1),
            (19, 1), (21, 1), (23, 1), (27, 1), (29, 1), (31, 1), (49, 1),
            (51, 1), (53, 1), (57, 1), (59, 1), (61, 1), (63, 1), (64, 1),
            (67, 1), (68, 1), (69, 1), (71, 1), (73, 1), (74, 1), (76, 1),
            (78, 1),
        ],
    )
}

/// The weighted non-secret marginals, loosely shaped like a census income
/// table: skewed categoricals plus two fine-grained integer attributes.
/// Capital gains are generated separately (zero-inflated with near-unique
/// amounts) and appended as the tenth attribute.
fn census_marginals() -> Vec<MarginalTable> {
    vec![
        age_marginal(),
        MarginalTable::text(
            "workclass",
            &[
                ("private", 580),
                ("self-emp", 120),
                ("state-gov", 100),
                ("local-gov", 80),
                ("federal-gov", 60),
                ("self-emp-inc", 40),
                ("without-pay", 20),
            ],
        ),
        MarginalTable::text(
            "education",
            &[
                ("hs-grad", 320),
                ("some-college", 220),
                ("bachelors", 160),
                ("masters", 70),
                ("assoc-voc", 60),
                ("11th", 40),
                ("assoc-acdm", 30),
                ("10th", 20),
                ("7th-8th", 18),
                ("prof-school", 16),
                ("9th", 14),
                ("12th", 12),
                ("doctorate", 10),
                ("5th-6th", 5),
                ("1st-4th", 3),
                ("preschool", 2),
            ],
        ),
        MarginalTable::text(
            "marital_status",
            &[
                ("married", 460),
                ("never-married", 330),
                ("divorced", 130),
                ("separated", 40),
                ("widowed", 20),
                ("spouse-absent", 10),
                ("af-spouse", 10),
            ],
        ),
        MarginalTable::text(
            "occupation",
            &[
                ("prof-specialty", 95),
                ("craft-repair", 90),
                ("exec-managerial", 85),
                ("adm-clerical", 80),
                ("sales-retail", 70),
                ("other-service", 55),
                ("machine-op", 45),
                ("transport-truck", 40),
                ("handlers", 35),
                ("farming", 30),
                ("tech-support", 30),
                ("protective-police", 25),
                ("sales-wholesale", 25),
                ("nurse", 22),
                ("teacher-primary", 22),
                ("teacher-secondary", 20),
                ("engineer", 20),
                ("accountant", 18),
                ("cook", 18),
                ("janitor", 16),
                ("mechanic-auto", 16),
                ("carpenter", 14),
                ("electrician", 14),
                ("waiter", 12),
                ("hairdresser", 10),
                ("transport-taxi", 10),
                ("priv-house", 9),
                ("machinist", 8),
                ("welder", 8),
                ("plumber", 7),
                ("bartender", 6),
                ("firefighter", 6),
                ("librarian", 5),
                ("surveyor", 4),
                ("armed-forces", 4),
                ("fisher", 3),
                ("logger", 3),
                ("miner", 2),
            ],
        ),
        MarginalTable::text(
            "relationship",
            &[
                ("husband", 410),
                ("not-in-family", 260),
                ("own-child", 150),
                ("unmarried", 100),
                ("wife", 50),
                ("other-relative", 30),
            ],
        ),
        MarginalTable::text(
            "race",
            &[
                ("white", 780),
                ("black", 130),
                ("asian-pac", 55),
                ("amer-indian", 22),
                ("other", 13),
            ],
        ),
        MarginalTable::text("sex", &[("male", 670), ("female", 330)]),
        hours_marginal(),
    ]
}

/// Income cutoff and noise scale for the secret model: a record earns
/// `income = 1` when its attribute-driven score plus Gaussian noise clears
/// the cutoff. Like the real table, the secret is strongly (but not
/// perfectly) predictable from the other attributes; the randomized-secret
/// control resamples it away.
const CENSUS_INCOME_CUTOFF: f64 = 41.5;
const CENSUS_INCOME_NOISE_SD: f64 = 6.0;

/// The frozen generator calibration, gathered in one place.
#[derive(Debug, Clone, Copy)]
struct CensusTuning {
    income_cutoff: f64,
    income_noise_sd: f64,
    records_per_template: f64,
    mutation_rate: u64,
    holder_rate: u64,
}

impl Default for CensusTuning {
    fn default() -> CensusTuning {
        CensusTuning {
            income_cutoff: CENSUS_INCOME_CUTOFF,
            income_noise_sd: CENSUS_INCOME_NOISE_SD,
            records_per_template: CENSUS_RECORDS_PER_TEMPLATE,
            mutation_rate: CENSUS_MUTATION_RATE,
            holder_rate: CENSUS_HOLDER_RATE,
        }
    }
}

/// Attribute-driven income score.
fn income_score(marginals: &[MarginalTable], row: &[Value]) -> f64 {
    let mut score = 0.0;
    if let Some(Value::Int(g)) = row.get(marginals.len()) {
        score += match *g {
            g if g >= 7000 => 14.0,
            g if g >= 3000 => 6.0,
            g if g > 0 => 3.0,
            _ => 0.0,
        };
    }
    for (m, v) in marginals.iter().zip(row) {
        score += match (m.name, v) {
            ("age", Value::Int(a)) => ((*a).min(55) - 17) as f64 * 0.5,
            ("hours_per_week", Value::Int(h)) => ((*h).min(60).max(20) - 20) as f64 * 0.25,
            ("education", Value::Text(e)) => match e.as_str() {
                "doctorate" | "prof-school" => 19.0,
                "masters" => 16.0,
                "bachelors" => 13.0,
                "assoc-acdm" => 11.0,
                "assoc-voc" => 10.0,
                "some-college" => 9.0,
                "hs-grad" => 8.0,
                "12th" => 7.0,
                "11th" => 6.0,
                "10th" => 5.0,
                "9th" => 4.0,
                "7th-8th" => 3.0,
                "5th-6th" => 2.0,
                "1st-4th" => 1.0,
                _ => 0.0,
            },
            ("occupation", Value::Text(o)) => match o.as_str() {
                "exec-managerial" | "prof-specialty" | "engineer" => 6.0,
                "accountant" | "nurse" | "teacher-secondary" => 4.0,
                "tech-support" | "protective-police" | "sales-wholesale"
                | "teacher-primary" | "firefighter" | "librarian" => 3.0,
                "craft-repair" | "transport-truck" | "electrician" | "plumber"
                | "machinist" | "welder" | "surveyor" => 2.0,
                "adm-clerical" | "machine-op" | "armed-forces" | "sales-retail"
                | "mechanic-auto" | "carpenter" => 1.0,
                "priv-house" => -3.0,
                "other-service" | "cook" | "janitor" | "waiter" | "hairdresser"
                | "bartender" => -1.0,
                _ => 0.0,
            },
            ("marital_status", Value::Text(s)) => {
                if s == "married" {
                    8.0
                } else {
                    0.0
                }
            }
            ("sex", Value::Text(s)) => {
                if s == "male" {
                    4.0
                } else {
                    0.0
                }
            }
            _ => 0.0,
        };
    }
    score
}

/// Records per population template, on average.
const CENSUS_RECORDS_PER_TEMPLATE: f64 = 1.5;

/// Per-record chance (per mille) of deviating from the template. A
/// deviating record redraws several attributes at once, so records are
/// either exact profile copies or far from every profile mate — dropping
/// one attribute barely grows a record's match class, as in real data.
const CENSUS_MUTATION_RATE: u64 = 520;

/// Per-mille share of records reporting a capital gain.
const CENSUS_HOLDER_RATE: u64 = 70;

/// A census-style synthetic table: ten attributes with skewed, correlated
/// marginals plus a binary `income` secret (~25% positive).
///
/// Records are copies of a deterministic template pool; a tunable fraction
/// mutates three to six attributes with fresh marginal draws. At ~30k
/// records roughly 93% are value-unique on the full ten non-secret
/// attributes, match classes stay nearly stable under attribute dropping,
/// and common value combinations still carry healthy crowds — the
/// uniqueness profile the cloning experiments assume. Deterministic for a
/// fixed `(records, seed)`.
pub fn generate_census_like(records: u64, seed: u64) -> Result<Dataset, TabularError> {
    let tuning = CensusTuning::default();
    if records < 1 || records > MAX_GENERATED_RECORDS {
        return Err(TabularError::BadGeneratorParams {
            detail: format!("record count {records} out of range"),
        });
    }
    let marginals = census_marginals();
    let mut attributes: Vec<String> = marginals.iter().map(|m| m.name.into()).collect();
    attributes.push("capital_gain".into());
    attributes.push("income".into());

    // capital gains are individual, not profile-level: templates only carry
    // the holder flag; each holder draws a personal amount from a wide
    // dollar range, so a reported gain is a near-unique natural key
    let draw_holder_flag = |stream: &mut Stream| -> Value {
        Value::Int(i64::from(stream.next_below(1000) < tuning.holder_rate))
    };
    let draw_amount =
        |stream: &mut Stream| -> Value { Value::Int(594 + stream.next_below(98_906) as i64) };

    let template_count =
        ((records as f64 / tuning.records_per_template).ceil() as u64).max(1);
    let mut templates: Vec<Vec<Value>> = Vec::with_capacity(template_count as usize);
    // templates are kept pairwise distant: no two may agree on nine of the
    // ten attributes, so near-twin records always share a template
    let mut projections: std::collections::HashSet<u64> = std::collections::HashSet::new();
    for t in 0..template_count {
        let mut stream = Stream::new(substream(seed ^ 0x7E41_47E5, t));
        'draw: for _attempt in 0..1000 {
            let mut candidate: Vec<Value> =
                marginals.iter().map(|m| m.pick(&mut stream)).collect();
            candidate.push(draw_holder_flag(&mut stream));
            let keys: Vec<u64> = (0..candidate.len())
                .map(|drop| {
                    let mut text = format!("drop{drop}");
                    for (i, v) in candidate.iter().enumerate() {
                        if i != drop {
                            text.push('\u{1f}');
                            text.push_str(&v.canonical());
                        }
                    }
                    crate::engine::hash64(&text)
                })
                .collect();
            if keys.iter().any(|k| projections.contains(k)) {
                continue 'draw;
            }
            projections.extend(keys);
            templates.push(candidate);
            break 'draw;
        }
        if templates.len() != t as usize + 1 {
            return Err(TabularError::BadGeneratorParams {
                detail: format!("template pool saturated after {t} distinct profiles"),
            });
        }
    }

    let mut uids = Vec::with_capacity(records as usize);
    let mut rows = Vec::with_capacity(records as usize);
    for i in 0..records {
        let mut stream = Stream::new(substream(seed, i + 1));
        uids.push(format!("u{}", i + 1));
        let mut row = templates[stream.next_below(template_count) as usize].clone();
        if stream.next_below(1000) < tuning.mutation_rate {
            let mutated = 3 + stream.next_below(4) as usize;
            for at in stream.sample_indices(marginals.len() + 1, mutated) {
                if at == marginals.len() {
                    // a gains mutation resamples the holder flag
                    row[at] = draw_holder_flag(&mut stream);
                    continue;
                }
                // an effective mutation: redraw until the value changes, so
                // deviating records stay several attributes away from every
                // profile mate
                for _ in 0..100 {
                    let fresh = marginals[at].pick(&mut stream);
                    if fresh != row[at] {
                        row[at] = fresh;
                        break;
                    }
                }
            }
        }
        // expand the holder flag into a personal amount
        let cg_slot = marginals.len();
        if row[cg_slot] == Value::Int(1) {
            row[cg_slot] = draw_amount(&mut stream);
        }
        let noisy_score =
            income_score(&marginals, &row) + tuning.income_noise_sd * stream.next_normal();
        row.push(Value::Int(i64::from(noisy_score > tuning.income_cutoff)));
        rows.push(row);
    }
    Dataset::new(attributes, "income", uids, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{is_unique, is_value_unique};

    #[test]
    fn complete_k_enumerates_all_tuples() {
        let d = generate_complete_k(2, 2, 1).unwrap();
        assert_eq!(d.len(), 4);
        let mut tuples: Vec<(i64, i64)> = d
            .records()
            .map(|r| {
                let a1 = match r.value("a1").unwrap() {
                    Value::Int(i) => *i,
                    _ => panic!(),
                };
                let a2 = match r.value("a2").unwrap() {
                    Value::Int(i) => *i,
                    _ => panic!(),
                };
                (a1, a2)
            })
            .collect();
        tuples.sort_unstable();
        assert_eq!(tuples, vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn complete_k_count_and_determinism() {
        let d1 = generate_complete_k(12, 3, 9).unwrap();
        assert_eq!(d1.len(), 12usize.pow(3));
        let d2 = generate_complete_k(12, 3, 9).unwrap();
        for i in 0..d1.len() {
            assert_eq!(d1.secret_value(i), d2.secret_value(i));
        }
        // every record is unique on the k non-secret attributes
        let attrs = d1.non_secret_attributes();
        for row in [0usize, 577, 1727] {
            assert!(is_unique(&d1, d1.record(row), &attrs).unwrap());
        }
    }

    #[test]
    fn complete_k_rejects_oversize() {
        assert!(generate_complete_k(12, 12, 0).is_err());
        assert!(generate_complete_k(1, 3, 0).is_err());
    }

    #[test]
    fn sparse_binary_is_skewed() {
        let d = generate_sparse_binary(2000, 20, 0.01, 5).unwrap();
        assert_eq!(d.len(), 2000);
        let positives: usize = (0..d.len()).map(|i| d.secret_value(i) as usize).sum();
        // rate 0.01 over 2000 draws
        assert!(positives < 60, "secret positives {positives}");
    }

    #[test]
    fn census_like_shape() {
        let d = generate_census_like(500, 3).unwrap();
        assert_eq!(d.len(), 500);
        assert_eq!(d.attributes().len(), 11);
        assert_eq!(d.secret_attribute(), "income");
        // value-uniqueness is the common case on all ten attributes
        let attrs = d.non_secret_attributes();
        let vu = (0..d.len())
            .filter(|&i| is_value_unique(&d, d.record(i), &attrs).unwrap())
            .count();
        assert!(vu > 450, "value-unique {vu}/500");
    }
}
