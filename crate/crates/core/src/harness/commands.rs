use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use super::cli::{DiagramCmd, ExportFormat, GrossCmd, LuzinCmd, PosetCmd, PredictCmd, SpeckerCmd, StyleArg, TransformCmd};
use super::{read_json, Artifacts, Command, ExperimentConfig, HarnessError};
use crate::algebra::{Field, Scalar};
use crate::diagram::load_builtin_diagram;
use crate::gross::{
    bookkeeping_identity, gross_to_luzin, luzin_to_gross, make_coherent_injections, roundtrip_check_form, GrossFragment,
    InjectionStyle,
};
use crate::luzin::{
    avoidance_audit, brute_force_luzinity, default_sources, LuzinFamily, LuzinityBudget, SigmaStarCache, DEFAULT_STEP_BUDGET,
};
use crate::poset::grid::Grid;
use crate::poset::{generic_predictor, px_leq, softness_witnesses, PxCondition};
use crate::predict::{check_prediction, Predictor, SpaceSpec, Word};
use crate::rng::{self, Rng};
use crate::specker::{collision_refuter, hat_chain, specker_encode, RefuterBounds, RefuterVerdict};
use crate::transforms::{
    block_start, combine_predictors, extend_predictor_to_omega, predictor_from_slalom, predictor_from_unsplit_set,
    SlalomBlockSystem,
};

const DEFAULT_LUZIN_HORIZON: usize = 5;
const DEFAULT_SCAN_STEPS: u64 = 10_000_000;

pub(super) fn dispatch(config: &ExperimentConfig, out: &mut Artifacts) -> Result<String, HarnessError> {
    match &config.command {
        Command::Predict(c) => predict(config, c, out),
        Command::Transform(c) => transform(config, c, out),
        Command::Specker(c) => specker(c, out),
        Command::Luzin(c) => luzin(config, c, out),
        Command::Gross(c) => gross(config, c, out),
        Command::Poset(c) => poset(config, c, out),
        Command::Diagram(c) => diagram(c, out),
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn predict(_config: &ExperimentConfig, cmd: &PredictCmd, out: &mut Artifacts) -> Result<String, HarnessError> {
    let PredictCmd::Check { predictor, word, grace } = cmd;
    let pi: Predictor = read_json(predictor, "predictor")?;
    let w: Word = read_json(word, "word")?;
    let report = check_prediction(&pi, &w, *grace)?;
    out.json("prediction_report", "prediction_report.json", &report)?;
    Ok(format!(
        "predict check: {:?}, {} checked, {} hits, {} misses",
        report.verdict,
        report.checked.len(),
        report.hits.len(),
        report.misses.len()
    ))
}

fn transform(config: &ExperimentConfig, cmd: &TransformCmd, out: &mut Artifacts) -> Result<String, HarnessError> {
    match cmd {
        TransformCmd::Extend { predictor, bounds } => {
            let pi: Predictor = read_json(predictor, "predictor")?;
            let ext = extend_predictor_to_omega(&pi, bounds)?;
            out.json("predictor", "extended_predictor.json", &ext)?;
            Ok(format!("transform extend: domain of size {}", ext.domain().count()))
        }
        TransformCmd::Combine { indicator, reduced } => {
            let a: Predictor = read_json(indicator, "predictor")?;
            let b: Predictor = read_json(reduced, "predictor")?;
            let c = combine_predictors(&a, &b)?;
            out.json("predictor", "combined_predictor.json", &c)?;
            Ok(format!("transform combine: domain of size {}", c.domain().count()))
        }
        TransformCmd::SplitSet { set, field } => {
            let pi = predictor_from_unsplit_set(set, *field)?;
            out.json("linear_predictor", "split_set_predictor.json", &pi)?;
            Ok(format!("transform split-set: {} guesses over {field}", pi.forms().len()))
        }
        TransformCmd::Slalom { system, blocks, bound } => {
            let sys = match system {
                Some(path) => read_json(path, "slalom_system")?,
                None => random_slalom(config.require_seed()?, *blocks, *bound)?,
            };
            let pi = predictor_from_slalom(&sys)?;
            let branches = sys.branches();
            let mut rows = Vec::new();
            let mut predicted = 0;
            for (i, b) in branches.iter().enumerate() {
                let r = check_prediction(&pi, b, 0)?;
                predicted += usize::from(r.predicted());
                rows.push(vec![i.to_string(), join(b, ";"), r.predicted().to_string()]);
            }
            out.json("slalom_system", "slalom_system.json", &sys)?;
            out.json("predictor", "slalom_predictor.json", &pi)?;
            out.csv("slalom_branches.csv", &["branch", "word", "predicted"], &rows)?;
            if predicted != branches.len() {
                return Err(HarnessError::CheckFailed(format!("{} of {} branches escape", branches.len() - predicted, branches.len())));
            }
            Ok(format!("transform slalom: {} blocks, {} branches, all predicted", sys.block_count(), branches.len()))
        }
    }
}

fn random_slalom(seed: u64, blocks: usize, bound: u64) -> Result<SlalomBlockSystem, HarnessError> {
    let mut r = rng::seeded(seed);
    let spec = SpaceSpec::uniform(bound, block_start(blocks))?;
    let options = (0..blocks)
        .map(|n| if n < 2 { Vec::new() } else { (0..n).map(|_| (0..n * n).map(|_| rng::below(&mut r, bound)).collect()).collect() })
        .collect();
    Ok(SlalomBlockSystem::new(spec, options)?)
}

fn specker(cmd: &SpeckerCmd, out: &mut Artifacts) -> Result<String, HarnessError> {
    match cmd {
        SpeckerCmd::Encode { word, n } => {
            let v = specker_encode(word, *n)?;
            out.json("specker_vector", "specker_vector.json", &v)?;
            Ok(format!("specker encode: {} entries", v.entries.len()))
        }
        SpeckerCmd::Chain { a, k, l, word, h } => {
            let c = hat_chain(&(*a).into(), *k, *l, word, h)?;
            out.json("chain", "chain.json", &c)?;
            Ok(format!("specker chain: {:?}", c.verdict))
        }
        SpeckerCmd::Refute { alpha, beta, k, l, a_max, h_max, kn_weight } => {
            let mut bounds = RefuterBounds::default_for(*k, *l);
            bounds.a_max = a_max.unwrap_or(bounds.a_max);
            bounds.h_max = *h_max;
            bounds.kn_weight = *kn_weight;
            let report = collision_refuter(alpha, beta, *k, *l, bounds)?;
            let rows: Vec<Vec<String>> = report
                .points
                .iter()
                .map(|p| vec![p.a.to_string(), join(&p.h, ";"), format!("{:?}", p.alpha), format!("{:?}", p.beta)])
                .collect();
            out.json("refuter_report", "refuter_report.json", &report)?;
            out.csv("refuter_points.csv", &["a", "h", "alpha", "beta"], &rows)?;
            let verdict = match &report.verdict {
                RefuterVerdict::Refuted => "refuted".to_string(),
                RefuterVerdict::CounterexampleFound { a, h } => format!("counterexample a = {a}, h = {h:?}"),
            };
            Ok(format!("specker refute: {verdict} over {} grid points", report.points.len()))
        }
    }
}

fn cache(config: &ExperimentConfig, field: Field) -> Result<SigmaStarCache, HarnessError> {
    Ok(SigmaStarCache::with_budget(field, config.budget_steps.unwrap_or(DEFAULT_STEP_BUDGET))?)
}

fn load_or_build(
    config: &ExperimentConfig,
    family: &Option<PathBuf>,
    count: usize,
    field: Field,
    min_horizon: usize,
) -> Result<(LuzinFamily, SigmaStarCache), HarnessError> {
    match family {
        Some(path) => {
            let fam: LuzinFamily = read_json(path, "luzin_family")?;
            let c = cache(config, fam.field())?;
            Ok((fam, c))
        }
        None => {
            let horizon = config.horizon.unwrap_or(DEFAULT_LUZIN_HORIZON).max(min_horizon);
            let mut c = cache(config, field)?;
            let fam = LuzinFamily::build(&default_sources(count, horizon), horizon, &mut c)?;
            Ok((fam, c))
        }
    }
}

#[derive(Serialize)]
struct AuditRow {
    generator: usize,
    source: Word,
    checked_constraints: usize,
    checked_tuples: u64,
}

fn luzin(config: &ExperimentConfig, cmd: &LuzinCmd, out: &mut Artifacts) -> Result<String, HarnessError> {
    match cmd {
        LuzinCmd::Build { generators, sources, field } => {
            let horizon = config.horizon.unwrap_or(DEFAULT_LUZIN_HORIZON);
            let words: Vec<Word> = match sources {
                Some(path) => read_json(path, "words")?,
                None => default_sources(*generators, horizon),
            };
            let mut c = cache(config, *field)?;
            let fam = LuzinFamily::build(&words, horizon, &mut c)?;
            out.json("luzin_family", "luzin_family.json", &fam)?;
            Ok(format!("luzin build: {} generators over {field}, horizon {horizon}, {} steps", fam.generators().len(), c.steps()))
        }
        LuzinCmd::Audit { family, generators, field } => {
            let (fam, mut c) = load_or_build(config, family, *generators, *field, 0)?;
            let mut rows = Vec::new();
            for (i, g) in fam.generators().iter().enumerate() {
                let r = avoidance_audit(&g.values, &g.source, &mut c)?;
                rows.push(AuditRow {
                    generator: i,
                    source: g.source.clone(),
                    checked_constraints: r.checked_constraints,
                    checked_tuples: r.checked_tuples,
                });
            }
            let csv: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.generator.to_string(), join(&r.source, ";"), r.checked_constraints.to_string(), r.checked_tuples.to_string()])
                .collect();
            out.json("luzin_audit", "luzin_audit.json", &rows)?;
            out.csv("luzin_audit.csv", &["generator", "source", "checked_constraints", "checked_tuples"], &csv)?;
            let tuples: u64 = rows.iter().map(|r| r.checked_tuples).sum();
            Ok(format!("luzin audit: {} generators passed, {tuples} tuples checked", rows.len()))
        }
        LuzinCmd::Scan { family, generators, field, coeff_bound, max_domain, coeff_count } => {
            let (fam, _) = load_or_build(config, family, *generators, *field, 0)?;
            let budget = LuzinityBudget {
                max_domain: *max_domain,
                coeff_count: *coeff_count,
                max_steps: config.budget_steps.unwrap_or(DEFAULT_SCAN_STEPS),
            };
            let table = brute_force_luzinity(&fam, *coeff_bound, budget)?;
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    let forms: Vec<String> = r.forms.iter().map(|f| join(f.coefficients(), " ")).collect();
                    vec![
                        r.predictor_id.to_string(),
                        join(&r.domain, ";"),
                        forms.join(";"),
                        r.predicted_count.to_string(),
                        r.predicted_rank.to_string(),
                    ]
                })
                .collect();
            out.json("luzinity_table", "luzinity.json", &table)?;
            out.csv("luzinity.csv", &["predictor", "domain", "forms", "predicted_count", "predicted_rank"], &rows)?;
            Ok(format!(
                "luzin scan: {} predictors, {} combinations, max count {}, max rank {}",
                table.rows.len(),
                table.combinations,
                table.max_count,
                table.max_rank
            ))
        }
    }
}

fn random_scalar(r: &mut Rng, field: Field) -> Scalar {
    match field.order() {
        Some(p) => field.from_i64(rng::below(r, p) as i64),
        None => field.from_i64(rng::below(r, 7) as i64 - 3),
    }
}

fn gross(config: &ExperimentConfig, cmd: &GrossCmd, out: &mut Artifacts) -> Result<String, HarnessError> {
    match cmd {
        GrossCmd::FromLuzin { family, n, field, style, split } => {
            let style = match style {
                StyleArg::Canonical => InjectionStyle::Canonical,
                StyleArg::Perturbed => InjectionStyle::Perturbed(config.require_seed()?),
            };
            let h = make_coherent_injections(*n, style);
            let (fam, _) = load_or_build(config, family, *n, *field, h.working_horizon() as usize)?;
            let g: Vec<Vec<Scalar>> = fam.generators().iter().map(|g| g.values.clone()).collect();
            let form = luzin_to_gross(fam.field(), &g, &h, *n)?;
            let report = roundtrip_check_form(&form, &g, &h, *split)?;
            out.json("gross_fragment", "gross_fragment.json", &GrossFragment { form, injections: h })?;
            out.json("roundtrip_report", "gross_roundtrip.json", &report)?;
            if !report.mismatches.is_empty() {
                return Err(HarnessError::CheckFailed(format!("{} round-trip mismatches", report.mismatches.len())));
            }
            Ok(format!("gross from-luzin: dimension {n} over {}, {} values round-trip", fam.field(), report.checked))
        }
        GrossCmd::ToLuzin { fragment, split } => {
            let frag: GrossFragment = read_json(fragment, "gross_fragment")?;
            let words: BTreeMap<usize, Vec<Scalar>> = (*split..frag.form.dimension())
                .map(|alpha| Ok((alpha, gross_to_luzin(&frag.form, alpha, *split)?)))
                .collect::<Result<_, HarnessError>>()?;
            out.json("gross_words", "gross_words.json", &words)?;
            Ok(format!("gross to-luzin: {} words of length {split}", words.len()))
        }
        GrossCmd::Scan { field, n, split, families } => {
            let seed = config.require_seed()?;
            let mut r = rng::seeded(seed);
            let mut rows = Vec::new();
            let mut bad = 0;
            for i in 0..*families {
                let h = make_coherent_injections(*n, InjectionStyle::Perturbed(seed.wrapping_add(i as u64)));
                let len = h.working_horizon() as usize;
                let g: Vec<Vec<Scalar>> = (0..*n).map(|_| (0..len).map(|_| random_scalar(&mut r, *field)).collect()).collect();
                let form = luzin_to_gross(*field, &g, &h, *n)?;
                let report = roundtrip_check_form(&form, &g, &h, *split)?;
                let y: Vec<(usize, Scalar)> = (0..*split).map(|j| (j, random_scalar(&mut r, *field))).collect();
                let z: Vec<(usize, Scalar)> = (*split..*n).map(|j| (j, random_scalar(&mut r, *field))).collect();
                let (lhs, rhs) = bookkeeping_identity(&form, &g, &h, *split, &y, &z)?;
                let ok = report.mismatches.is_empty() && lhs == rhs;
                bad += usize::from(!ok);
                rows.push(vec![
                    i.to_string(),
                    len.to_string(),
                    report.checked.to_string(),
                    report.mismatches.len().to_string(),
                    (lhs == rhs).to_string(),
                ]);
            }
            out.csv("gross_scan.csv", &["family", "working_horizon", "checked", "mismatches", "bookkeeping_holds"], &rows)?;
            if bad > 0 {
                return Err(HarnessError::CheckFailed(format!("{bad} of {families} families failed")));
            }
            Ok(format!("gross scan: {families} perturbed families over {field}, all consistent"))
        }
    }
}

/// A random decreasing chain from the top condition: each step either adds
/// the next table index, with entries forced by the current words where they
/// are constrained, or adds a random word.
fn random_chain(seed: u64, spec: &SpaceSpec, length: usize) -> Result<Vec<PxCondition>, HarnessError> {
    let mut r = rng::seeded(seed);
    let mut chain = vec![PxCondition::top(spec.clone())?];
    let horizon = spec.horizon();
    while chain.len() < length {
        let cur = chain.last().expect("nonempty");
        let next_k = cur.max_domain().map_or(0, |k| k + 1);
        let add_table = next_k < horizon && rng::below(&mut r, 2) == 0;
        let candidate = if add_table {
            let size = spec.count_words(next_k).expect("bounded") as usize;
            let bound = spec.bound(next_k).and_then(|b| b.as_nat()).expect("bounded");
            let mut table: Vec<u64> = (0..size).map(|_| rng::below(&mut r, bound)).collect();
            for f in cur.words().iter().filter(|f| f.len() > next_k) {
                table[spec.word_index(&f[..next_k]).expect("in space")] = f[next_k];
            }
            let mut tables = cur.tables().clone();
            tables.insert(next_k, table);
            PxCondition::new(spec.clone(), tables, cur.words().iter().cloned())?
        } else {
            let len = 1 + rng::below(&mut r, horizon as u64) as usize;
            let word: Word = (0..len).map(|i| rng::below(&mut r, spec.bound(i).and_then(|b| b.as_nat()).expect("bounded"))).collect();
            cur.with_words(cur.words().iter().cloned().chain(std::iter::once(word)))?
        };
        if px_leq(&candidate, cur)? && candidate != *cur {
            chain.push(candidate);
        }
    }
    Ok(chain)
}

fn poset(config: &ExperimentConfig, cmd: &PosetCmd, out: &mut Artifacts) -> Result<String, HarnessError> {
    match cmd {
        PosetCmd::CheckOrder { bound, max_words, max_m } => {
            let spec = SpaceSpec::uniform(*bound, config.horizon.unwrap_or(2))?;
            let grid = Grid::new(spec, *max_words);
            let rows = vec![
                grid.check_partial_order(),
                grid.check_height_monotone(),
                grid.check_sigma_centered(),
                grid.check_property_iii(),
                grid.check_softness_coverage(*max_m),
            ];
            let csv: Vec<Vec<String>> = rows.iter().map(|r| vec![r.case.clone(), r.checked.to_string(), r.failures.to_string()]).collect();
            out.json("grid_report", "poset_grid.json", &rows)?;
            out.csv("poset_grid.csv", &["case", "checked", "failures"], &csv)?;
            let failures: u64 = rows.iter().map(|r| r.failures).sum();
            if failures > 0 {
                return Err(HarnessError::CheckFailed(format!("{failures} grid failures")));
            }
            Ok(format!("poset check-order: {} conditions, {} checks passed", grid.len(), rows.len()))
        }
        PosetCmd::Witnesses { p, q, m } => {
            let p: PxCondition = read_json(p, "px_condition")?;
            let q: PxCondition = read_json(q, "px_condition")?;
            let ws = softness_witnesses(&p, &q, *m)?;
            out.json("witnesses", "witnesses.json", &ws)?;
            Ok(format!("poset witnesses: {} witnesses at m = {m}", ws.len()))
        }
        PosetCmd::Generic { chain, bound, length } => {
            let chain: Vec<PxCondition> = match chain {
                Some(path) => read_json(path, "px_chain")?,
                None => {
                    let spec = SpaceSpec::uniform(*bound, config.horizon.unwrap_or(3))?;
                    random_chain(config.require_seed()?, &spec, *length)?
                }
            };
            let (predictor, coverage) = generic_predictor(&chain)?;
            #[derive(Serialize)]
            struct Generic<'a> {
                predictor: &'a Predictor,
                coverage: &'a [crate::poset::CoverageEntry],
            }
            out.json("px_chain", "poset_chain.json", &chain)?;
            out.json("generic_predictor", "generic_predictor.json", &Generic { predictor: &predictor, coverage: &coverage })?;
            let hits: usize = coverage.iter().map(|c| c.predicted.len()).sum();
            let checked: usize = coverage.iter().map(|c| c.checked.len()).sum();
            Ok(format!("poset generic: chain of {}, {hits} of {checked} later guesses correct", chain.len()))
        }
    }
}

fn diagram(cmd: &DiagramCmd, out: &mut Artifacts) -> Result<String, HarnessError> {
    let d = load_builtin_diagram();
    match cmd {
        DiagramCmd::Query { from, to } => {
            let q = d.query(from, to)?;
            out.json("diagram_query", "diagram_query.json", &q)?;
            Ok(format!("diagram query: {from} vs {to}: {:?} ({} steps)", q.verdict, q.path.len()))
        }
        DiagramCmd::Export { format } => {
            match format {
                ExportFormat::Dot => out.text("diagram.dot", &d.to_dot())?,
                ExportFormat::Json => out.json("diagram", "diagram.json", &d)?,
            };
            Ok(format!("diagram export: {} nodes, {} relations", d.nodes().len(), d.relations().len()))
        }
    }
}
