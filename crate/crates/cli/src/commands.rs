use rayon::prelude::*;
use serde::Serialize;
use soergel_core::cache::cache_key;
use soergel_core::coxeter::{validate_realization, CoxeterGroup, Element, Word};
use soergel_core::hecke::HeckeElt;
use soergel_core::leaves::{bits_string, DoubleLeaves};
use soergel_core::linalg::{identity, mat_mul, Matrix};
use soergel_core::projector::{BadPrimeReport, Projector, ProjectorEngine, Reduction};
use soergel_core::Error;

use crate::config::{Command, Setup};
use crate::render::{render, ErasedReport, Report};

/// Runs a command, going through the report cache when one is configured.
/// Returns the rendered report and whether all its checks passed.
pub fn execute(setup: &Setup, cmd: &Command) -> anyhow::Result<(String, bool)> {
    let key = cache_key(cmd.name(), &setup.key_args, &setup.datum);
    let cacheable = !matches!(cmd, Command::Verify);
    if let (true, Some(cache)) = (cacheable, &setup.cache) {
        if let Some(text) = cache.get(&key) {
            return Ok((text, true));
        }
    }
    let engine = ProjectorEngine::new(setup.group.clone());
    let report: Box<dyn ErasedReport> = match cmd {
        Command::Kl => Box::new(kl(setup, &engine)?),
        Command::Leaves { .. } => Box::new(leaves(setup, &engine)?),
        Command::Projector { dlb, .. } => Box::new(projector(setup, &engine, *dlb)?),
        Command::Character { .. } => Box::new(character(setup, &engine)?),
        Command::Badprimes => Box::new(engine.bad_primes(&setup.region, setup.top)?),
        Command::Verify => Box::new(verify(setup, &engine)?),
    };
    let text = render(&*report, setup.format)?;
    let ok = report.ok();
    if let (true, true, Some(cache)) = (cacheable, ok, &setup.cache) {
        cache.put(&key, cmd.name(), &text)?;
    }
    Ok((text, ok))
}

fn word_of(setup: &Setup) -> &Word {
    setup.word.as_ref().expect("command takes a word")
}

#[derive(Serialize)]
struct KlTerm {
    y: String,
    h: String,
}

#[derive(Serialize)]
struct KlRow {
    x: String,
    length: usize,
    terms: Vec<KlTerm>,
}

#[derive(Serialize)]
struct KlReport {
    datum: String,
    rows: Vec<KlRow>,
    #[serde(skip)]
    display: Vec<String>,
}

fn kl(setup: &Setup, engine: &ProjectorEngine) -> anyhow::Result<KlReport> {
    let g = &*setup.group;
    let mut rows = Vec::new();
    let mut display = Vec::new();
    for &x in &setup.region {
        let c = engine.hecke().kl_element(x)?;
        rows.push(KlRow {
            x: g.format(x),
            length: g.length(x),
            terms: c.terms().rev().map(|(y, h)| KlTerm { y: g.format(y), h: h.to_string() }).collect(),
        });
        display.push(c.display(g).to_string());
    }
    Ok(KlReport { datum: setup.datum.label().to_string(), rows, display })
}

impl Report for KlReport {
    fn tsv_header(&self) -> &'static [&'static str] {
        &["x", "length", "c_x"]
    }
    fn tsv_rows(&self) -> Vec<Vec<String>> {
        self.rows.iter().zip(&self.display).map(|(r, d)| vec![r.x.clone(), r.length.to_string(), d.clone()]).collect()
    }
    fn text(&self) -> String {
        self.rows.iter().zip(&self.display).map(|(r, d)| format!("C'[{}] = {d}\n", r.x)).collect()
    }
}

#[derive(Serialize)]
struct LeafRow {
    i: String,
    j: String,
    target: String,
    target_word: String,
    degree: i32,
}

#[derive(Serialize)]
struct LeavesReport {
    datum: String,
    word: String,
    leaves: Vec<LeafRow>,
}

fn leaves(setup: &Setup, engine: &ProjectorEngine) -> anyhow::Result<LeavesReport> {
    let g = &*setup.group;
    let w = word_of(setup);
    let rows = engine
        .leaves()
        .skeleton(w)?
        .into_iter()
        .map(|l| LeafRow {
            i: bits_string(&l.i),
            j: bits_string(&l.j),
            target: g.format(l.target),
            target_word: CoxeterGroup::format_word(&l.target_word),
            degree: l.degree,
        })
        .collect();
    Ok(LeavesReport { datum: setup.datum.label().to_string(), word: CoxeterGroup::format_word(w), leaves: rows })
}

impl Report for LeavesReport {
    fn tsv_header(&self) -> &'static [&'static str] {
        &["i", "j", "target", "degree"]
    }
    fn tsv_rows(&self) -> Vec<Vec<String>> {
        self.leaves.iter().map(|l| vec![l.i.clone(), l.j.clone(), l.target.clone(), l.degree.to_string()]).collect()
    }
    fn text(&self) -> String {
        let mut out = format!("light leaves of {} ({} leaves)\n", self.word, self.leaves.len());
        for l in &self.leaves {
            out.push_str(&format!("  i={} j={} -> {} (degree {})\n", l.i, l.j, l.target, l.degree));
        }
        out
    }
}

#[derive(Serialize)]
struct BlockRow {
    z: String,
    z_word: String,
    multiplicity: u64,
    candidates: usize,
    leaves: Vec<String>,
    lambda: Vec<Vec<String>>,
    lambda_simple: Vec<Vec<String>>,
    simple_applies: bool,
    eta: Vec<Vec<String>>,
    det: String,
}

#[derive(Serialize)]
struct RankRow {
    x: String,
    rank: String,
}

#[derive(Serialize)]
struct ModP {
    p: u64,
    reduced: bool,
    character: Option<String>,
    offending: Vec<(String, String)>,
}

#[derive(Serialize)]
struct DlbRow {
    index: usize,
    leaf: String,
    coefficient: String,
}

#[derive(Serialize)]
struct ProjectorReport {
    datum: String,
    word: String,
    target: String,
    blocks: Vec<BlockRow>,
    ranks: Vec<RankRow>,
    character: String,
    kl_element: String,
    matches_kl: bool,
    digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    mod_p: Option<ModP>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dlb: Option<Vec<DlbRow>>,
}

fn strings(m: &Matrix) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

fn mod_p(engine: &ProjectorEngine, p: &Projector, q: Option<u64>) -> anyhow::Result<Option<ModP>> {
    let Some(q) = q else { return Ok(None) };
    let g = engine.group();
    Ok(Some(match engine.reduce_mod_p(p, q)? {
        Reduction::Reduced(m) => ModP { p: q, reduced: true, character: Some(m.character.display(g).to_string()), offending: vec![] },
        Reduction::NotLiftable { p, offending } => ModP { p, reduced: false, character: None, offending },
    }))
}

fn projector(setup: &Setup, engine: &ProjectorEngine, with_dlb: bool) -> anyhow::Result<ProjectorReport> {
    let g = &*setup.group;
    let w = word_of(setup);
    let p = engine.favorite_projector(w)?;
    let blocks = p
        .blocks
        .iter()
        .map(|b| BlockRow {
            z: g.format(b.z),
            z_word: CoxeterGroup::format_word(&b.z_word),
            multiplicity: b.multiplicity,
            candidates: b.candidates,
            leaves: b.selected.iter().map(|(i, j)| format!("i={} j={}", bits_string(i), bits_string(j))).collect(),
            lambda: strings(&b.lambda),
            lambda_simple: strings(&b.lambda_simple),
            simple_applies: b.simple_applies,
            eta: strings(&b.eta),
            det: b.det.to_string(),
        })
        .collect();
    let ch = engine.character(&p)?;
    let kl = engine.hecke().kl_element(p.target)?;
    let dlb = if with_dlb {
        let d = engine.double_leaves(w)?;
        let c = engine.dlb_coefficients(&p)?;
        Some(c.iter().map(|(&k, v)| DlbRow { index: k, leaf: d.leaves[k].label(), coefficient: v.to_string() }).collect())
    } else {
        None
    };
    let report = ProjectorReport {
        datum: setup.datum.label().to_string(),
        word: CoxeterGroup::format_word(w),
        target: g.format(p.target),
        blocks,
        ranks: ch.ranks.iter().map(|(x, r)| RankRow { x: g.format(*x), rank: r.to_string() }).collect(),
        character: ch.character.display(g).to_string(),
        kl_element: kl.display(g).to_string(),
        matches_kl: ch.character == *kl,
        digest: p.morphism.digest(),
        mod_p: mod_p(engine, &p, setup.characteristic)?,
        dlb,
    };
    Ok(report)
}

impl Report for ProjectorReport {
    fn tsv_header(&self) -> &'static [&'static str] {
        &["word", "z", "multiplicity", "leaves", "lambda", "det"]
    }
    fn tsv_rows(&self) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| {
                let lambda: Vec<String> = b.lambda.iter().map(|r| r.join(",")).collect();
                vec![self.word.clone(), b.z.clone(), b.multiplicity.to_string(), b.leaves.join(";"), lambda.join(";"), b.det.clone()]
            })
            .collect()
    }
    fn text(&self) -> String {
        let mut out = format!("favorite projector of {} (target {})\n", self.word, self.target);
        if self.blocks.is_empty() {
            out.push_str("  nothing split off\n");
        }
        for b in &self.blocks {
            out.push_str(&format!(
                "  z={} m={} |L_z|={} leaves=[{}] lambda={:?} det={}\n",
                b.z,
                b.multiplicity,
                b.candidates,
                b.leaves.join(", "),
                b.lambda,
                b.det
            ));
        }
        out.push_str(&format!("  character: {}\n", self.character));
        out.push_str(&format!("  equals C'[{}]: {}\n", self.target, self.matches_kl));
        if let Some(m) = &self.mod_p {
            if m.reduced {
                out.push_str(&format!("  mod {}: reduces, character {}\n", m.p, m.character.as_deref().unwrap_or("")));
            } else {
                out.push_str(&format!("  mod {}: not liftable ({} coefficients)\n", m.p, m.offending.len()));
            }
        }
        if let Some(d) = &self.dlb {
            for r in d {
                out.push_str(&format!("  [{}] {}: {}\n", r.index, r.leaf, r.coefficient));
            }
        }
        out
    }
    fn ok(&self) -> bool {
        self.matches_kl
    }
}

#[derive(Serialize)]
struct CharacterReport {
    datum: String,
    word: String,
    characteristic: u64,
    ranks: Vec<RankRow>,
    character: String,
    kl_element: String,
    matches_kl: bool,
    reduced: bool,
}

fn character(setup: &Setup, engine: &ProjectorEngine) -> anyhow::Result<CharacterReport> {
    let g = &*setup.group;
    let w = word_of(setup);
    let p = engine.favorite_projector(w)?;
    let kl = engine.hecke().kl_element(p.target)?;
    let (ranks, ch, reduced) = match setup.characteristic {
        None => {
            let ch = engine.character(&p)?;
            (ch.ranks, ch.character, true)
        }
        Some(q) => match engine.reduce_mod_p(&p, q)? {
            Reduction::Reduced(m) => {
                let ch = engine.leaves().character(&m.morphism)?;
                (ch.ranks, ch.character, true)
            }
            Reduction::NotLiftable { .. } => (Default::default(), HeckeElt::zero(), false),
        },
    };
    let report = CharacterReport {
        datum: setup.datum.label().to_string(),
        word: CoxeterGroup::format_word(w),
        characteristic: setup.characteristic.unwrap_or(0),
        ranks: ranks.iter().map(|(x, r)| RankRow { x: g.format(*x), rank: r.to_string() }).collect(),
        character: ch.display(g).to_string(),
        kl_element: kl.display(g).to_string(),
        matches_kl: ch == *kl,
        reduced,
    };
    Ok(report)
}

impl Report for CharacterReport {
    fn tsv_header(&self) -> &'static [&'static str] {
        &["x", "graded_rank"]
    }
    fn tsv_rows(&self) -> Vec<Vec<String>> {
        self.ranks.iter().map(|r| vec![r.x.clone(), r.rank.clone()]).collect()
    }
    fn text(&self) -> String {
        if !self.reduced {
            return format!("projector of {} does not reduce mod {}\n", self.word, self.characteristic);
        }
        format!("character of {}: {}\nequals the KL basis element: {}\n", self.word, self.character, self.matches_kl)
    }
    fn ok(&self) -> bool {
        self.reduced && self.matches_kl
    }
}

impl Report for BadPrimeReport {
    fn tsv_header(&self) -> &'static [&'static str] {
        &["x", "z", "multiplicity", "det", "primes"]
    }
    fn tsv_rows(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|e| {
                let primes: Vec<String> = e.primes.iter().map(u64::to_string).collect();
                vec![e.x.clone(), e.z.clone(), e.multiplicity.to_string(), e.det.clone(), primes.join(",")]
            })
            .collect()
    }
    fn text(&self) -> String {
        let mut out = format!("bad primes of {} over {} elements\n", self.datum, self.region_size);
        for e in &self.entries {
            out.push_str(&format!("  x={} z={} m={} det={} primes={:?}\n", e.x, e.z, e.multiplicity, e.det, e.primes));
        }
        out.push_str(&format!("D = {:?}\n", self.d));
        for f in &self.flags {
            out.push_str(&format!("note: {f}\n"));
        }
        out
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    subject: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    datum: String,
    region_size: usize,
    characteristic: u64,
    checks: Vec<Check>,
    passed: bool,
}

fn check(name: &'static str, subject: &str, r: soergel_core::Result<String>) -> soergel_core::Result<Check> {
    match r {
        Ok(detail) => Ok(Check { name, subject: subject.to_string(), passed: true, detail }),
        Err(e) if e.is_theory_violation() => Ok(Check { name, subject: subject.to_string(), passed: false, detail: e.to_string() }),
        Err(e) => Err(e),
    }
}

fn verify_element(engine: &ProjectorEngine, x: Element, q: Option<u64>) -> soergel_core::Result<Vec<Check>> {
    let g = engine.group();
    let w = engine.leaves().words().canonical_word(x);
    let name = g.format(x);
    let mut out = Vec::new();
    out.push(check("degree certificate", &name, (|| {
        let oracle = engine.hecke().dlb_degree_oracle(&w, &w)?;
        let d = DoubleLeaves::new(engine.leaves(), &w, &w)?;
        let counted = if d.degree_count() == oracle && engine.leaves().double_leaf_degrees(&w, &w)? == oracle {
            Ok(format!("{} double leaves", d.len()))
        } else {
            Err(Error::TheoryViolation(format!("double leaves count {} but the trace gives {oracle}", d.degree_count())))
        };
        counted.and_then(|s| d.check_unitriangular().map(|_| s))
    })())?);
    out.push(check("distinct targets", &name, engine.leaves().check_distinct_targets(&w).map(|n| format!("{n} leaves")))?);
    let proj = engine.favorite_projector(&w);
    out.push(check(
        "projector",
        &name,
        proj.as_ref().map(|p| format!("{} summands split off", p.blocks.len())).map_err(Clone::clone),
    )?);
    let Ok(p) = proj else { return Ok(out) };
    out.push(check("lambda eta", &name, {
        let bad = p.blocks.iter().find(|b| mat_mul(&b.lambda, &b.eta) != identity(b.lambda.len()));
        match bad {
            None => Ok(format!("{} blocks", p.blocks.len())),
            Some(b) => Err(Error::TheoryViolation(format!("lambda eta is not the identity at {}", g.format(b.z)))),
        }
    })?);
    out.push(check("character", &name, (|| {
        let ch = engine.character(&p)?.character;
        if ch == *engine.hecke().kl_element(x)? {
            Ok("equals the KL basis element".into())
        } else {
            Err(Error::TheoryViolation(format!("character {} differs from the KL basis element", ch.display(g))))
        }
    })())?);
    if let Some(q) = q {
        out.push(check(
            "mod p reduction",
            &name,
            engine.reduce_mod_p(&p, q).map(|r| match r {
                Reduction::Reduced(_) => format!("reduces mod {q}"),
                Reduction::NotLiftable { offending, .. } => format!("not liftable mod {q}: {} coefficients", offending.len()),
            }),
        )?);
    }
    Ok(out)
}

fn verify(setup: &Setup, engine: &ProjectorEngine) -> anyhow::Result<VerifyReport> {
    let g = &*setup.group;
    let real = validate_realization(g, &setup.region);
    let mut checks = vec![Check {
        name: "realization",
        subject: setup.datum.label().to_string(),
        passed: real.passed,
        detail: format!("{} pairs, {} failures", real.pairs_checked, real.failures.len()),
    }];
    let per: Vec<Vec<Check>> = setup
        .region
        .par_iter()
        .map(|&x| verify_element(engine, x, setup.characteristic))
        .collect::<soergel_core::Result<_>>()?;
    checks.extend(per.into_iter().flatten());
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        datum: setup.datum.label().to_string(),
        region_size: setup.region.len(),
        characteristic: setup.characteristic.unwrap_or(0),
        checks,
        passed,
    })
}

impl Report for VerifyReport {
    fn tsv_header(&self) -> &'static [&'static str] {
        &["check", "subject", "passed", "detail"]
    }
    fn tsv_rows(&self) -> Vec<Vec<String>> {
        self.checks.iter().map(|c| vec![c.name.to_string(), c.subject.clone(), c.passed.to_string(), c.detail.clone()]).collect()
    }
    fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{} {:<20} {:<24} {}\n", if c.passed { "ok  " } else { "FAIL" }, c.name, c.subject, c.detail));
        }
        out.push_str(&format!(
            "{}: {} checks over {} elements of {}\n",
            if self.passed { "passed" } else { "FAILED" },
            self.checks.len(),
            self.region_size,
            self.datum
        ));
        out
    }
    fn ok(&self) -> bool {
        self.passed
    }
}
