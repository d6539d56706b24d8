use std::cmp::Ordering;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use typelattice::selftest::{self, SelftestConfig};
use typelattice::{
    cotorsion_image_report, ext_vanishes_rank1, parse_type, poset_embed, powerset_embed,
    quotient_shape, separate, vanishes_via_shape, verify_embedding, CotorsionImageReport,
    Embedding, Error, FinitePoset, PosetFile, PrimeIndexing, SeparationReport, TypeRep,
    VerificationBudget, Witness,
};

pub const SCHEMA: &str = selftest::SCHEMA;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Parse(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => CliError::Parse(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub struct Output {
    pub body: String,
    pub code: u8,
}

const VERIFICATION_FAILED: u8 = 3;
const INVARIANT_BREACH: u8 = 4;

pub struct Session {
    indexing: PrimeIndexing,
    budget: VerificationBudget,
    seed: u64,
    json: bool,
}

impl Session {
    pub fn new(
        modulus: usize,
        m_max: u32,
        k_max: u32,
        prime_count: usize,
        seed: u64,
        json: bool,
    ) -> Result<Self, CliError> {
        if m_max == 0 || k_max == 0 || prime_count == 0 {
            return Err(CliError::Usage(
                "--m-max, --k-max and --primes must be at least 1".into(),
            ));
        }
        Ok(Session {
            indexing: PrimeIndexing::new(modulus)?,
            budget: VerificationBudget {
                m_max,
                k_max,
                prime_count,
            },
            seed,
            json,
        })
    }

    fn parse(&self, text: &str) -> Result<TypeRep, CliError> {
        parse_type(text, self.indexing).map_err(|e| CliError::Parse(format!("in {text:?}: {e}")))
    }

    fn emit(&self, command: &str, payload: serde_json::Value, text: String, code: u8) -> Output {
        let body = if self.json {
            let mut doc = json!({ "schema": SCHEMA, "command": command });
            if let (Some(doc), serde_json::Value::Object(fields)) = (doc.as_object_mut(), payload) {
                doc.extend(fields);
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
            s.push('\n');
            s
        } else {
            text
        };
        Output { body, code }
    }

    pub fn cmp(&self, left: &str, right: &str) -> Result<Output, CliError> {
        let (a, b) = (self.parse(left)?, self.parse(right)?);
        let answer = match a.compare(&b)? {
            Some(Ordering::Equal) => "equivalent",
            Some(Ordering::Less) => "less",
            Some(Ordering::Greater) => "greater",
            None => "incomparable",
        };
        let payload = json!({ "left": a, "right": b, "result": answer });
        Ok(self.emit("cmp", payload, format!("{answer}\n"), 0))
    }

    pub fn join(&self, left: &str, right: &str) -> Result<Output, CliError> {
        let (a, b) = (self.parse(left)?, self.parse(right)?);
        let result = a.join(&b)?;
        let payload = json!({ "left": a, "right": b, "result": result });
        Ok(self.emit("join", payload, format!("{result}\n"), 0))
    }

    pub fn meet(&self, left: &str, right: &str) -> Result<Output, CliError> {
        let (a, b) = (self.parse(left)?, self.parse(right)?);
        let result = a.meet(&b)?;
        let payload = json!({ "left": a, "right": b, "result": result });
        Ok(self.emit("meet", payload, format!("{result}\n"), 0))
    }

    pub fn ext(&self, t: &str, x: &str) -> Result<Output, CliError> {
        let (t, x) = (self.parse(t)?, self.parse(x)?);
        let criterion = ext_vanishes_rank1(&t, &x)?;
        let shape = quotient_shape(&x, &t)?;
        let via_shape = vanishes_via_shape(&shape);
        let class = if criterion { "Zero" } else { "Continuum" };
        let agree = criterion == via_shape;
        let word = |v: bool| if v { "vanishes" } else { "nonzero" };
        let mut text = format!("{class}\n");
        let _ = writeln!(text, "criterion route: {}", word(criterion));
        let _ = writeln!(text, "quotient-shape route: {}", word(via_shape));
        for component in &shape.components {
            let _ = writeln!(text, "  {:?} on {}", component.kind, component.primes);
        }
        if !agree {
            text.push_str("routes disagree\n");
        }
        let payload = json!({
            "t": t,
            "x": x,
            "class": class,
            "criterion": criterion,
            "shape_route": via_shape,
            "shape": shape,
            "routes_agree": agree,
        });
        Ok(self.emit(
            "ext",
            payload,
            text,
            if agree { 0 } else { INVARIANT_BREACH },
        ))
    }

    pub fn separate(&self, lower: &str, upper: &str) -> Result<Output, CliError> {
        let (tau, rho) = (self.parse(lower)?, self.parse(upper)?);
        let report = separate(&tau, &rho, self.budget)?;
        let mut text = String::new();
        write_separation(&mut text, &report);
        let payload = json!({ "lower": tau, "upper": rho, "separation": report });
        let code = if report.verified {
            0
        } else {
            VERIFICATION_FAILED
        };
        Ok(self.emit("separate", payload, text, code))
    }

    pub fn embed_powerset(&self, n: usize) -> Result<Output, CliError> {
        let embedding = powerset_embed(n, self.indexing)?;
        let poset = FinitePoset::powerset(n);
        let labels = (0..poset.len())
            .map(|mask| format!("{{{}}}", join((0..n).filter(|i| mask >> i & 1 == 1))))
            .collect();
        self.embed_output(&embedding, &poset, labels)
    }

    pub fn embed_poset(&self, path: &Path) -> Result<Output, CliError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: PosetFile = serde_json::from_str(&raw)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let poset = FinitePoset::from_file(&file)?;
        let embedding = poset_embed(&poset, self.indexing)?;
        let labels = (0..poset.len()).map(|a| a.to_string()).collect();
        self.embed_output(&embedding, &poset, labels)
    }

    fn embed_output(
        &self,
        embedding: &Embedding,
        poset: &FinitePoset,
        labels: Vec<String>,
    ) -> Result<Output, CliError> {
        let verified = verify_embedding(embedding, poset);
        let report = if verified {
            Some(cotorsion_image_report(embedding, poset, self.budget)?)
        } else {
            None
        };
        let ok = verified && report.as_ref().is_some_and(|r| r.all_verified);

        let mut text = String::new();
        for (label, ty) in labels.iter().zip(&embedding.assignment) {
            let _ = writeln!(text, "{label} -> {ty}");
        }
        let _ = writeln!(text, "order embedding: {}", pass(verified));
        if let Some(report) = &report {
            write_image_report(&mut text, report, &labels);
        }

        #[derive(Serialize)]
        struct Assigned<'a> {
            element: &'a str,
            #[serde(rename = "type")]
            ty: &'a TypeRep,
        }
        let assignment: Vec<Assigned> = labels
            .iter()
            .zip(&embedding.assignment)
            .map(|(element, ty)| Assigned { element, ty })
            .collect();
        let payload = json!({
            "modulus": embedding.indexing,
            "assignment": assignment,
            "order_embedding": verified,
            "cotorsion_image": report,
        });
        Ok(self.emit(
            "embed",
            payload,
            text,
            if ok { 0 } else { VERIFICATION_FAILED },
        ))
    }

    pub fn selftest(&self, trials: usize, powerset_max: usize) -> Result<Output, CliError> {
        if powerset_max > self.indexing.modulus() {
            return Err(CliError::Usage(format!(
                "--powerset-max {powerset_max} exceeds the modulus {}",
                self.indexing.modulus()
            )));
        }
        let config = SelftestConfig {
            seed: self.seed,
            trials,
            budget: self.budget,
            powerset_max,
            ..SelftestConfig::default()
        };
        let report = selftest::run(&config);
        let mut text = String::new();
        for check in &report.checks {
            let _ = writeln!(
                text,
                "{} {} ({} cases, {} failures)",
                pass(check.passed),
                check.name,
                check.trials,
                check.failures
            );
            if let Some(first) = &check.first_failure {
                let _ = writeln!(text, "    first failure: {first}");
            }
        }
        let _ = writeln!(
            text,
            "{}",
            if report.all_passed {
                "all checks passed"
            } else {
                "some checks FAILED"
            }
        );
        let code = if report.all_passed {
            0
        } else {
            INVARIANT_BREACH
        };
        let payload = serde_json::to_value(&report).expect("reports serialize");
        Ok(self.emit("selftest", payload, text, code))
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn write_separation(out: &mut String, report: &SeparationReport) {
    let _ = writeln!(out, "cases: {}", join(&report.cases));
    match &report.witness {
        Witness::RankOne { x } => {
            let _ = writeln!(out, "witness: rank-1 group of type {x}");
        }
        Witness::InfiniteRank { g } => {
            let _ = writeln!(out, "witness: {g}");
        }
    }
    if let Some(numeric) = &report.numeric {
        let failing: Vec<u64> = numeric
            .records
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.p)
            .collect();
        let span = match (numeric.records.first(), numeric.records.last()) {
            (Some(first), Some(last)) => format!("p = {}..{}", first.p, last.p),
            _ => "no primes".to_string(),
        };
        let _ = writeln!(
            out,
            "numeric check: {} primes ({span}), m ≤ {}, k ≤ {}, failing primes: [{}]",
            numeric.records.len(),
            numeric.m_max,
            numeric.k_max,
            join(failing)
        );
    }
    let _ = writeln!(out, "verdict: {}", pass(report.verified));
}

fn write_image_report(out: &mut String, report: &CotorsionImageReport, labels: &[String]) {
    for cover in &report.covers {
        let sep = &cover.separation;
        let witness = match &sep.witness {
            Witness::RankOne { x } => x.to_string(),
            Witness::InfiniteRank { g } => g.to_string(),
        };
        let _ = writeln!(
            out,
            "{} < {}: cases {} witness {} {}",
            labels[cover.lower],
            labels[cover.upper],
            join(&sep.cases),
            witness,
            pass(sep.verified)
        );
    }
    let _ = writeln!(out, "incomparable pairs: {}", report.incomparable.len());
    let _ = writeln!(out, "cotorsion image: {}", pass(report.all_verified));
}
