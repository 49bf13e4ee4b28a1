//! Batch jobs: a JSON job description in, a JSON report out.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cubic::{curve_invariants, twist_scale, CubicSpec, TernaryCubic};
use crate::elliptic::{count_points, Curve, Point};
use crate::error::{DescentError, Result};
use crate::etale::{kummer_representatives, ClassSource, DescentClass, DescentClassSpec, Etale};
use crate::field::{is_prime, Tower};
use crate::flex::{flex, FlexOutput};
use crate::hesse::{hesse, HesseOutput};
use crate::pipeline::Setup;
use crate::segre::{count_common_zeros, expected_dims, segre, QuadricSystemSpec, SegreOutput};
use crate::theta::tau1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Hesse,
    Flex,
    Segre,
    #[default]
    All,
}

impl Method {
    fn runs(self, m: Method) -> bool {
        self == Method::All || self == m
    }
}

/// `fast` counts points over `F_p` only; `full` adds `F_{p^2}` and the
/// zero count of the quadric system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    Fast,
    #[default]
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllClassesTag {
    #[serde(rename = "all-classes")]
    AllClasses,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfinityTag {
    #[serde(rename = "infinity")]
    Infinity,
}

/// A rational point `[x, y]` or `"infinity"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JobPoint {
    Affine([u64; 2]),
    Infinity(InfinityTag),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassSelector {
    All(AllClassesTag),
    Point { point: JobPoint },
    Rho { rho: DescentClassSpec },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub p: u64,
    pub a4: i64,
    pub a6: i64,
    pub n: usize,
    pub classes: ClassSelector,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub verify: VerifyLevel,
}

impl JobSpec {
    /// Rejects bad input before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DescentError::InvalidInput(m));
        if !(self.p > 3 && self.p < (1 << 31) && is_prime(self.p)) {
            return bad(format!("p = {} is not a prime in (3, 2^31)", self.p));
        }
        if self.n < 2 || self.p.is_multiple_of(self.n as u64) {
            return bad(format!("n = {} must be at least 2 and prime to p", self.n));
        }
        if self.n != 3 && matches!(self.method, Method::Hesse | Method::Flex) {
            return bad("the hesse and flex methods need n = 3".into());
        }
        Curve::new(&Tower::new(self.p), self.a4, self.a6)?;
        Ok(())
    }
}

pub type Checks = BTreeMap<String, bool>;

#[derive(Clone, Debug, Serialize)]
pub struct TorsionSummary {
    pub m: usize,
    pub frobenius_matrix: [[usize; 2]; 2],
    pub zeta_order: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct HesseReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubic: Option<CubicSpec>,
    pub candidates: Vec<CubicSpec>,
    pub nu: usize,
    pub checks: Checks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FlexReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubic: Option<CubicSpec>,
    pub checks: Checks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SegreReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrics: Option<QuadricSystemSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubic: Option<CubicSpec>,
    pub checks: Checks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MethodReports {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hesse: Option<HesseReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flex: Option<FlexReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segre: Option<SegreReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub source: ClassSource,
    pub rho_digest: String,
    pub methods: MethodReports,
    /// Agreement of invariants and point counts between the methods that ran.
    pub cross: Checks,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub job: JobSpec,
    pub torsion: TorsionSummary,
    pub classes: Vec<ClassReport>,
    pub status: String,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        let m = &self.methods;
        let ok = |c: &Checks, e: &Option<String>| e.is_none() && c.values().all(|&b| b);
        m.hesse.as_ref().is_none_or(|r| ok(&r.checks, &r.error))
            && m.flex.as_ref().is_none_or(|r| ok(&r.checks, &r.error))
            && m.segre.as_ref().is_none_or(|r| ok(&r.checks, &r.error))
            && self.cross.values().all(|&b| b)
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == "PASS"
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SHA-256 of the serialized `rho` table, hex encoded.
pub fn rho_digest(et: &Etale, class: &DescentClass) -> String {
    let table = serde_json::to_vec(&et.class_spec(class).rho).expect("table serializes");
    Sha256::digest(&table)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Runs every requested method on every requested class.
pub fn run(job: &JobSpec) -> Result<Report> {
    job.validate()?;
    let setup = Setup::new(job.p, job.a4, job.a6, job.n, job.seed)?;
    let et = &setup.etale;
    let td = et.torsion();
    let classes = select_classes(&setup, job)?;
    let torsion = TorsionSummary {
        m: td.m(),
        frobenius_matrix: td.frobenius_matrix(),
        zeta_order: zeta_order(td.zeta()),
    };
    let mut reports = Vec::new();
    for class in &classes {
        reports.push(run_class(&setup, job, class)?);
    }
    let status = if reports.iter().all(ClassReport::passed) {
        "PASS"
    } else {
        "FAIL"
    };
    Ok(Report {
        job: job.clone(),
        torsion,
        classes: reports,
        status: status.into(),
    })
}

fn zeta_order(z: &crate::field::Fe) -> usize {
    let o = z.multiplicative_order().expect("zeta is nonzero");
    o.to_u64_digits().first().copied().unwrap_or(1) as usize
}

fn select_classes(setup: &Setup, job: &JobSpec) -> Result<Vec<DescentClass>> {
    let et = &setup.etale;
    let k = setup.curve.tower().prime();
    match &job.classes {
        ClassSelector::All(_) => kummer_representatives(&setup.curve, job.n)
            .iter()
            .map(|p| et.class_from_point(p, job.seed))
            .collect(),
        ClassSelector::Point { point } => {
            let p = match point {
                JobPoint::Infinity(_) => Point::Infinity,
                JobPoint::Affine([x, y]) => setup.curve.point(k.from_u64(*x), k.from_u64(*y))?,
            };
            Ok(vec![et.class_from_point(&p, job.seed)?])
        }
        ClassSelector::Rho { rho } => Ok(vec![et.class_from_spec(rho)?]),
    }
}

/// Checks shared by every output cubic.
fn cubic_checks(setup: &Setup, f: &TernaryCubic, level: VerifyLevel, checks: &mut Checks) {
    let curve = &setup.curve;
    let inv = f.invariants();
    let (c4e, c6e) = curve_invariants(curve);
    checks.insert("smooth".into(), !inv.disc.is_zero());
    checks.insert(
        "jacobian".into(),
        twist_scale(&inv.c4, &inv.c6, &c4e, &c6e).is_some(),
    );
    checks.insert("rational_point".into(), f.rational_point().is_some());
    let tw = curve.tower();
    checks.insert(
        "count_k1".into(),
        count_points(curve, 1) == f.count_points(tw, 1).into(),
    );
    if level == VerifyLevel::Full {
        checks.insert(
            "count_k2".into(),
            count_points(curve, 2) == f.count_points(tw, 2).into(),
        );
    }
}

fn run_class(setup: &Setup, job: &JobSpec, class: &DescentClass) -> Result<ClassReport> {
    let et = &setup.etale;
    let seed = job.seed;
    let mut methods = MethodReports::default();
    let mut cubics: Vec<TernaryCubic> = Vec::new();
    let odd3 = job.n == 3;

    // Flex runs whenever Hesse does: it picks the Hesse member of the class.
    let flex_out: Option<Result<FlexOutput>> =
        (odd3 && (job.method.runs(Method::Flex) || job.method.runs(Method::Hesse))).then(|| {
            let tm = setup
                .translations
                .as_ref()
                .ok_or_else(|| DescentError::Unsupported("no translation matrices".into()))?;
            let t1 = tau1(et, tm)?;
            flex(et, &setup.epsilon, &t1, &class.rho, seed)
        });

    if odd3 && job.method.runs(Method::Hesse) {
        let mut r = HesseReport::default();
        match hesse(et, &setup.epsilon, &class.rho, seed) {
            Ok(h) => {
                hesse_report(setup, job, class, &h, flex_out.as_ref(), &mut r);
                if let Some(c) = r.cubic.as_ref() {
                    cubics.push(TernaryCubic::from_spec(&et.k(), c)?);
                }
            }
            Err(e) => r.error = Some(format!("hesse: {e}")),
        }
        methods.hesse = Some(r);
    }

    if odd3 && job.method.runs(Method::Flex) {
        let mut r = FlexReport::default();
        match flex_out.as_ref().expect("flex ran") {
            Ok(f) => {
                cubic_checks(setup, &f.cubic, job.verify, &mut r.checks);
                if let Some(h) = methods.hesse.as_ref() {
                    r.checks.insert(
                        "in_hesse_candidates".into(),
                        h.candidates.contains(&f.cubic.normalized().spec()),
                    );
                }
                r.cubic = Some(f.cubic.normalized().spec());
                cubics.push(f.cubic.clone());
            }
            Err(e) => r.error = Some(format!("flex: {e}")),
        }
        methods.flex = Some(r);
    }

    if job.method.runs(Method::Segre) {
        let mut r = SegreReport::default();
        match setup
            .epsilon_f(seed)
            .and_then(|ef| segre(et, &ef, &class.rho, seed))
        {
            Ok(s) => {
                segre_report(setup, job, &s, &mut r);
                if let Some(c) = s.cubic.as_ref() {
                    cubics.push(c.clone());
                }
            }
            Err(e) => r.error = Some(format!("segre: {e}")),
        }
        methods.segre = Some(r);
    }

    let mut cross = Checks::new();
    if cubics.len() > 1 {
        let tw = setup.curve.tower();
        let first = cubics[0].invariants();
        cross.insert(
            "invariants_agree".into(),
            cubics[1..].iter().all(|c| {
                let i = c.invariants();
                twist_scale(&i.c4, &i.c6, &first.c4, &first.c6).is_some()
            }),
        );
        let degrees: &[usize] = match job.verify {
            VerifyLevel::Fast => &[1],
            VerifyLevel::Full => &[1, 2],
        };
        cross.insert(
            "counts_agree".into(),
            degrees.iter().all(|&k| {
                let c0 = cubics[0].count_points(tw, k);
                cubics[1..].iter().all(|c| c.count_points(tw, k) == c0)
            }),
        );
    }

    Ok(ClassReport {
        source: class.source.clone(),
        rho_digest: rho_digest(et, class),
        methods,
        cross,
    })
}

fn hesse_report(
    setup: &Setup,
    job: &JobSpec,
    class: &DescentClass,
    h: &HesseOutput,
    flex_out: Option<&Result<FlexOutput>>,
    r: &mut HesseReport,
) {
    let et = &setup.etale;
    r.nu = h.nu;
    r.candidates = h.candidates.iter().map(TernaryCubic::spec).collect();
    r.checks
        .insert("candidates_eq_nu".into(), h.candidates.len() == h.nu);
    let kappa = et.kappa(&class.rho);
    r.checks.insert(
        "det_class_is_kappa".into(),
        kappa.is_ok_and(|k| k == h.det_class),
    );
    let chosen = match flex_out {
        Some(Ok(f)) => {
            let target = f.cubic.normalized();
            h.candidates.iter().find(|c| **c == target).cloned()
        }
        _ if h.candidates.len() == 1 => Some(h.candidates[0].clone()),
        _ => None,
    };
    r.checks.insert("member_selected".into(), chosen.is_some());
    if let Some(c) = chosen {
        cubic_checks(setup, &c, job.verify, &mut r.checks);
        r.checks.insert(
            "stabilized".into(),
            c.is_stabilized_by(setup.curve.tower(), &h.matrices),
        );
        r.cubic = Some(c.spec());
    }
}

fn segre_report(setup: &Setup, job: &JobSpec, s: &SegreOutput, r: &mut SegreReport) {
    let (d1, d2) = expected_dims(job.n);
    r.checks.insert(
        "dimensions".into(),
        s.system.type1.len() == d1 && s.system.type2.len() == d2,
    );
    // Enumerating P^(n^2-1) is only cheap for tiny n and p.
    let enumerable = job.n == 2 || (job.n == 3 && job.p <= 7);
    if job.verify == VerifyLevel::Full && enumerable {
        r.checks.insert(
            "quadric_zeros".into(),
            count_points(&setup.curve, 1) == count_common_zeros(&s.system).into(),
        );
    }
    if let Some(c) = s.cubic.as_ref() {
        cubic_checks(setup, c, job.verify, &mut r.checks);
        r.checks.insert(
            "stabilized".into(),
            c.is_stabilized_by(setup.curve.tower(), &s.matrices),
        );
        r.cubic = Some(c.spec());
    }
    r.quadrics = Some(s.system.spec());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn job_parses_each_class_form() {
        let all: JobSpec = serde_json::from_str(
            r#"{"p":7,"a4":3,"a6":2,"n":3,"classes":"all-classes","method":"hesse"}"#,
        )
        .unwrap();
        assert_eq!(all.classes, ClassSelector::All(AllClassesTag::AllClasses));
        assert_eq!(all.verify, VerifyLevel::Full);
        let pt: JobSpec = serde_json::from_str(
            r#"{"p":7,"a4":3,"a6":2,"n":3,"classes":{"point":[2,3]},"seed":4,"verify":"fast"}"#,
        )
        .unwrap();
        assert_eq!(
            pt.classes,
            ClassSelector::Point {
                point: JobPoint::Affine([2, 3])
            }
        );
        let inf: JobSpec = serde_json::from_str(
            r#"{"p":7,"a4":3,"a6":2,"n":3,"classes":{"point":"infinity"}}"#,
        )
        .unwrap();
        assert_eq!(
            inf.classes,
            ClassSelector::Point {
                point: JobPoint::Infinity(InfinityTag::Infinity)
            }
        );
    }

    #[test]
    fn validation() {
        let mut j: JobSpec = serde_json::from_str(
            r#"{"p":9,"a4":1,"a6":1,"n":3,"classes":"all-classes"}"#,
        )
        .unwrap();
        assert!(j.validate().is_err());
        j.p = 7;
        assert!(j.validate().is_ok());
        j.n = 7;
        assert!(j.validate().is_err());
        j.n = 2;
        j.method = Method::Flex;
        assert!(j.validate().is_err());
        j.method = Method::Segre;
        j.a4 = 0;
        j.a6 = 0;
        assert!(j.validate().is_err());
    }
}
