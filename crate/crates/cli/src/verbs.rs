//! One function per verb. Each returns the rendered report and, when a
//! checked property fails, the reason to print on standard error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use spx_core::face_ring::{choose_lsop, parse_element, FaceRing, Lsop};
use spx_core::generators::{corpus, negative_corpus, parity_corpus, GeneratorSpec};
use spx_core::homology::{
    check_two_facets_per_ridge, fundamental_chain_boundary, is_gorenstein_star, order_complex,
    GorensteinReport, RidgeReport,
};
use spx_core::index::{build_frames, ind_t, verify_parity, IndexReport, ParityReport};
use spx_core::poset::ValidationReport;
use spx_core::SimplicialPoset;

use crate::failure::{Exit, Failure};
use crate::{Format, Outcome};

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn emit<T: Serialize>(fmt: Format, value: &T, text: impl FnOnce(&T) -> String) -> String {
    match fmt {
        Format::Json => serde_json::to_string_pretty(value).expect("report serializes"),
        Format::Text => text(value),
    }
}

fn ok(body: String) -> Result<Outcome, Failure> {
    Ok(Outcome { body, failure: None })
}

fn first_violation(report: &ValidationReport) -> String {
    report
        .violations
        .first()
        .map(ToString::to_string)
        .unwrap_or_else(|| "invalid".to_string())
}

fn load(text: &str) -> Result<SimplicialPoset, Failure> {
    Ok(SimplicialPoset::from_json(text)?)
}

/// Parses and requires the simplicial axioms; used by every verb that
/// computes on the poset.
fn load_valid(text: &str) -> Result<SimplicialPoset, Failure> {
    let p = load(text)?;
    let report = p.validate();
    if !report.pass {
        return Err(Failure::input("INVALID_POSET", first_violation(&report)));
    }
    Ok(p)
}

pub fn validate(text: &str, fmt: Format) -> Result<Outcome, Failure> {
    let report = load(text)?.validate();
    let body = emit(fmt, &report, |r| {
        let mut s = format!(
            "{}: {} elements, rank {}, {}\n",
            r.name,
            r.elements,
            r.rank,
            if r.pass { "PASS" } else { "FAIL" }
        );
        for v in &r.violations {
            let _ = writeln!(s, "  {v}");
        }
        s
    });
    let failure = (!report.pass).then(|| Failure::failed("INVALID_POSET", first_violation(&report)));
    Ok(Outcome { body, failure })
}

#[derive(Serialize)]
struct Vectors {
    name: String,
    f: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<Vec<i64>>,
}

pub fn vectors(text: &str, fmt: Format, with_h: bool) -> Result<Outcome, Failure> {
    let p = load_valid(text)?;
    let v = Vectors {
        name: p.name().to_string(),
        f: p.f_vector(),
        h: with_h.then(|| p.h_vector()),
    };
    ok(emit(fmt, &v, |v| {
        let mut s = format!("f: {}\n", join(&v.f));
        if let Some(h) = &v.h {
            let _ = writeln!(s, "h: {}", join(h));
        }
        s
    }))
}

#[derive(Serialize)]
struct OrientationSummary {
    checked: bool,
    orientable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Serialize)]
struct GorensteinOutput {
    name: String,
    gorenstein: GorensteinReport,
    ridges: RidgeReport,
    orientation: OrientationSummary,
}

pub fn gorenstein(text: &str, fmt: Format, export: Option<&Path>) -> Result<Outcome, Failure> {
    let p = load_valid(text)?;
    if let Some(path) = export {
        std::fs::write(path, order_complex(&p).export_triplets())
            .map_err(|e| Failure::input("IO", format!("{}: {e}", path.display())))?;
    }
    let report = is_gorenstein_star(&p)?;
    let ridges = check_two_facets_per_ridge(&p)?;
    let orientation = if ridges.pass {
        match spx_core::homology::orient(&p) {
            Ok(o) => OrientationSummary {
                checked: true,
                orientable: fundamental_chain_boundary(&p, &o).is_empty(),
                components: Some(o.components),
                reason: None,
            },
            Err(e) => OrientationSummary {
                checked: true,
                orientable: false,
                components: None,
                reason: Some(e.to_string()),
            },
        }
    } else {
        OrientationSummary {
            checked: false,
            orientable: false,
            components: None,
            reason: Some("some ridge does not lie below exactly two facets".to_string()),
        }
    };
    let failure = if !report.pass {
        Some(Failure::not_gorenstein(&report))
    } else if !orientation.orientable {
        Some(Failure::new(
            Exit::Internal,
            "INCONSISTENT",
            "Gorenstein* poset failed the ridge or orientation check",
        ))
    } else {
        None
    };
    let out = GorensteinOutput {
        name: p.name().to_string(),
        gorenstein: report,
        ridges,
        orientation,
    };
    let body = emit(fmt, &out, |o| {
        let g = &o.gorenstein;
        let mut s = format!(
            "{}: gorenstein* {} ({} chains checked, reduced betti {})\n",
            o.name,
            if g.pass { "PASS" } else { "FAIL" },
            g.faces_checked,
            join(&g.betti)
        );
        if let Some(w) = &g.failure {
            let _ = writeln!(
                s,
                "  failing chain [{}]: link dim {}, betti {}, expected {}-sphere",
                join(&w.face),
                w.link_dim,
                join(&w.betti),
                w.expected_dim
            );
        }
        let _ = writeln!(
            s,
            "ridges: {} ({} checked, {} violations)",
            if o.ridges.pass { "PASS" } else { "FAIL" },
            o.ridges.ridges,
            o.ridges.violations.len()
        );
        let _ = writeln!(
            s,
            "orientation: {}",
            match (&o.orientation.reason, o.orientation.orientable) {
                (_, true) => "orientable".to_string(),
                (Some(r), false) => format!("not orientable: {r}"),
                (None, false) => "not orientable".to_string(),
            }
        );
        s
    });
    Ok(Outcome { body, failure })
}

#[derive(Serialize)]
struct OrientedFacet {
    facet: usize,
    sign: i64,
    /// Atom order, 1-based.
    order: Vec<usize>,
}

#[derive(Serialize)]
struct OrientOutput {
    name: String,
    components: usize,
    boundary_zero: bool,
    facets: Vec<OrientedFacet>,
}

pub fn orient(text: &str, fmt: Format) -> Result<Outcome, Failure> {
    let p = load_valid(text)?;
    let o = spx_core::homology::orient(&p)?;
    let out = OrientOutput {
        name: p.name().to_string(),
        components: o.components,
        boundary_zero: fundamental_chain_boundary(&p, &o).is_empty(),
        facets: o
            .order
            .iter()
            .map(|(&y, order)| OrientedFacet {
                facet: y,
                sign: o.sign[&y],
                order: order.iter().map(|a| a + 1).collect(),
            })
            .collect(),
    };
    let failure = (!out.boundary_zero).then(|| {
        Failure::new(Exit::Internal, "INCONSISTENT", "oriented facets do not form a cycle")
    });
    let body = emit(fmt, &out, |o| {
        let mut s = format!("{}: {} component(s)\n", o.name, o.components);
        for f in &o.facets {
            let _ = writeln!(s, "  e{} {:+} [{}]", f.facet, f.sign, join(&f.order));
        }
        s
    });
    Ok(Outcome { body, failure })
}

pub fn lsop(text: &str, fmt: Format, seed: u64, check_dims: bool) -> Result<Outcome, Failure> {
    let p = load_valid(text)?;
    let l = choose_lsop(&p, seed)?;
    let mut report = l.report(&p);
    let mut failure = None;
    if check_dims {
        let ring = FaceRing::new(&p);
        let d = p.rank();
        let dims: Vec<usize> = (0..=d + 1)
            .map(|i| ring.quotient_graded_dimension(&l, i))
            .collect();
        let h = p.h_vector();
        let matches = dims[d + 1] == 0
            && dims[..=d]
                .iter()
                .zip(&h)
                .all(|(&a, &b)| i64::try_from(a).ok() == Some(b));
        if !matches {
            failure = Some(Failure::failed(
                "DIMENSION_MISMATCH",
                format!("quotient dims {dims:?} differ from h {h:?}"),
            ));
        }
        report.quotient_dims = Some(dims);
        report.h = Some(h);
    }
    let body = emit(fmt, &report, |r| {
        let mut s = String::new();
        for (j, form) in r.forms.iter().enumerate() {
            let _ = writeln!(s, "t{} = {form}", j + 1);
        }
        for f in &r.determinants {
            let _ = writeln!(s, "det C(e{}) [{}] = {}", f.facet, join(&f.atoms), f.det);
        }
        let _ = writeln!(s, "attempts: {}", r.attempts);
        if let (Some(q), Some(h)) = (&r.quotient_dims, &r.h) {
            let _ = writeln!(s, "quotient dims: {}", join(q));
            let _ = writeln!(s, "h: {}", join(h));
        }
        s
    });
    Ok(Outcome { body, failure })
}

#[derive(Serialize)]
struct IndexOutput {
    seed: u64,
    parameters: Vec<String>,
    #[serde(flatten)]
    report: IndexReport,
}

fn frames_for(p: &SimplicialPoset, l: &Lsop) -> Result<spx_core::index::Frames, Failure> {
    let o = spx_core::homology::orient(p)?;
    Ok(build_frames(p, l, &o))
}

pub fn index(text: &str, fmt: Format, seed: u64, element: &str) -> Result<Outcome, Failure> {
    let p = load_valid(text)?;
    let l = choose_lsop(&p, seed)?;
    let frames = frames_for(&p, &l)?;
    let ring = FaceRing::new(&p);
    let alpha = parse_element(&ring, Some(&l), element)?;
    let report = ind_t(&frames, &alpha)?;
    let out = IndexOutput {
        seed,
        parameters: (0..l.dim()).map(|j| l.form(j).render("x")).collect(),
        report,
    };
    ok(emit(fmt, &out, |o| {
        let mut s = format!("element: {}\n", o.report.element);
        for t in &o.report.terms {
            let _ = writeln!(s, "  e{} (sign {:+}, m {}): {}", t.facet, t.sign, t.m, t.term);
        }
        let _ = writeln!(s, "ind_T = {}", o.report.value.render("t"));
        s
    }))
}

fn parity_text(r: &ParityReport) -> String {
    let mut s = format!(
        "h: {}\nfacets: {}\neven: {}\nhypothesis met: {}\n",
        join(&r.h),
        r.facets,
        r.even,
        r.hypothesis_met
    );
    for c in &r.classes {
        let _ = writeln!(s, "  class [{}]: sum {}, size {}", join(&c.atoms), c.sum, c.size);
    }
    s
}

pub fn parity(text: &str, fmt: Format, seed: u64) -> Result<Outcome, Failure> {
    let p = load_valid(text)?;
    let report = verify_parity(&p, seed)?;
    ok(emit(fmt, &report, parity_text))
}

pub fn generate(spec: &str, d: Option<usize>) -> Result<Outcome, Failure> {
    let spec: GeneratorSpec = if spec.contains(':') || spec.contains('(') {
        if d.is_some() {
            return Err(Failure::input(
                "BAD_GENERATOR",
                format!("'{spec}' already fixes its parameters; drop --d"),
            ));
        }
        spec.parse()?
    } else {
        GeneratorSpec::from_kind(spec, d)?
    };
    ok(spec.build().to_json())
}

#[derive(Serialize)]
struct Check {
    poset: String,
    check: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct SelftestOutput {
    seed: u64,
    pass: bool,
    checks: Vec<Check>,
}

/// Runs the pipeline on every corpus member and reports one line per check.
pub fn selftest(fmt: Format, seed: u64) -> Result<Outcome, Failure> {
    let mut checks = Vec::new();
    let mut internal = None;
    let mut seen = BTreeSet::new();
    let entries = corpus().into_iter().chain(parity_corpus()).chain(negative_corpus());
    for e in entries {
        let name = e.spec.to_string();
        if !seen.insert(name.clone()) {
            continue;
        }
        let p = &e.poset;
        let mut push = |check, pass, detail: String| {
            checks.push(Check {
                poset: name.clone(),
                check,
                pass,
                detail,
            })
        };
        let v = p.validate();
        push("validate", v.pass, format!("{} elements", v.elements));
        let g = is_gorenstein_star(p).map(|r| r.pass).unwrap_or(false);
        push(
            "gorenstein",
            g == e.gorenstein,
            format!("expected {}, got {}", e.gorenstein, g),
        );
        if !e.gorenstein {
            continue;
        }
        let h = p.h_vector();
        let symmetric = h.iter().eq(h.iter().rev());
        push("dehn-sommerville", symmetric, format!("h = [{}]", join(&h)));
        if p.rank() <= 3 {
            match choose_lsop(p, seed) {
                Ok(l) => {
                    let ring = FaceRing::new(p);
                    let dims: Vec<i64> = (0..=p.rank())
                        .map(|i| ring.quotient_graded_dimension(&l, i) as i64)
                        .collect();
                    push("quotient-dims", dims == h, format!("[{}]", join(&dims)));
                }
                Err(err) => push("quotient-dims", false, err.to_string()),
            }
        }
        match verify_parity(p, seed) {
            Ok(r) => {
                let pass = !r.hypothesis_met || r.even;
                let sums: Vec<i64> = r.classes.iter().map(|c| c.sum).collect();
                push(
                    "parity",
                    pass,
                    format!("{} facets, class sums [{}]", r.facets, join(&sums)),
                );
            }
            Err(err) => {
                if err.is_internal() && internal.is_none() {
                    internal = Some(Failure::new(
                        Exit::Internal,
                        "SELFTEST_INTERNAL",
                        format!("{name}: {err}"),
                    ));
                }
                push("parity", false, err.to_string());
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let out = SelftestOutput { seed, pass, checks };
    let body = emit(fmt, &out, |o| {
        let mut s = String::new();
        for c in &o.checks {
            let _ = writeln!(
                s,
                "[{}] {} {}: {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.poset,
                c.check,
                c.detail
            );
        }
        let failed = o.checks.iter().filter(|c| !c.pass).count();
        let _ = writeln!(s, "{} checks, {failed} failed", o.checks.len());
        s
    });
    let failure = internal.or_else(|| {
        (!pass).then(|| {
            let first = out.checks.iter().find(|c| !c.pass).expect("a failing check");
            Failure::failed(
                "SELFTEST_FAILED",
                format!("{} {}: {}", first.poset, first.check, first.detail),
            )
        })
    });
    Ok(Outcome { body, failure })
}
