use serde::Deserialize;
use serde_json::{json, Value};

use commsum::matcore::{commutator, verify_decomposition, BoundCheck, ComplexMatrix, VerificationReport};
use commsum::obstruct::{ObstructionCertificate, PpExample};
use commsum::ozfield::{measure, FieldDecomposition};
use commsum::selfcomm::DecompositionJson;

use crate::commands::{field_options, split_instance, subdivided_field, tolerances};
use crate::{dispatch, parse, CliError, Command, Outcome, RunConfig};

#[derive(Deserialize)]
struct Document {
    command: Command,
    config: RunConfig,
    input: Value,
    result: Value,
    report: VerificationReport,
}

fn close(name: &str, stored: f64, measured: f64, tol: f64) -> BoundCheck {
    let scale = stored.abs().max(1.0);
    BoundCheck::new(name, 0.0, (stored - measured).abs(), tol * scale)
}

fn flag_check(name: &str, bad: bool) -> BoundCheck {
    BoundCheck::new(name, 0.0, if bad { 1.0 } else { 0.0 }, 0.0)
}

/// Re-measures a stored decomposition of `element` from its factors.
fn decomposition_checks(element: &ComplexMatrix, stored: &DecompositionJson, doc: &Document) -> Result<Vec<BoundCheck>, CliError> {
    let d = stored.to_decomposition()?;
    let tol = tolerances(&doc.config);
    let report = verify_decomposition(element, &d, &tol)?;
    let fresh = DecompositionJson::from_decomposition(&d, element)?;
    let mut checks: Vec<BoundCheck> = report
        .bound_checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("remeasured.{}", c.name);
            c
        })
        .collect();
    checks.push(close("residual_norm", stored.residual_norm, report.residual_norm, tol.verify));
    for (name, value) in &stored.bounds {
        match fresh.bounds.get(name) {
            Some(m) => checks.push(close(&format!("bounds.{name}"), *value, *m, tol.verify)),
            None => checks.push(flag_check(&format!("bounds.{name}"), true)),
        }
    }
    Ok(checks)
}

fn report_checks(stored: &VerificationReport, fresh: &VerificationReport, tol: f64) -> Vec<BoundCheck> {
    let mut checks = Vec::new();
    for c in &fresh.bound_checks {
        checks.push(BoundCheck { name: format!("remeasured.{}", c.name), ..c.clone() });
        match stored.check(&c.name) {
            Some(s) => checks.push(close(&format!("stored.{}", c.name), s.measured_value, c.measured_value, tol)),
            None => checks.push(flag_check(&format!("stored.{}", c.name), true)),
        }
    }
    checks
}

fn rederive(doc: &Document) -> Result<Vec<BoundCheck>, CliError> {
    let tol = doc.config.tol;
    match doc.command {
        Command::Decompose | Command::DecomposeTight => {
            let a = crate::commands::hermitian_input(&doc.input, "input")?;
            let stored: DecompositionJson = parse(&doc.result, "result")?;
            decomposition_checks(a.as_matrix(), &stored, doc)
        }
        Command::FackRun => {
            let z0: ComplexMatrix = parse(&doc.result["z0"], "result.z0")?;
            let stored: DecompositionJson = parse(&doc.result["decomposition"], "result.decomposition")?;
            decomposition_checks(&z0, &stored, doc)
        }
        Command::DecomposeField if doc.input.get("smooth_target").is_none() => {
            let (field, coloring) = subdivided_field(&doc.config, &doc.input)?;
            let stored: FieldDecomposition = parse(&doc.result["decomposition"], "result.decomposition")?;
            let options = field_options(&doc.config);
            let fresh = measure(&field, &coloring, stored.factors.clone(), &options);
            let mut checks = report_checks(&doc.report, &fresh.report, tol);
            for (k, (s, f)) in stored.factor_norms_sq.iter().zip(&fresh.factor_norms_sq).enumerate() {
                checks.push(close(&format!("factor_norms_sq[{k}]"), *s, *f, tol));
            }
            Ok(checks)
        }
        Command::BlockSplit => {
            let inst = split_instance(&doc.config, &doc.input)?;
            let s: ComplexMatrix = parse(&doc.result["split"]["s"], "result.split.s")?;
            let e: ComplexMatrix = parse(&doc.result["split"]["e_shift"], "result.split.e_shift")?;
            let bp: ComplexMatrix = parse(&doc.result["split"]["b_prime"], "result.split.b_prime")?;
            let bpp: ComplexMatrix = parse(&doc.result["split"]["b_doubleprime"], "result.split.b_doubleprime")?;
            let scale = inst.b.operator_norm().max(1.0);
            let bracket = commutator(&s, &e)?;
            Ok(vec![
                BoundCheck::new("b_prime_commutator", 0.0, (&bracket - &bp).operator_norm(), tol * scale),
                BoundCheck::new("reconstruction", 0.0, (&inst.b - &(&bracket + &bpp)).operator_norm(), tol * scale),
            ])
        }
        Command::Obstruct => {
            let cert: ObstructionCertificate = parse(&doc.result, "result")?;
            Ok(vec![flag_check("certificate_recheck", cert.recheck()? != cert)])
        }
        Command::PpExample => {
            let ex: PpExample = parse(&doc.result, "result")?;
            Ok(vec![
                flag_check("certificate_recheck", ex.certificate.recheck()? != ex.certificate),
                flag_check(
                    "distance_certificate_recheck",
                    ex.distance_certificate.recheck()? != ex.distance_certificate,
                ),
            ])
        }
        Command::DecomposeField | Command::Tower | Command::Verify => Ok(Vec::new()),
    }
}

/// Re-derives every numeric claim of an output document and reruns it.
pub(crate) fn verify(_config: &RunConfig, input: &Value) -> Result<Outcome, CliError> {
    if input.get("error").is_some() {
        return Err(CliError::new("error", "an error document has nothing to verify"));
    }
    let doc: Document = parse(input, "")?;
    let mut checks = rederive(&doc)?;
    let rerun = dispatch(&doc.config, &doc.input)?;
    checks.push(flag_check("rerun_result_identical", rerun.result != doc.result));
    checks.push(flag_check("rerun_report_identical", rerun.report != doc.report));
    checks.push(flag_check("stored_report_passed", !doc.report.passed()));
    let result = json!({
        "verified_command": doc.command.name(),
        "checks": checks.len(),
    });
    Ok(Outcome::from_checks(result, checks))
}
