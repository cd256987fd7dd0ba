use serde::Deserialize;
use serde_json::{json, Value};

use commsum::fack::{
    fack_iterate, positive_rank, random_start, trapecio_step, BlockSplitInstance, InnerStep, TowerSpec,
};
use commsum::matcore::{verify_decomposition, BoundCheck, ComplexMatrix, HermitianMatrix, Tolerances};
use commsum::obstruct::{
    distance_lower_bound_cert, obstruction_certificate, pp_example as build_pp_example, villadsen_tower_with,
    BundleExpr, KRule, ObstructionCertificate,
};
use commsum::ozfield::{
    circle_refinement_study, decompose_field_with, is_trace_zero_field, FieldOptions, SimplicialField,
    VertexColoring,
};
use commsum::rng::seeded;
use commsum::selfcomm::{
    self_commutator_decompose_with, tight_commutator_decompose_with, CommutatorDecomposition, DecompositionJson,
};

use crate::{parse, CliError, Outcome, RunConfig};

pub(crate) fn tolerances(config: &RunConfig) -> Tolerances {
    Tolerances::with_verify(config.tol)
}

fn flag(measured_bad: bool) -> f64 {
    if measured_bad {
        1.0
    } else {
        0.0
    }
}

pub(crate) fn hermitian_input(input: &Value, prefix: &str) -> Result<HermitianMatrix, CliError> {
    let m: ComplexMatrix = parse(input, prefix)?;
    if !m.is_square() {
        return Err(CliError::new(prefix, "matrix must be square"));
    }
    HermitianMatrix::new(m).map_err(|e| {
        let inner = CliError::from(e);
        let path = match (prefix, inner.path.as_str()) {
            ("", p) | (p, "") => p.to_string(),
            (a, b) => format!("{a}.{b}"),
        };
        CliError::new(path, inner.message)
    })
}

fn decomposition_json(d: &CommutatorDecomposition, element: &ComplexMatrix) -> Result<Value, CliError> {
    let j = DecompositionJson::from_decomposition(d, element)?;
    Ok(serde_json::to_value(j).expect("serializes"))
}

pub(crate) fn decompose(config: &RunConfig, input: &Value, tight: bool) -> Result<Outcome, CliError> {
    let a = hermitian_input(input, "")?;
    let tol = tolerances(config);
    let d = if tight {
        tight_commutator_decompose_with(&a, &tol)?
    } else {
        self_commutator_decompose_with(&a, &tol)?
    };
    let report = verify_decomposition(a.as_matrix(), &d, &tol)?;
    Ok(Outcome::new(decomposition_json(&d, a.as_matrix())?, report))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SmoothTarget {
    smooth_target: String,
}

pub(crate) fn field_options(config: &RunConfig) -> FieldOptions {
    FieldOptions {
        tol: config.tol.max(1e-8),
        ..FieldOptions::default()
    }
}

/// The input field subdivided `refine + 1` times, with the last dimension coloring.
pub(crate) fn subdivided_field(config: &RunConfig, input: &Value) -> Result<(SimplicialField, VertexColoring), CliError> {
    let field: SimplicialField = parse(input, "")?;
    let (mut f, mut coloring) = field.subdivide();
    for _ in 0..config.refine {
        (f, coloring) = f.subdivide();
    }
    Ok((f, coloring))
}

/// Ratio bound for consecutive residuals of the circle study.
pub const REFINEMENT_RATIO: f64 = 0.6;

pub(crate) fn decompose_field(config: &RunConfig, input: &Value) -> Result<Outcome, CliError> {
    let options = field_options(config);
    if input.get("smooth_target").is_some() {
        let target: SmoothTarget = parse(input, "")?;
        if target.smooth_target != "circle" {
            return Err(CliError::new("smooth_target", "only \"circle\" is available"));
        }
        let levels = circle_refinement_study(config.refine, &options)?;
        let mut checks = Vec::new();
        for w in levels.windows(2).skip(1) {
            checks.push(BoundCheck::new(
                format!("refinement_ratio[{}]", w[0].level),
                REFINEMENT_RATIO,
                w[1].residual / w[0].residual,
                0.0,
            ));
        }
        for l in &levels {
            checks.push(BoundCheck::new(format!("factor_count[{}]", l.level), 2.0, l.factor_count as f64, 0.0));
        }
        return Ok(Outcome::from_checks(json!({ "smooth_target": "circle", "levels": levels }), checks));
    }
    let (field, coloring) = subdivided_field(config, input)?;
    let d = decompose_field_with(&field, &coloring, &options)?;
    let result = json!({
        "subdivisions": config.refine + 1,
        "vertices": field.complex().vertex_count(),
        "decomposition": d,
    });
    Ok(Outcome::new(result, d.report))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
enum FackMode {
    Exact,
    Approximate,
    Step,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FackInput {
    tower: TowerSpec,
    #[serde(default)]
    z0: Option<ComplexMatrix>,
    #[serde(default)]
    mode: Option<FackMode>,
}

pub(crate) fn fack_run(config: &RunConfig, input: &Value) -> Result<Outcome, CliError> {
    let inp: FackInput = parse(input, "")?;
    let mut rng = seeded(config.seed);
    let tower = inp.tower.build(&mut rng)?;
    let z0 = match inp.z0 {
        Some(z) => z,
        None => random_start(&mut rng, &tower)?,
    };
    let tol = tolerances(config);
    let mode = inp.mode.unwrap_or(FackMode::Exact);
    if let FackMode::Step = mode {
        if tower.depth() == 0 {
            return Err(CliError::new("tower.blocks", "a step needs at least two blocks"));
        }
        let b = tower.positive_part(1)?;
        let step = trapecio_step(&z0, &tower.elements[0], &b, tower.params(0))?;
        let d = step.decomposition(&z0);
        let result = json!({
            "mode": "step",
            "n": tower.n,
            "z0": z0,
            "decomposition": decomposition_json(&d, &z0)?,
            "z_norm": step.z.operator_norm(),
            "neumann_iterations": step.neumann_iterations,
            "ranks": {
                "ramp": step.witness.rank_ramp,
                "positive_part": step.witness.rank_positive_part,
                "b": positive_rank(&b)?,
            },
        });
        return Ok(Outcome::new(result, step.report));
    }
    let inner = match mode {
        FackMode::Approximate => InnerStep::Approximate,
        _ => InnerStep::Exact,
    };
    let depth = config.depth.unwrap_or(tower.depth());
    let r = fack_iterate(&z0, &tower, depth, inner)?;
    let mut report = verify_decomposition(&z0, &r.decomposition, &tol)?;
    for c in r.collapse_checks() {
        report.push(c);
    }
    let result = json!({
        "mode": r.mode,
        "n": tower.n,
        "depth": depth,
        "z0": z0,
        "decomposition": decomposition_json(&r.decomposition, &z0)?,
        "stages": r.stages,
        "families": r.families,
        "step_count": r.step_count,
        "statement_count_bound": r.statement_count_bound,
        "proof_count_bound": r.proof_count_bound,
    });
    Ok(Outcome::new(result, report))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomSplit {
    blocks: usize,
    size: usize,
    rank: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomSplitInput {
    random: RandomSplit,
}

pub(crate) fn split_instance(config: &RunConfig, input: &Value) -> Result<BlockSplitInstance, CliError> {
    if input.get("random").is_some() {
        let r: RandomSplitInput = parse(input, "")?;
        let RandomSplit { blocks, size, rank } = r.random;
        if blocks == 0 || size == 0 || rank > size {
            return Err(CliError::new("random", "need blocks ≥ 1, size ≥ 1 and rank ≤ size"));
        }
        let mut rng = seeded(config.seed);
        Ok(BlockSplitInstance::random(&mut rng, blocks, size, rank)?)
    } else {
        parse(input, "")
    }
}

pub(crate) fn block_split(config: &RunConfig, input: &Value) -> Result<Outcome, CliError> {
    let inst = split_instance(config, input)?;
    let split = inst.split()?;
    let report = split.report.clone();
    Ok(Outcome::new(json!({ "instance": inst, "split": split }), report))
}

/// `"bott"` (one sphere), `{"bott_power": k}`, or an explicit bundle.
#[derive(Deserialize)]
#[serde(untagged)]
enum BundleInput {
    Named(String),
    BottPower { bott_power: usize },
    Explicit(BundleExpr),
}

fn bundle(b: BundleInput, path: &str) -> Result<BundleExpr, CliError> {
    match b {
        BundleInput::Named(s) if s == "bott" => Ok(BundleExpr::bott(1, 0)?),
        BundleInput::Named(s) if s == "trivial" => Ok(BundleExpr::trivial(1, 1)?),
        BundleInput::Named(s) => Err(CliError::new(path, format!("unknown bundle {s:?}"))),
        BundleInput::BottPower { bott_power } => Ok(BundleExpr::bott_power(bott_power)?),
        BundleInput::Explicit(e) => {
            e.validate().map_err(|err| CliError::new(path, err.to_string()))?;
            Ok(e)
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstructInput {
    q: BundleInput,
    n: usize,
    #[serde(default)]
    p: Option<BundleInput>,
    #[serde(default)]
    m: Option<usize>,
}

pub(crate) fn certificate_checks(c: &ObstructionCertificate, prefix: &str) -> Result<Vec<BoundCheck>, CliError> {
    let recheck = c.recheck()?;
    Ok(vec![
        BoundCheck::new(format!("{prefix}verdict_has_nonzero_class"), 0.0, flag(c.verdict && c.euler_class.is_zero()), 0.0),
        BoundCheck::new(format!("{prefix}recheck_identical"), 0.0, flag(&recheck != c), 0.0),
    ])
}

pub(crate) fn obstruct(input: &Value) -> Result<Outcome, CliError> {
    let inp: ObstructInput = parse(input, "")?;
    if inp.n == 0 {
        return Err(CliError::new("n", "n must be positive"));
    }
    let q = bundle(inp.q, "q")?;
    let cert = if inp.p.is_some() || inp.m.is_some() {
        let p = match inp.p {
            Some(p) => bundle(p, "p")?,
            None => BundleExpr::trivial(q.variable_count, 1)?,
        };
        distance_lower_bound_cert(&p, &q, inp.n, inp.m.unwrap_or(1))?
    } else {
        obstruction_certificate(&q, inp.n)?
    };
    let checks = certificate_checks(&cert, "")?;
    Ok(Outcome::from_checks(serde_json::to_value(&cert).expect("serializes"), checks))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PpInput {
    m: usize,
}

pub(crate) fn pp_example(input: &Value) -> Result<Outcome, CliError> {
    let inp: PpInput = parse(input, "")?;
    let ex = build_pp_example(inp.m)?;
    let mut checks = certificate_checks(&ex.certificate, "certificate.")?;
    checks.extend(certificate_checks(&ex.distance_certificate, "distance_certificate.")?);
    checks.push(BoundCheck::new("certificate.verdict", 0.0, flag(!ex.certificate.verdict), 0.0));
    if let Some(f) = &ex.field {
        checks.push(BoundCheck::new("field_trace_zero", 0.0, flag(!is_trace_zero_field(f)), 0.0));
    }
    Ok(Outcome::from_checks(serde_json::to_value(&ex).expect("serializes"), checks))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerInput {
    m_max: usize,
    #[serde(default)]
    k_rule: KRule,
}

pub(crate) fn tower(input: &Value) -> Result<Outcome, CliError> {
    let inp: TowerInput = parse(input, "")?;
    let t = villadsen_tower_with(inp.m_max, inp.k_rule)?;
    let failing = t.stages.iter().filter(|s| !s.verdict).count();
    let checks = vec![BoundCheck::new("failing_stages", 0.0, failing as f64, 0.0)];
    Ok(Outcome::from_checks(serde_json::to_value(&t).expect("serializes"), checks))
}
