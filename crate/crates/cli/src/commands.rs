use std::sync::Arc;

use lp_projection::derivatives::{
    classify_direction, frechet_ball, frechet_cylinder, frechet_residual, gateaux_ball, gateaux_cone, gateaux_cylinder,
    numerical_gateaux, probe_operator, witness_cone_nondiff_in_cone, witness_cone_nondiff_outside,
    witness_cylinder_nondiff, witness_sphere_nondiff, StepSchedule,
};
use lp_projection::projections::{
    project_ball, project_cone, project_cylinder, variational_margin, witness_cone_empty_interior, witness_line_nonlinearity,
    witness_line_split, witness_null_cone, Point, ProjectionTarget,
};
use lp_projection::sample::{seeded_rng, unit_vector};
use lp_projection::{Exponent, IndexSet, LpVector, MeasureSpace, StepFunction};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{DeriveArgs, GateauxArgs, ProjectArgs, ResidualArgs, TargetArgs, TargetKind, WitnessArgs, WitnessName};
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_PROPERTY};
use crate::input::{named_space, parse_function, parse_vector};

/// Rendered command output and the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub exit: u8,
}

impl Report {
    fn json(value: &impl Serialize, pass: bool) -> CliResult<Self> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::parse(e.to_string()))?;
        text.push('\n');
        Ok(Self {
            text,
            exit: if pass { EXIT_OK } else { EXIT_PROPERTY },
        })
    }
}

fn exponent(p: f64) -> CliResult<Exponent> {
    Ok(Exponent::new(p)?)
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    value.as_deref().ok_or_else(|| CliError::parse(format!("missing --{flag}")))
}

fn mask(value: &Option<String>) -> CliResult<IndexSet> {
    Ok(required(value, "M")?.parse()?)
}

fn schedule(text: &str) -> CliResult<StepSchedule> {
    Ok(text.parse()?)
}

fn point_json(point: &Point) -> Value {
    match point {
        Point::Sequence(x) => json!(x),
        Point::Function(f) => json!(f.values()),
    }
}

fn build_target(args: &TargetArgs, p: Exponent) -> CliResult<ProjectionTarget> {
    Ok(match args.target {
        TargetKind::Ball => ProjectionTarget::ball(args.r, p)?,
        TargetKind::Cylinder => ProjectionTarget::cylinder(args.r, mask(&args.mask)?, p)?,
        TargetKind::Cone => ProjectionTarget::cone(named_space(&args.space)?, p),
        TargetKind::Line => ProjectionTarget::line(parse_vector(required(&args.base, "base")?, "base")?, p)?,
    })
}

pub fn project(args: &ProjectArgs) -> CliResult<Report> {
    let p = exponent(args.target.p)?;
    let target = build_target(&args.target, p)?;
    let point: Point = match &target {
        ProjectionTarget::PositiveCone { space, .. } => parse_function(required(&args.f, "f")?, "f", space)?.into(),
        _ => parse_vector(required(&args.x, "x")?, "x")?.into(),
    };
    let result = target.project(&point)?;
    let mut out = Map::new();
    out.insert("point".into(), point_json(&result.point));
    if let Some(t) = result.t_star {
        out.insert("t_star".into(), json!(t));
    }
    out.insert("boundary".into(), json!(result.boundary));
    if args.samples > 0 {
        let margin = variational_margin(&point, &result.point, &target, args.samples, args.seed)?;
        out.insert("margin".into(), json!(margin));
    }
    Report::json(&out, true)
}

fn sequence_target(args: &TargetArgs, verb: &str) -> CliResult<Option<IndexSet>> {
    match args.target {
        TargetKind::Ball => Ok(None),
        TargetKind::Cylinder => Ok(Some(mask(&args.mask)?)),
        _ => Err(CliError::precondition(format!("{verb} supports ball and cylinder targets"))),
    }
}

pub fn derive(args: &DeriveArgs) -> CliResult<Report> {
    let p = exponent(args.target.p)?;
    let m = sequence_target(&args.target, "derive")?;
    let base = parse_vector(required(&args.x, "x")?, "x")?;
    let r = args.target.r;
    let derivative = match &m {
        Some(m) => frechet_cylinder(&base, r, m, p)?,
        None => frechet_ball(&base, r, p)?,
    };
    let mut out = Map::new();
    let Some(op) = derivative.operator() else {
        out.insert("differentiable".into(), json!(false));
        out.insert("reason".into(), json!("base lies on the boundary"));
        return Report::json(&out, true);
    };
    let dim = base.dimension().max(1);
    let columns: Vec<LpVector> = (1..=dim).map(|k| op.apply(&LpVector::basis(k))).collect();
    out.insert("differentiable".into(), json!(true));
    out.insert("operator".into(), json!(op.name()));
    out.insert("bound".into(), json!(op.bound()));
    out.insert("columns".into(), json!(columns));
    out.insert("probe".into(), json!(probe_operator(op, dim + 1, p, args.samples, args.seed)));
    if let Some(w) = &args.w {
        out.insert("image".into(), json!(op.apply(&parse_vector(w, "w")?)));
    }
    Report::json(&out, true)
}

pub fn gateaux(args: &GateauxArgs) -> CliResult<Report> {
    let p = exponent(args.target.p)?;
    let steps = schedule(&args.h_schedule)?;
    if args.target.target == TargetKind::Cone {
        let space = named_space(&args.target.space)?;
        let f = parse_function(required(&args.f, "f")?, "f", &space)?;
        let g = parse_function(required(&args.g, "g")?, "g", &space)?;
        let closed = gateaux_cone(&f, &g)?;
        let est = numerical_gateaux(project_cone, &f, &g, &steps, p)?;
        let gap = closed.zip_with(&est.quotient, |a, b| a - b).lp_norm(p);
        return Report::json(
            &json!({
                "derivative": closed.values(),
                "numerical": est.quotient.values(),
                "successive_differences": est.successive_differences,
                "settling": est.is_settling(),
                "gap": gap,
            }),
            true,
        );
    }
    let m = sequence_target(&args.target, "gateaux")?;
    let r = args.target.r;
    let target = build_target(&args.target, p)?;
    let base = parse_vector(required(&args.x, "x")?, "x")?;
    let w = parse_vector(required(&args.w, "w")?, "w")?;
    let class = classify_direction(&base, &w, &target)?;
    let (closed, est) = match &m {
        Some(m) => (
            gateaux_cylinder(&base, &w, r, m, p)?,
            numerical_gateaux(|x: &LpVector| project_cylinder(x, r, m, p), &base, &w, &steps, p)?,
        ),
        None => (
            gateaux_ball(&base, &w, r, p)?,
            numerical_gateaux(|x: &LpVector| project_ball(x, r, p), &base, &w, &steps, p)?,
        ),
    };
    let gap = (&closed - &est.quotient).norm(p);
    Report::json(
        &json!({
            "class": class,
            "derivative": closed,
            "numerical": est.quotient,
            "successive_differences": est.successive_differences,
            "settling": est.is_settling(),
            "gap": gap,
        }),
        true,
    )
}

pub fn residual(args: &ResidualArgs) -> CliResult<Report> {
    let p = exponent(args.target.p)?;
    let m = sequence_target(&args.target, "residual")?;
    let steps = schedule(&args.h_schedule)?;
    let base = parse_vector(required(&args.x, "x")?, "x")?;
    if args.samples == 0 {
        return Err(CliError::parse("--samples must be positive"));
    }
    let r = args.target.r;
    let derivative = match &m {
        Some(m) => frechet_cylinder(&base, r, m, p)?,
        None => frechet_ball(&base, r, p)?,
    };
    let op = derivative
        .operator()
        .ok_or_else(|| CliError::precondition("base lies on the boundary, where no Fréchet derivative exists"))?;
    let mut rng = seeded_rng(args.seed);
    let dim = base.dimension().max(1);
    let dirs: Vec<LpVector> = (0..args.samples).map(|_| unit_vector(&mut rng, dim, p)).collect();
    let table = match &m {
        Some(m) => frechet_residual(|x| project_cylinder(x, r, m, p), |x| op.apply(x), &base, &dirs, &steps, p),
        None => frechet_residual(|x| project_ball(x, r, p), |x| op.apply(x), &base, &dirs, &steps, p),
    };
    Ok(Report {
        text: table.to_csv(),
        exit: EXIT_OK,
    })
}

fn witness_function(args: &WitnessArgs, space: &Arc<MeasureSpace>, default: f64) -> CliResult<StepFunction> {
    match &args.f {
        Some(f) => parse_function(f, "f", space),
        None => Ok(StepFunction::constant(space.clone(), default)),
    }
}

pub fn witness(args: &WitnessArgs) -> CliResult<Report> {
    let p = || exponent(args.p.unwrap_or(2.0));
    match args.name {
        WitnessName::LineSplit => {
            let r = witness_line_split()?;
            Report::json(&r, r.pass)
        }
        WitnessName::NullCone => {
            let r = witness_null_cone();
            Report::json(&r, r.pass)
        }
        WitnessName::LineNonlinear => {
            let r = witness_line_nonlinearity()?;
            Report::json(&r, r.pass)
        }
        WitnessName::Sphere => {
            let base = parse_vector(required(&args.base, "base")?, "base")?;
            let r = witness_sphere_nondiff(&base, args.r, p()?, &schedule(&args.h_schedule)?)?;
            Report::json(&r, r.pass)
        }
        WitnessName::Cylinder => {
            let base = parse_vector(required(&args.base, "base")?, "base")?;
            let r = witness_cylinder_nondiff(&base, args.r, &mask(&args.mask)?, p()?, &schedule(&args.h_schedule)?)?;
            Report::json(&r, r.pass)
        }
        WitnessName::ConeInK => {
            let space = named_space(&args.space)?;
            let f = witness_function(args, &space, 0.0)?;
            let r = witness_cone_nondiff_in_cone(&f, args.lambda, args.steps, p()?)?;
            Report::json(&r, r.pass)
        }
        WitnessName::ConeOutK => {
            let space = named_space(&args.space)?;
            let f = witness_function(args, &space, -0.5 * args.beta)?;
            let r = witness_cone_nondiff_outside(&f, args.beta, args.steps, p()?)?;
            Report::json(&r, r.pass)
        }
        WitnessName::EmptyInterior => {
            let p = p()?;
            let space = named_space(&args.space)?;
            let f = witness_function(args, &space, 0.0)?;
            let w = witness_cone_empty_interior(&f, args.eps, p)?;
            let pass = !w.g.is_nonnegative() && w.distance <= w.distance_bound && w.distance < args.eps;
            Report::json(
                &json!({
                    "p": p.p(),
                    "eps": args.eps,
                    "g": w.g.values(),
                    "atoms": w.atoms,
                    "distance": w.distance,
                    "distance_bound": w.distance_bound,
                    "pass": pass,
                }),
                pass,
            )
        }
    }
}
