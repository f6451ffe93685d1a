use std::f64::consts::TAU;
use std::path::Path;

use hplus_core::construction::{
    assemble_u, build_gn, check_endgame, choose_params, solve_hinfty_partition, verify_estimates, BoundedInterpolant,
};
use hplus_core::density::{
    check_condition_a, classify as run_classify, fit_condition_a, fit_condition_b, fit_condition_c, fit_condition_d,
    DensityConstants, Witness,
};
use hplus_core::error::Error as CoreError;
use hplus_core::gallery::{counterexample_pair, counterexample_union, dyadic_lattice, radial_geometric, GENERATORS};
use hplus_core::geometry::CarlesonBox;
use hplus_core::interp::{
    check_compatibility, generate_compatible_values, solve_direct, InterpolationProblem, InterpolationResult, Side,
};
use hplus_core::measure::{BoundaryMeasure, GridSpec};
use hplus_core::necessity::{fitted_constant, radial_projection_profile, PositiveHarmonic, RadialProjectionEstimate};
use hplus_core::sequence::PointSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::input::{load_measure, load_partition, load_sequence, load_values, LoadedMeasure, SequenceFile};
use crate::output::RunReport;
use crate::svg::DiscPicture;
use crate::Context;

/// File-name stem from a sequence label.
fn stem(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "sequence".into()
    } else {
        s
    }
}

fn describe(w: &Witness) -> String {
    match *w {
        Witness::Ball { base, level, count } => format!("{count} points within beta <= {level} of z_{base}"),
        Witness::Disc { base, radius, count } => format!("{count} points within rho <= {radius:.4} of z_{base}"),
        Witness::Layer { base, level, count } => format!("{count} points in layer {level} of Q(z_{base})"),
        Witness::PowerSum { base, sum } => format!("power sum {sum:.4} over Q(z_{base})"),
        Witness::Pair { first, second } => format!("closest pair z_{first}, z_{second}"),
        Witness::Box { base, side, sum } => format!("box of side {side:.3e} over z_{base}, mass {sum:.4}"),
    }
}

#[derive(Serialize)]
struct ConditionRow {
    condition: &'static str,
    passed: bool,
    value: f64,
    m_const: Option<f64>,
    alpha: Option<f64>,
    witness: String,
}

#[derive(Serialize)]
struct FitRow {
    alpha: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

pub fn classify(
    ctx: &Context,
    report: &mut RunReport,
    input: &Path,
    alpha: f64,
    m_const: f64,
    fit: bool,
) -> CliResult<()> {
    let seq = load_sequence(input)?;
    let c = DensityConstants::new(m_const, alpha)?;
    report.param("input", input);
    report.param("points", seq.len());
    report.param("alpha", alpha);
    report.param("m", m_const);
    let result = report.timed("classify", || run_classify(&seq, &c));
    let mut rows = Vec::new();
    for r in &result.records {
        let witness = r.witness.as_ref().map(describe).unwrap_or_default();
        let detail = match r.constants {
            Some(k) => format!("fitted {:.4} vs M = {} at alpha = {}; {witness}", r.value, k.m_const, k.alpha),
            None => format!("value {:.4e}; {witness}", r.value),
        };
        report.check(format!("condition {}", r.condition.id()), r.passed, detail);
        rows.push(ConditionRow {
            condition: r.condition.id(),
            passed: r.passed,
            value: r.value,
            m_const: r.constants.map(|k| k.m_const),
            alpha: r.constants.map(|k| k.alpha),
            witness,
        });
    }
    report.output(ctx.out.write_csv(&format!("{}.classify.csv", stem(seq.label())), &rows)?);

    if fit {
        let fits: Vec<FitRow> = report.timed("fit", || {
            (1..=9)
                .map(|k| {
                    let a = k as f64 / 10.0;
                    FitRow {
                        alpha: a,
                        a: fit_condition_a(&seq, a).0,
                        b: fit_condition_b(&seq, a).0,
                        c: fit_condition_c(&seq, a).0,
                        d: fit_condition_d(&seq, a).0,
                    }
                })
                .collect()
        });
        let mut table = String::from("smallest constants by exponent:\n  alpha        (a)        (b)        (c)        (d)");
        for f in &fits {
            table.push_str(&format!(
                "\n  {:5.1} {:10.4} {:10.4} {:10.4} {:10.4}",
                f.alpha, f.a, f.b, f.c, f.d
            ));
        }
        report.note(table);
        report.output(ctx.out.write_csv(&format!("{}.fit.csv", stem(seq.label())), &fits)?);
    }
    Ok(())
}

#[derive(Serialize)]
struct AtomRow {
    angle: f64,
    mass: f64,
}

#[derive(Serialize)]
struct ResidualRow {
    node: usize,
    value: f64,
    achieved: f64,
    relative_residual: f64,
}

#[derive(Serialize)]
struct CertificateRow {
    node: usize,
    x_n: f64,
    side: &'static str,
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::T => "T",
        Side::S => "S",
    }
}

fn solve_with_retry(
    report: &mut RunReport,
    problem: &InterpolationProblem,
    grid: &GridSpec,
) -> CliResult<InterpolationResult> {
    let first = report.timed("solve", || solve_direct(problem, grid))?;
    if first.is_feasible() {
        return Ok(first);
    }
    let finer = grid.refined();
    report.note(format!(
        "infeasible on {} grid angles; retrying at resolution {} with {} extra angles per point",
        first.grid_size, finer.resolution, finer.refinement
    ));
    Ok(report.timed("solve (refined)", || solve_direct(problem, &finer))?)
}

pub fn solve(
    ctx: &Context,
    report: &mut RunReport,
    input: &Path,
    values: Option<&Path>,
    epsilon: f64,
) -> CliResult<()> {
    let seq = load_sequence(input)?;
    let w = match values {
        Some(p) => load_values(p)?,
        None => generate_compatible_values(&seq, epsilon, ctx.seed),
    };
    report.param("input", input);
    report.param("points", seq.len());
    report.param("epsilon", epsilon);
    report.param("values", values.map(|p| p.display().to_string()).unwrap_or_else(|| "generated".into()));
    let problem = InterpolationProblem::new(seq.clone(), w, epsilon, ctx.tolerance)?;
    let (compatible, worst) = check_compatibility(&problem);
    report.check(
        "compatible",
        compatible,
        match worst {
            Some(p) => format!("worst pair z_{}, z_{} at ratio {:.4}", p.first, p.second, p.ratio),
            None => "every pair within 2^(eps beta)".into(),
        },
    );
    let result = solve_with_retry(report, &problem, &ctx.grid)?;
    let name = stem(seq.label());
    if let Some(mu) = &result.measure {
        report.check(
            "feasible",
            true,
            format!(
                "{} atoms on {} grid angles, max relative residual {:.2e}",
                mu.atoms().len(),
                result.grid_size,
                result.max_residual()
            ),
        );
        let atoms: Vec<AtomRow> = mu.atoms().iter().map(|&(angle, mass)| AtomRow { angle, mass }).collect();
        report.output(ctx.out.write_csv(&format!("{name}.atoms.csv"), &atoms)?);
        let rows: Vec<ResidualRow> = seq
            .points()
            .iter()
            .enumerate()
            .map(|(n, z)| ResidualRow {
                node: n,
                value: problem.values()[n],
                achieved: mu.poisson_integral(z),
                relative_residual: result.residuals[n],
            })
            .collect();
        report.output(ctx.out.write_csv(&format!("{name}.residuals.csv"), &rows)?);
    } else {
        let cert = result
            .certificate
            .as_ref()
            .ok_or_else(|| CliError::internal("infeasible verdict without a certificate"))?;
        report.check(
            "feasible",
            false,
            format!(
                "certificate <x, w> = {:.4e}, worst grid column {:.2e}, slack {:.4e} on {} grid angles{}",
                cert.margin,
                cert.worst_column,
                result.slack,
                result.grid_size,
                match cert.exact {
                    Some(true) => ", confirmed in exact arithmetic",
                    Some(false) => ", NOT confirmed in exact arithmetic",
                    None => "",
                }
            ),
        );
        report.note("the certificate rules out the grid problem; a finer grid could still be feasible");
        let rows: Vec<CertificateRow> = cert
            .x
            .iter()
            .zip(&cert.sides)
            .enumerate()
            .map(|(node, (&x_n, &s))| CertificateRow {
                node,
                x_n,
                side: side_name(s),
            })
            .collect();
        report.output(ctx.out.write_csv(&format!("{name}.certificate.csv"), &rows)?);
    }
    Ok(())
}

pub struct ConstructArgs<'a> {
    pub input: &'a Path,
    pub delta: f64,
    pub alpha: f64,
    pub m_const: Option<f64>,
    pub partition: Option<&'a Path>,
    pub epsilon: Option<f64>,
    pub values: Option<&'a Path>,
}

#[derive(Serialize)]
struct ArcRow {
    node: usize,
    arc_start: f64,
    arc_length: f64,
}

#[derive(Serialize)]
struct EstimateRow {
    node: usize,
    case: String,
    e_measure: f64,
    g_measure: f64,
    cover_margin: f64,
    tail_sum: f64,
}

#[derive(Serialize)]
struct EndgameRow {
    node: usize,
    side: &'static str,
    value: f64,
    u: f64,
    u_t_only: f64,
    holds: bool,
}

fn bounded_interpolant(
    report: &mut RunReport,
    seq: &PointSequence,
    sides: &[Side],
    grid: &GridSpec,
    tolerance: f64,
) -> CliResult<BoundedInterpolant> {
    match report.timed("bounded interpolation", || solve_hinfty_partition(seq, sides, grid, tolerance)) {
        Err(CoreError::GammaResolution { .. }) => {
            let finer = grid.refined();
            report.note(format!("bounded interpolation unresolved; retrying at resolution {}", finer.resolution));
            Ok(report.timed("bounded interpolation (refined)", || {
                solve_hinfty_partition(seq, sides, &finer, tolerance)
            })?)
        }
        r => Ok(r?),
    }
}

pub fn construct(ctx: &Context, report: &mut RunReport, a: &ConstructArgs) -> CliResult<()> {
    let seq = load_sequence(a.input)?;
    let m_const = match a.m_const {
        Some(m) => m,
        None => fit_condition_a(&seq, a.alpha).0.max(f64::MIN_POSITIVE),
    };
    let constants = DensityConstants::new(m_const, a.alpha)?;
    report.param("input", a.input);
    report.param("points", seq.len());
    report.param("delta", a.delta);
    report.param("alpha", a.alpha);
    report.param("m", m_const);

    let params = match report.timed("parameters", || choose_params(&seq, &constants, a.delta)) {
        Err(CoreError::DensityViolated { fitted, bound }) => {
            let out = check_condition_a(&seq, &constants);
            let witness = out.witness.as_ref().map(describe).unwrap_or_default();
            return Err(CliError::precondition(format!(
                "condition (a) fails at M = {bound}, alpha = {}: fitted constant {fitted:.4}; {witness}",
                a.alpha
            )));
        }
        r => r?,
    };
    report.param("N", params.cap_n);
    report.param("gamma", params.gamma);
    report.param("eta", params.eta);
    report.param("M0", params.m0);

    let fam = report.timed("G_n", || build_gn(&seq, &params))?;
    let estimates = report.timed("estimates", || verify_estimates(&fam, &seq));
    let d = seq.len();
    let overlaps = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .filter(|&(i, j)| !fam.g_sets[i].is_disjoint(&fam.g_sets[j]))
        .count();
    report.check("disjoint G_n", overlaps == 0, format!("{overlaps} overlapping pairs"));
    let min_margin = estimates.cover_margin.iter().copied().fold(f64::INFINITY, f64::min);
    let max_tail = estimates.tail_sum.iter().copied().fold(0.0, f64::max);
    report.check("cover margins", min_margin >= 0.0, format!("min {min_margin:.4e}"));
    report.check("tail sums", max_tail < a.delta, format!("max {max_tail:.4e} vs delta = {}", a.delta));

    let sides = match a.partition {
        Some(p) => load_partition(p)?,
        None => (0..d).map(|n| if n % 2 == 0 { Side::T } else { Side::S }).collect(),
    };
    if sides.len() != d {
        return Err(CoreError::LengthMismatch {
            expected: d,
            found: sides.len(),
        }
        .into());
    }
    let hb = bounded_interpolant(report, &seq, &sides, &ctx.grid, ctx.tolerance)?;
    report.check("bounded interpolation", true, format!("gamma = {:.5}", hb.gamma_level));

    let eps = a.epsilon.unwrap_or(params.eta.min(0.02) / 2.0);
    report.param("epsilon", eps);
    let w = match a.values {
        Some(p) => load_values(p)?,
        None => generate_compatible_values(&seq, eps, ctx.seed),
    };
    let u = report.timed("assemble", || assemble_u(&w, &fam, &hb.h))?;
    let end = report.timed("endgame", || check_endgame(&seq, &w, &sides, &u));
    report.check(
        "T/S inequalities",
        end.all_hold(),
        format!("{}/{d} nodes hold", end.holds.iter().filter(|&&h| h).count()),
    );

    let name = stem(seq.label());
    let arcs: Vec<ArcRow> = fam
        .g_sets
        .iter()
        .enumerate()
        .flat_map(|(node, g)| {
            g.pieces().iter().map(move |&(s, e)| ArcRow {
                node,
                arc_start: s,
                arc_length: e - s,
            })
        })
        .collect();
    report.output(ctx.out.write_csv(&format!("{name}.arcs.csv"), &arcs)?);
    let est: Vec<EstimateRow> = (0..d)
        .map(|n| EstimateRow {
            node: n,
            case: format!("{:?}", fam.cases[n]).to_lowercase(),
            e_measure: fam.e_sets[n].measure(),
            g_measure: fam.g_sets[n].measure(),
            cover_margin: estimates.cover_margin[n],
            tail_sum: estimates.tail_sum[n],
        })
        .collect();
    report.output(ctx.out.write_csv(&format!("{name}.estimates.csv"), &est)?);
    let rows: Vec<EndgameRow> = (0..d)
        .map(|n| EndgameRow {
            node: n,
            side: side_name(sides[n]),
            value: w[n],
            u: end.u[n],
            u_t_only: end.u_t_only[n],
            holds: end.holds[n],
        })
        .collect();
    report.output(ctx.out.write_csv(&format!("{name}.endgame.csv"), &rows)?);
    let picture = DiscPicture {
        points: seq.points(),
        boxes: seq.points().iter().map(|z| CarlesonBox::over(z, 1.0)).collect(),
        bands: fam.g_sets.iter().enumerate().collect(),
    };
    report.output(ctx.out.write(&format!("{name}.construct.svg"), picture.render().as_bytes())?);

    if overlaps > 0 || !estimates.holds(a.delta) {
        return Err(CliError::internal(format!(
            "construction estimates failed: {overlaps} overlaps, min cover margin {min_margin:.4e}, max tail {max_tail:.4e}"
        )));
    }
    Ok(())
}

pub enum ProbeSource<'a> {
    Sequence(&'a Path, f64),
    Measure(&'a Path),
    Random(usize, usize),
}

#[derive(Serialize)]
struct ProbeRow {
    instance: usize,
    lambda: f64,
    projection_measure: f64,
    measure_times_lambda: f64,
    flagged: usize,
    rays: usize,
}

fn profile(
    u: &impl PositiveHarmonic,
    lambdas: &[f64],
    rays: usize,
    radial: usize,
) -> CliResult<Vec<RadialProjectionEstimate>> {
    Ok(radial_projection_profile(u, lambdas, rays, radial)?)
}

pub fn probe(
    ctx: &Context,
    report: &mut RunReport,
    source: ProbeSource,
    lambdas: &[f64],
    rays: usize,
    radial: usize,
) -> CliResult<()> {
    report.param("lambdas", lambdas);
    report.param("rays", rays);
    report.param("radial", radial);
    let (name, profiles) = match source {
        ProbeSource::Measure(p) => {
            report.param("measure", p);
            let prof = report.timed("probe", || match load_measure(p)? {
                LoadedMeasure::Atoms(m) => profile(&m, lambdas, rays, radial),
                LoadedMeasure::Steps(s) => profile(&s, lambdas, rays, radial),
            })?;
            (stem(&p.file_stem().unwrap_or_default().to_string_lossy()), vec![prof])
        }
        ProbeSource::Random(count, atoms) => {
            report.param("random", count);
            report.param("atoms", atoms);
            if atoms == 0 {
                return Err(CliError::input("--atoms must be at least 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let measures = (0..count)
                .map(|_| BoundaryMeasure::new((0..atoms).map(|_| (rng.gen_range(0.0..TAU), rng.gen_range(0.01..1.0)))))
                .collect::<Result<Vec<_>, _>>()?;
            let profs = report.timed("probe", || {
                measures
                    .iter()
                    .map(|m| profile(m, lambdas, rays, radial))
                    .collect::<CliResult<Vec<_>>>()
            })?;
            (format!("random_{count}x{atoms}"), profs)
        }
        ProbeSource::Sequence(p, epsilon) => {
            let seq = load_sequence(p)?;
            report.param("input", p);
            report.param("epsilon", epsilon);
            let w = generate_compatible_values(&seq, epsilon, ctx.seed);
            let problem = InterpolationProblem::new(seq.clone(), w, epsilon, ctx.tolerance)?;
            let result = solve_with_retry(report, &problem, &ctx.grid)?;
            let mu = result.measure.ok_or_else(|| {
                CliError::precondition(format!(
                    "seeded values at epsilon = {epsilon} are not interpolable on the grid; nothing to probe"
                ))
            })?;
            let prof = report.timed("probe", || profile(&mu, lambdas, rays, radial))?;
            (stem(seq.label()), vec![prof])
        }
    };
    let mut rows = Vec::new();
    for (instance, prof) in profiles.iter().enumerate() {
        for e in prof {
            rows.push(ProbeRow {
                instance,
                lambda: e.lambda,
                projection_measure: e.measure,
                measure_times_lambda: e.measure * e.lambda,
                flagged: e.flagged,
                rays: e.ray_count,
            });
        }
    }
    let c_fit = profiles.iter().map(|p| fitted_constant(p)).fold(0.0, f64::max);
    report.check(
        "fitted constant",
        true,
        format!("C_fit = max lambda |E*(lambda)| = {c_fit:.4} over {} measure(s)", profiles.len()),
    );
    report.output(ctx.out.write_csv(&format!("{name}.probe.csv"), &rows)?);
    Ok(())
}

pub fn gallery(
    ctx: &Context,
    report: &mut RunReport,
    name: &str,
    depth: u32,
    spread: u32,
    levels: u32,
) -> CliResult<()> {
    let seqs = match name {
        "radial" => {
            report.param("depth", depth);
            vec![radial_geometric(depth)?]
        }
        "lattice" => {
            report.param("depth", depth);
            report.param("spread", spread);
            vec![dyadic_lattice(depth, spread)?]
        }
        "counterexample" => {
            report.param("levels", levels);
            let (z1, z2) = counterexample_pair(levels)?;
            vec![z1, z2, counterexample_union(levels)?]
        }
        other => {
            return Err(CliError::input(format!(
                "unknown generator `{other}`; available: {}",
                GENERATORS.join(", ")
            )))
        }
    };
    for s in &seqs {
        let mut json = serde_json::to_string_pretty(&SequenceFile::from_sequence(s))
            .map_err(|e| CliError::internal(e.to_string()))?;
        json.push('\n');
        report.check(s.label(), true, format!("{} points", s.len()));
        report.output(ctx.out.write(&format!("{}.json", stem(s.label())), json.as_bytes())?);
    }
    Ok(())
}
