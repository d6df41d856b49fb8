//! Implementations of the CLI subcommands. Each returns the standard report
//! envelope; hard failures (parse, validation, budget) bubble up as errors
//! and exit with code 2.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};

use anabelia_core::counting::{
    divisor_class_sequence, exact_residue_count, lefschetz_consistency, unit_image_lattice,
    CurveHandle, CurveSite,
};
use anabelia_core::curve::{CurvePoint, HyperellipticCurve};
use anabelia_core::field::FieldSpec;
use anabelia_core::func::{ExceptionalSet, Place, RationalFunction};
use anabelia_core::jacobian::{factor_u64, p_primary_exponent, SigmaSpec};
use anabelia_core::lattice::invariant_factors_from_counts;
use anabelia_core::mobius::MobiusMap;
use anabelia_core::mumford::MumfordDivisor;
use anabelia_core::oracle::{
    adversarial_oracle, oracle_from_embedding, random_tau_fixture, AdversarialKind, TauFixture,
    UnitGroupOracle,
};
use anabelia_core::poly::Polynomial;
use anabelia_core::recover::{
    recover_field_embedding, verify_embedding, FieldEmbedding, RecoverError, RecoveryConfig,
    RecoveryTranscript,
};

use crate::report::{Json, Report};
use crate::specfile::{parse_curve_spec, CurveConfig};

pub struct GlobalOpts {
    pub no_timings: bool,
    pub threads: usize,
}

fn load_curve(path: &Path) -> Result<CurveConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading curve spec {}", path.display()))?;
    let mut cfg = parse_curve_spec(&text).map_err(|e| anyhow!("{e}"))?;
    if let Ok(v) = std::env::var("ANABELIA_BUDGET") {
        let budget: u64 = v
            .parse()
            .map_err(|_| anyhow!("ANABELIA_BUDGET must be an integer"))?;
        cfg.budget = budget;
        cfg.group_budget = budget;
    }
    Ok(cfg)
}

fn echo_inputs(report: &mut Report, cfg: &CurveConfig) {
    report.input("spec", Json::str(cfg.canonical_text()));
    report.input("p", Json::int(cfg.p));
    report.input("d", Json::int(cfg.d));
    report.input("model", Json::str(&cfg.model));
    report.input("budget", Json::int(cfg.budget));
    report.input("group_budget", Json::int(cfg.group_budget));
    report.input("seed", Json::int(cfg.seed));
}

fn finish(mut report: Report, start: Instant, opts: &GlobalOpts) -> Report {
    if !opts.no_timings {
        report.timing(start.elapsed().as_millis());
    }
    report
}

pub fn zeta(path: &Path, opts: &GlobalOpts) -> Result<Report> {
    let start = Instant::now();
    let cfg = load_curve(path)?;
    let mut report = Report::new("zeta");
    echo_inputs(&mut report, &cfg);
    let CurveHandle::Hyperelliptic(curve) = &cfg.handle else {
        bail!("zeta needs a hyperelliptic model (the line has trivial numerator)");
    };
    let l = curve.l_polynomial(cfg.budget).map_err(|e| anyhow!("{e}"))?;
    report.result(
        "l_coeffs",
        Json::Arr(l.coeffs().iter().map(|c| Json::int(*c)).collect()),
    );
    report.result("jacobian_order", Json::int(l.order()));
    report.result("functional_equation", Json::Bool(l.functional_equation_holds()));
    report.result("trace_bound", Json::Bool(l.trace_bound_holds()));
    report.result("weil_magnitudes", Json::Bool(l.weil_magnitudes_hold(1e-9)));
    // predicted-vs-counted table up to 2g+2
    let rows = lefschetz_consistency(&cfg.handle, 2 * curve.genus() + 2, cfg.budget)
        .map_err(|e| anyhow!("{e}"))?;
    report.result(
        "consistency",
        Json::Arr(
            rows.iter()
                .map(|r| {
                    Json::Obj(vec![
                        ("m".into(), Json::int(r.m)),
                        ("predicted".into(), Json::int(r.predicted)),
                        ("counted".into(), Json::int(r.counted)),
                    ])
                })
                .collect(),
        ),
    );
    if !(l.functional_equation_holds() && l.trace_bound_holds() && l.weil_magnitudes_hold(1e-9)) {
        report.fail("zeta audit failed");
    }
    Ok(finish(report, start, opts))
}

pub fn count(path: &Path, m: usize, opts: &GlobalOpts) -> Result<Report> {
    let start = Instant::now();
    let cfg = load_curve(path)?;
    let mut report = Report::new("count");
    echo_inputs(&mut report, &cfg);
    report.input("m", Json::int(m));
    report.input("threads", Json::int(opts.threads));
    let n = match &cfg.handle {
        CurveHandle::Rational(_) => cfg
            .handle
            .count_points(m, cfg.budget)
            .map_err(|e| anyhow!("{e}"))?,
        CurveHandle::Hyperelliptic(curve) => {
            let level = curve.level_checked(m, cfg.budget).map_err(|e| anyhow!("{e}"))?;
            let q = level.spec.order();
            let t = opts.threads.min(q.max(1) as usize).max(1);
            if t == 1 {
                level.count_affine_in_range(0, q) + 1
            } else {
                // contiguous ranges, summed in a fixed order
                let mut totals = vec![0u64; t];
                std::thread::scope(|scope| {
                    for (k, slot) in totals.iter_mut().enumerate() {
                        let lvl = level.clone();
                        let lo = q * k as u64 / t as u64;
                        let hi = q * (k as u64 + 1) / t as u64;
                        scope.spawn(move || {
                            *slot = lvl.count_affine_in_range(lo, hi);
                        });
                    }
                });
                totals.iter().sum::<u64>() + 1
            }
        }
    };
    report.result("count", Json::int(n));
    Ok(finish(report, start, opts))
}

pub fn residue_count(path: &Path, n: usize, opts: &GlobalOpts) -> Result<Report> {
    let start = Instant::now();
    let cfg = load_curve(path)?;
    let mut report = Report::new("residue-count");
    echo_inputs(&mut report, &cfg);
    report.input("N", Json::int(n));
    let count = exact_residue_count(&cfg.handle, n, cfg.budget).map_err(|e| anyhow!("{e}"))?;
    report.result("result", Json::int(count));
    Ok(finish(report, start, opts))
}

pub fn jacobian(path: &Path, r: Option<u64>, opts: &GlobalOpts) -> Result<Report> {
    let start = Instant::now();
    let cfg = load_curve(path)?;
    let mut report = Report::new("jacobian");
    echo_inputs(&mut report, &cfg);
    match &cfg.handle {
        CurveHandle::Rational(_) => {
            report.result("order", Json::int(1u64));
            report.result("invariant_factors", Json::Arr(vec![]));
        }
        CurveHandle::Hyperelliptic(curve) => {
            let l = curve.l_polynomial(cfg.budget).map_err(|e| anyhow!("{e}"))?;
            report.result("order", Json::int(l.order()));
            report.result(
                "l_coeffs",
                Json::Arr(l.coeffs().iter().map(|c| Json::int(*c)).collect()),
            );
            let level = curve.level(1).map_err(|e| anyhow!("{e}"))?;
            let elements = level.enumerate_jacobian(cfg.group_budget).map_err(|e| anyhow!("{e}"))?;
            let n = elements.len() as u64;
            let factors = invariant_factors_from_counts(n, |k| {
                elements
                    .iter()
                    .filter(|d| {
                        level
                            .cantor_mul(d, k as i128)
                            .map(|x| x.is_identity())
                            .unwrap_or(false)
                    })
                    .count() as u64
            });
            report.result(
                "invariant_factors",
                Json::Arr(factors.iter().map(|f| Json::int(*f)).collect()),
            );
            if let Some(r) = r {
                let e = p_primary_exponent(curve, r, cfg.budget, cfg.group_budget)
                    .map_err(|e| anyhow!("{e}"))?;
                report.result("primary_prime", Json::int(r));
                report.result("primary_exponent", Json::int(e));
            }
        }
    }
    Ok(finish(report, start, opts))
}

fn parse_sigma(s: &str) -> Result<SigmaSpec> {
    let mut primes = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let p: u64 = part.parse().map_err(|_| anyhow!("bad prime '{part}' in sigma"))?;
        if factor_u64(p).len() != 1 || factor_u64(p)[0] != (p, 1) {
            bail!("sigma entries must be primes, got {p}");
        }
        primes.push(p);
    }
    if primes.is_empty() {
        bail!("sigma must name at least one prime");
    }
    Ok(SigmaSpec::new(primes))
}

pub fn torsion_probe(path: &Path, m: usize, sigma: &str, opts: &GlobalOpts) -> Result<Report> {
    let start = Instant::now();
    let cfg = load_curve(path)?;
    let sigma_spec = parse_sigma(sigma)?;
    let mut report = Report::new("torsion-probe");
    echo_inputs(&mut report, &cfg);
    report.input("m", Json::int(m));
    report.input("sigma", Json::str(format!("{sigma_spec}")));
    report.input("threads", Json::int(opts.threads));
    let CurveHandle::Hyperelliptic(curve) = &cfg.handle else {
        bail!("the torsion probe needs a hyperelliptic model (genus >= 1)");
    };
    let outcome = probe_parallel(curve, m, &sigma_spec, cfg.budget, cfg.group_budget, opts.threads)
        .map_err(|e| anyhow!("{e}"))?;
    report.result("point_count", Json::int(outcome.point_count));
    report.result("group_order", Json::int(outcome.group_order));
    report.result(
        "pairs",
        Json::Arr(
            outcome
                .pairs
                .iter()
                .map(|(a, b)| Json::str(format!("{{{a},{b}}}")))
                .collect(),
        ),
    );
    report.result(
        "identity_pairs",
        Json::Arr(
            outcome
                .identity_pairs
                .iter()
                .map(|(a, b)| Json::str(format!("{{{a},{b}}}")))
                .collect(),
        ),
    );
    Ok(finish(report, start, opts))
}

/// Pair classification with the pair index space striped across workers and
/// a deterministic merge; byte-identical to the sequential probe.
fn probe_parallel(
    curve: &HyperellipticCurve,
    m: usize,
    sigma: &SigmaSpec,
    budget: u64,
    group_cap: u64,
    threads: usize,
) -> std::result::Result<anabelia_core::jacobian::ProbeReport, anabelia_core::curve::CurveError> {
    if threads <= 1 {
        return anabelia_core::jacobian::torsion_probe(curve, m, sigma, budget, group_cap);
    }
    let points = curve.points(m, budget)?;
    let level = curve.level(m)?;
    let l = curve.l_polynomial(budget)?;
    let group_order = l.order_at_level(m);
    if group_order <= 0 || group_order as u64 > group_cap {
        return Err(anabelia_core::curve::CurveError::BudgetExceeded);
    }
    let group_order = group_order as u64;
    let mut flat: Vec<(usize, usize)> = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            flat.push((i, j));
        }
    }
    #[derive(Clone, Copy)]
    enum Class {
        Skip,
        Pair,
        Identity,
    }
    let mut classes = vec![Class::Skip; flat.len()];
    let chunk = flat.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        for (work, out) in flat.chunks(chunk).zip(classes.chunks_mut(chunk)) {
            let lvl = level.clone();
            let pts = &points;
            scope.spawn(move || {
                for ((i, j), slot) in work.iter().zip(out.iter_mut()) {
                    let Ok(d) = lvl.class_of_difference(&pts[*i], &pts[*j]) else {
                        continue;
                    };
                    if d.is_identity() {
                        *slot = Class::Identity;
                        continue;
                    }
                    if let Ok(ord) = lvl.class_order(&d, group_order) {
                        if sigma.is_sigma_number(ord) {
                            *slot = Class::Pair;
                        }
                    }
                }
            });
        }
    });
    let mut pairs = Vec::new();
    let mut identity_pairs = Vec::new();
    for ((i, j), class) in flat.iter().zip(classes.iter()) {
        match class {
            Class::Pair => pairs.push((points[*i].clone(), points[*j].clone())),
            Class::Identity => identity_pairs.push((points[*i].clone(), points[*j].clone())),
            Class::Skip => {}
        }
    }
    Ok(anabelia_core::jacobian::ProbeReport {
        pairs,
        identity_pairs,
        point_count: points.len(),
        group_order,
    })
}

fn parse_sites(tokens: &str, cfg: &CurveConfig) -> Result<Vec<CurveSite>> {
    let spec: Arc<FieldSpec> = match &cfg.handle {
        CurveHandle::Rational(s) => s.clone(),
        CurveHandle::Hyperelliptic(c) => c.spec().clone(),
    };
    let mut out = Vec::new();
    for token in tokens.split(';') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        match &cfg.handle {
            CurveHandle::Rational(_) => {
                if token == "inf" {
                    out.push(CurveSite::LinePlace(Place::infinity(&spec)));
                } else if token.starts_with('[') {
                    let inner = token.trim_start_matches('[').trim_end_matches(']');
                    let codes: Vec<u64> = inner
                        .split(',')
                        .map(|x| x.trim().parse())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| anyhow!("bad place token '{token}'"))?;
                    let pi = Polynomial::from_codes(&spec, &codes);
                    let place = Place::finite(pi).map_err(|e| anyhow!("{e}"))?;
                    out.push(CurveSite::LinePlace(place));
                } else {
                    let code: u64 =
                        token.parse().map_err(|_| anyhow!("bad place token '{token}'"))?;
                    out.push(CurveSite::LinePlace(Place::rational(&spec.from_code(code))));
                }
            }
            CurveHandle::Hyperelliptic(_) => {
                if token == "inf" {
                    out.push(CurveSite::Point(CurvePoint::infinity(1)));
                } else {
                    let parts: Vec<&str> = token.split(':').collect();
                    if parts.len() != 2 {
                        bail!("bad point token '{token}' (use x:y or inf)");
                    }
                    let x: u64 = parts[0].parse().map_err(|_| anyhow!("bad x in '{token}'"))?;
                    let y: u64 = parts[1].parse().map_err(|_| anyhow!("bad y in '{token}'"))?;
                    out.push(CurveSite::Point(CurvePoint::affine(
                        1,
                        spec.from_code(x),
                        spec.from_code(y),
                    )));
                }
            }
        }
    }
    Ok(out)
}

pub fn lattice(path: &Path, sites: &str, opts: &GlobalOpts) -> Result<Report> {
    let start = Instant::now();
    let cfg = load_curve(path)?;
    let mut report = Report::new("lattice");
    echo_inputs(&mut report, &cfg);
    report.input("sites", Json::str(sites));
    let parsed = parse_sites(sites, &cfg)?;
    if parsed.is_empty() {
        bail!("at least one site is required");
    }
    let basis = unit_image_lattice(&cfg.handle, &parsed, cfg.budget, cfg.group_budget)
        .map_err(|e| anyhow!("{e}"))?;
    report.result(
        "basis",
        Json::Arr(
            basis
                .iter()
                .map(|row| Json::Arr(row.iter().map(|v| Json::int(*v)).collect()))
                .collect(),
        ),
    );
    Ok(finish(report, start, opts))
}

pub fn class_sequence(
    path: &Path,
    sigma: &str,
    exceptional: &str,
    gen_cap: usize,
    opts: &GlobalOpts,
) -> Result<Report> {
    let start = Instant::now();
    let cfg = load_curve(path)?;
    let sigma_spec = parse_sigma(sigma)?;
    let mut report = Report::new("class-sequence");
    echo_inputs(&mut report, &cfg);
    report.input("sigma", Json::str(format!("{sigma_spec}")));
    report.input("exceptional", Json::str(exceptional));
    report.input("gen_cap", Json::int(gen_cap));
    let exc = parse_sites(exceptional, &cfg)?;
    let r = divisor_class_sequence(
        &cfg.handle,
        &exc,
        &sigma_spec,
        cfg.budget,
        cfg.group_budget,
        gen_cap,
    )
    .map_err(|e| anyhow!("{e}"))?;
    report.result("jacobian_order", Json::int(r.jacobian_order));
    report.result("torsion_order", Json::int(r.torsion_order));
    report.result("image_order", Json::int(r.image_order));
    report.result("quotient_order", Json::int(r.quotient_order));
    report.result(
        "invariant_factors",
        Json::Arr(r.invariant_factors.iter().map(|f| Json::int(*f)).collect()),
    );
    report.result("class_map_surjective", Json::Bool(r.class_map_surjective));
    report.result("generation_degree_cap", Json::int(r.generation_degree_cap));
    Ok(finish(report, start, opts))
}

pub struct RecoverArgs {
    pub field: u64,
    pub oracle: String,
    pub mobius: Option<String>,
    pub const_frob: usize,
    pub s: u32,
    pub ell: u64,
    pub e_size: usize,
    pub seed: u64,
    pub trials: usize,
    pub level_cap: usize,
    pub alpha_seed: u64,
}

fn prime_power(q: u64) -> Result<(u64, usize)> {
    let f = factor_u64(q);
    if f.len() != 1 {
        bail!("field order {q} is not a prime power");
    }
    Ok((f[0].0, f[0].1 as usize))
}

enum BuiltOracle {
    Honest(TauFixture),
    Adversarial(Box<dyn UnitGroupOracle>),
}

fn build_oracle(args: &RecoverArgs, base: &Arc<FieldSpec>) -> Result<BuiltOracle> {
    match args.oracle.as_str() {
        "identity" => Ok(BuiltOracle::Honest(
            oracle_from_embedding(
                base.clone(),
                args.ell,
                MobiusMap::identity(base),
                args.const_frob,
                args.s,
                ExceptionalSet::empty(),
            )
            .map_err(|e| anyhow!("{e}"))?,
        )),
        "mobius" => {
            let entries = args
                .mobius
                .as_deref()
                .ok_or_else(|| anyhow!("--oracle mobius needs --mobius a,b,c,d"))?;
            let codes: Vec<u64> = entries
                .split(',')
                .map(|x| x.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| anyhow!("bad --mobius entries"))?;
            if codes.len() != 4 {
                bail!("--mobius needs exactly four entries");
            }
            let m = MobiusMap::new(
                base.from_code(codes[0]),
                base.from_code(codes[1]),
                base.from_code(codes[2]),
                base.from_code(codes[3]),
            )
            .map_err(|e| anyhow!("singular coordinate map: {e}"))?;
            Ok(BuiltOracle::Honest(
                oracle_from_embedding(
                    base.clone(),
                    args.ell,
                    m,
                    args.const_frob,
                    args.s,
                    ExceptionalSet::empty(),
                )
                .map_err(|e| anyhow!("{e}"))?,
            ))
        }
        "random" => Ok(BuiltOracle::Honest(random_tau_fixture(
            base,
            args.ell,
            args.s,
            args.e_size,
            args.seed,
        ))),
        other => {
            let kind = AdversarialKind::parse(other)
                .ok_or_else(|| anyhow!("unknown oracle kind '{other}'"))?;
            if base.order() < 5 {
                bail!("adversarial oracles need a base field of order >= 5");
            }
            Ok(BuiltOracle::Adversarial(adversarial_oracle(
                kind,
                base,
                args.ell,
                args.e_size,
                args.seed,
            )))
        }
    }
}

fn embedding_json(emb: &FieldEmbedding, base: &Arc<FieldSpec>) -> Json {
    let constants: Vec<Json> = (0..base.order())
        .map(|c| Json::int(emb.constant_image(&base.from_code(c)).code()))
        .collect();
    Json::Obj(vec![
        ("t_image".into(), Json::str(emb.t_image().canonical())),
        ("e".into(), Json::int(emb.ord_multiplier())),
        ("frobenius_power".into(), Json::int(emb.frobenius_power())),
        ("constant_images".into(), Json::Arr(constants)),
    ])
}

fn transcript_json(t: &RecoveryTranscript) -> Json {
    let mut fields = vec![
        (
            "levels_visited".into(),
            Json::Arr(t.levels_visited.iter().map(|l| Json::int(*l)).collect()),
        ),
        ("level".into(), Json::int(t.level)),
        ("x0".into(), Json::str(&t.x0)),
        ("f".into(), Json::str(&t.f)),
        ("phi_x0".into(), Json::str(&t.phi_x0)),
        ("e0".into(), Json::int(t.e0)),
        ("bucket_bound".into(), Json::int(t.bucket_bound)),
        (
            "alphas_scanned".into(),
            Json::Arr(
                t.alphas_scanned
                    .iter()
                    .map(|(a, d)| {
                        Json::Obj(vec![
                            ("alpha".into(), Json::int(*a)),
                            ("divisor".into(), Json::str(d)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "collision".into(),
            Json::Arr(vec![Json::int(t.collision.0), Json::int(t.collision.1)]),
        ),
        ("bucket_divisor".into(), Json::str(&t.bucket_divisor)),
        ("c".into(), Json::str(&t.c_value)),
        ("x1".into(), Json::str(&t.x1)),
        ("g".into(), Json::str(&t.g)),
        ("x2".into(), Json::str(&t.x2)),
        ("certified_level_order".into(), Json::int(t.certified_level_order)),
        (
            "additivity_rows".into(),
            Json::Arr(
                t.additivity_rows
                    .iter()
                    .map(|r| {
                        Json::Obj(vec![
                            ("eta".into(), Json::int(r.eta)),
                            (
                                "alpha".into(),
                                match r.alpha_used {
                                    Some(a) => Json::int(a),
                                    None => Json::str("direct"),
                                },
                            ),
                            (
                                "zero_place".into(),
                                Json::str(r.zero_place.clone().unwrap_or_else(|| "-".into())),
                            ),
                            ("evaluated".into(), Json::Bool(r.checked_by_evaluation)),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("decomposition_alpha".into(), Json::int(t.decomposition_alpha)),
        ("g_part".into(), Json::str(&t.g_part)),
        ("h_part".into(), Json::str(&t.h_part)),
        (
            "epsilon".into(),
            Json::Arr(
                t.epsilon_values
                    .iter()
                    .map(|(p, v)| {
                        Json::Obj(vec![
                            ("place".into(), Json::str(p)),
                            ("value".into(), Json::str(v)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "delta".into(),
            Json::Arr(
                t.delta_values
                    .iter()
                    .map(|(p, v)| {
                        Json::Obj(vec![
                            ("place".into(), Json::str(p)),
                            ("value".into(), Json::str(v)),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("t_image".into(), Json::str(&t.t_image)),
        ("e".into(), Json::int(t.e)),
        ("frobenius_power".into(), Json::int(t.frobenius_power)),
    ];
    if let Some(cc) = &t.coordinate_change {
        fields.insert(0, ("coordinate_change".into(), Json::str(cc)));
    }
    Json::Obj(fields)
}

pub fn recover(args: RecoverArgs, opts: &GlobalOpts) -> Result<Report> {
    let start = Instant::now();
    let (p, d) = prime_power(args.field)?;
    if args.field < 3 {
        bail!("recovery needs a base field of order >= 3 (no translation constant otherwise)");
    }
    if args.ell == p || factor_u64(args.ell).len() != 1 || factor_u64(args.ell)[0].1 != 1 {
        bail!("--ell must be a prime different from the characteristic {p}");
    }
    let base = FieldSpec::extension(p, d).map_err(|e| anyhow!("{e}"))?;
    let mut report = Report::new("recover");
    report.input("field", Json::int(args.field));
    report.input("oracle", Json::str(&args.oracle));
    report.input("s", Json::int(args.s));
    report.input("const_frob", Json::int(args.const_frob));
    report.input("ell", Json::int(args.ell));
    report.input("e_size", Json::int(args.e_size));
    report.input("seed", Json::int(args.seed));
    report.input("trials", Json::int(args.trials));
    report.input("level_cap", Json::int(args.level_cap));
    report.input("alpha_seed", Json::int(args.alpha_seed));
    let cfg = RecoveryConfig {
        level_cap: args.level_cap,
        alpha_seed: args.alpha_seed,
        verify_trials: args.trials,
        verify_seed: args.seed.wrapping_add(1),
        ..RecoveryConfig::default()
    };

    let mut built = build_oracle(&args, &base)?;
    let (oracle, expected): (&mut dyn UnitGroupOracle, Option<(RationalFunction, Vec<u64>)>) =
        match &mut built {
            BuiltOracle::Honest(fixture) => {
                let t_img = fixture.expected_t_image();
                let consts = (0..base.order())
                    .map(|c| fixture.expected_constant_image(&base.from_code(c)).code())
                    .collect();
                (fixture, Some((t_img, consts)))
            }
            BuiltOracle::Adversarial(boxed) => (boxed.as_mut(), None),
        };
    report.input("oracle_detail", Json::str(oracle.describe()));

    match recover_field_embedding(oracle, &cfg) {
        Ok((emb, transcript)) => {
            report.result("embedding", embedding_json(&emb, &base));
            report.result("transcript", transcript_json(&transcript));
            if let Some((t_img, consts)) = &expected {
                let matches = emb.t_image() == t_img
                    && (0..base.order())
                        .all(|c| emb.constant_image(&base.from_code(c)).code() == consts[c as usize]);
                report.result("matches_constructor", Json::Bool(matches));
                if !matches {
                    report.fail("recovered embedding differs from the constructor data");
                }
            }
            let verdict = verify_embedding(&emb, oracle, &cfg).map_err(|e| anyhow!("{e}"))?;
            report.result(
                "verify",
                Json::Obj(vec![
                    ("pass".into(), Json::Bool(verdict.pass)),
                    ("trials".into(), Json::int(verdict.trials)),
                    (
                        "witnesses".into(),
                        Json::Arr(verdict.witnesses.iter().map(Json::str).collect()),
                    ),
                ]),
            );
            if !verdict.pass {
                for w in &verdict.witnesses {
                    report.fail(w.clone());
                }
            }
        }
        Err(RecoverError::Rejected(rejection)) => {
            report.result("rejected_stage", Json::str(rejection.stage));
            report.fail(format!("{rejection}"));
        }
        Err(other @ RecoverError::TowerExhausted { .. }) => {
            bail!("inconclusive: {other}");
        }
        Err(other) => bail!("{other}"),
    }
    Ok(finish(report, start, opts))
}

// --- selftest ---------------------------------------------------------------

pub fn selftest(opts: &GlobalOpts) -> Result<Report> {
    let start = Instant::now();
    let mut report = Report::new("selftest");
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut run = |name: &str, ok: bool| {
        eprintln!("{} {name}", if ok { "ok  " } else { "FAIL" });
        checks.push((name.to_string(), ok));
    };

    // field axioms on a sampled extension field
    {
        let k = FieldSpec::extension(5, 2).unwrap();
        let mut ok = true;
        for a in k.elements().step_by(3) {
            for b in k.elements().step_by(5) {
                ok &= a.add(&b) == b.add(&a);
                ok &= a.mul(&b) == b.mul(&a);
                let c = k.from_code((a.code() + 7) % k.order());
                ok &= a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c));
            }
        }
        run("field-axioms", ok);
    }
    // necklace identity
    {
        let mut ok = true;
        for q in [2u64, 3] {
            let spec = FieldSpec::prime(q).unwrap();
            for n in 1usize..=4 {
                let total: u64 = (1..=n)
                    .filter(|d| n % d == 0)
                    .map(|d| d as u64 * anabelia_core::poly::irreducibles(&spec, d).len() as u64)
                    .sum();
                ok &= total == q.pow(n as u32);
            }
        }
        run("irreducible-counts", ok);
    }
    // principal divisors have degree zero
    {
        let spec = FieldSpec::prime(3).unwrap();
        let mut ok = true;
        for a in 0..9u64 {
            let num = Polynomial::from_codes(&spec, &[a % 3, 1 + a % 2, 1]);
            let den = Polynomial::from_codes(&spec, &[1, (a / 3) % 3, 0, 1]);
            if let Ok(f) = RationalFunction::new(num, den) {
                if !f.is_zero() {
                    ok &= f.principal_divisor().unwrap().degree() == 0;
                }
            }
        }
        run("principal-degree-zero", ok);
    }
    // Cantor laws on the running elliptic curve
    {
        let f3 = FieldSpec::prime(3).unwrap();
        let curve =
            HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 1])).unwrap();
        let level = curve.level(2).unwrap();
        let pts = curve.points(2, 1 << 20).unwrap();
        let mut rng = anabelia_core::rng::DetRng::new(7);
        let mut ok = true;
        let classes: Vec<MumfordDivisor> = (0..8)
            .map(|_| {
                let a = &pts[rng.below(pts.len() as u64) as usize];
                let b = &pts[rng.below(pts.len() as u64) as usize];
                level.class_of_difference(a, b).unwrap()
            })
            .collect();
        for a in &classes {
            for b in &classes {
                ok &= level.cantor_add(a, b).unwrap() == level.cantor_add(b, a).unwrap();
                for c in &classes {
                    let l = level.cantor_add(&level.cantor_add(a, b).unwrap(), c).unwrap();
                    let r = level.cantor_add(a, &level.cantor_add(b, c).unwrap()).unwrap();
                    ok &= l == r;
                }
            }
            ok &= level.cantor_mul(a, 16).unwrap().is_identity(); // |J(F_9)| = 16
        }
        run("cantor-laws", ok);
    }
    // zeta consistency and residue counts
    {
        let f3 = FieldSpec::prime(3).unwrap();
        let curve = CurveHandle::Hyperelliptic(
            HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 1])).unwrap(),
        );
        let rows = lefschetz_consistency(&curve, 4, 1 << 20);
        run("lefschetz", rows.is_ok());
        let rc = exact_residue_count(&curve, 2, 1 << 20);
        run("residue-count", rc == Ok(12));
    }
    // class sequence and lattice on the acceptance cases
    {
        let f3 = FieldSpec::prime(3).unwrap();
        let curve = CurveHandle::Hyperelliptic(
            HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 1])).unwrap(),
        );
        let r2 = divisor_class_sequence(&curve, &[], &SigmaSpec::new(vec![2]), 1 << 20, 1 << 17, 2);
        run(
            "class-sequence",
            r2.map(|r| r.invariant_factors == vec![4]).unwrap_or(false),
        );
        let sites = vec![
            CurveSite::Point(CurvePoint::infinity(1)),
            CurveSite::Point(CurvePoint::affine(1, f3.from_int(2), f3.from_int(1))),
        ];
        let basis = unit_image_lattice(&curve, &sites, 1 << 20, 1 << 17);
        run("lattice", basis == Ok(vec![vec![4, -4]]));
    }
    // recovery: identity, a twist, and one rejected adversary
    {
        let base = FieldSpec::prime(5).unwrap();
        let cfg = RecoveryConfig { verify_trials: 50, ..RecoveryConfig::default() };
        let mut o = oracle_from_embedding(
            base.clone(),
            2,
            MobiusMap::identity(&base),
            0,
            0,
            ExceptionalSet::empty(),
        )
        .unwrap();
        let ok = match recover_field_embedding(&mut o, &cfg) {
            Ok((emb, _)) => {
                emb.t_image() == &RationalFunction::coordinate(&base)
                    && verify_embedding(&emb, &mut o, &cfg).map(|r| r.pass).unwrap_or(false)
            }
            Err(_) => false,
        };
        run("recover-identity", ok);
        let mut tw = oracle_from_embedding(
            base.clone(),
            2,
            MobiusMap::identity(&base),
            0,
            1,
            ExceptionalSet::empty(),
        )
        .unwrap();
        let ok = match recover_field_embedding(&mut tw, &cfg) {
            Ok((emb, _)) => emb.ord_multiplier() == 5,
            Err(_) => false,
        };
        run("recover-frobenius", ok);
        let mut adv = adversarial_oracle(AdversarialKind::NonadditiveConstants, &base, 2, 1, 11);
        let ok = match recover_field_embedding(&mut *adv, &cfg) {
            Err(RecoverError::Rejected(_)) => true,
            Ok((emb, _)) => verify_embedding(&emb, &mut *adv, &cfg)
                .map(|r| !r.pass)
                .unwrap_or(false),
            Err(_) => false,
        };
        run("reject-adversarial", ok);
    }

    let all = checks.iter().all(|(_, ok)| *ok);
    report.result(
        "checks",
        Json::Arr(
            checks
                .iter()
                .map(|(name, ok)| {
                    Json::Obj(vec![
                        ("name".into(), Json::str(name)),
                        ("pass".into(), Json::Bool(*ok)),
                    ])
                })
                .collect(),
        ),
    );
    if !all {
        report.fail("selftest failures");
    }
    Ok(finish(report, start, opts))
}
