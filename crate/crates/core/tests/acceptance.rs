//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weingarten_core::phase::{Component, Membership, PhaseMap, PhasePoint, Sign};
use weingarten_core::profile::{
    bounded_height, integrate_profile, integrate_profile_with, EndpointKind, LambdaSide, ProfileCurve,
    ProfileOptions,
};
use weingarten_core::taxonomy::{
    atlas, atlas_from, halfspace_verdict, AtlasInputs, HalfspaceVerdict, Label, NecessaryFailure,
};
use weingarten_core::phase::GLimit;
use weingarten_core::wclass::{EndValue, TriState, WeingartenClass};
use weingarten_core::yau;

type Check = Result<String, String>;

fn preset(name: &str, p: &[f64]) -> WeingartenClass {
    WeingartenClass::preset(name, p).expect("preset builds")
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_delaunay() -> Check {
    let c = preset("cmc", &[1.0]);
    let start = PhasePoint::on_gamma(2.5, Sign::Plus).map_err(|e| e.to_string())?;
    let p = integrate_profile(&c, start, 0.0, &ProfileOptions::default()).map_err(|e| e.to_string())?;
    // Flux of the Delaunay curve with H = 1: x sin(theta) - x^2 = x^2 (lambda - 1).
    let c0 = 0.4f64.powi(2) * 1.5;
    let drift = p
        .samples
        .iter()
        .map(|q| (q.x * q.x * (q.lambda - 1.0) - c0).abs())
        .fold(0.0, f64::max);
    let singular: Vec<Label> = atlas(&c)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|e| e.label)
        .filter(|l| l.is_singular())
        .collect();
    ensure(
        drift <= 1e-6 && singular.is_empty() && p.period_z.is_some(),
        format!("flux drift {drift:.2e}, singular atlas labels {singular:?}"),
    )
}

fn c2_football() -> Check {
    let c = preset("cgc", &[1.0]);
    let pm = PhaseMap::new(&c);
    let start = PhasePoint::new(0.5, 2.0, Sign::Plus).map_err(|e| e.to_string())?;
    let p = integrate_profile_with(&pm, start, 0.0, &ProfileOptions::default()).map_err(|e| e.to_string())?;
    // x(s) = A sin(s + pi/2) with A = 1/2 over the half period.
    let err = p
        .samples
        .iter()
        .map(|q| (q.x - 0.5 * (q.s + std::f64::consts::FRAC_PI_2).sin()).abs())
        .fold(0.0, f64::max);
    let nu = pm.limit_angle(&start).map_err(|e| e.to_string())?;
    ensure(
        err <= 1e-6 && (nu.abs() - 0.5).abs() <= 1e-8,
        format!("sup |x - A sin| = {err:.2e}, limit angle {nu:.12}"),
    )
}

fn pool() -> Vec<WeingartenClass> {
    vec![
        preset("cmc", &[1.0]),
        preset("cgc", &[1.0]),
        preset("linear", &[-0.5]),
        preset("linear", &[-2.0]),
        preset("two_h_eq_k", &[]),
        preset("minimal", &[]),
    ]
}

/// A random phase point of `c`, away from the umbilic value.
fn random_start(c: &WeingartenClass, rng: &mut ChaCha8Rng) -> PhasePoint {
    let alpha = c.alpha();
    let b = c.b();
    let lambda = if rng.gen_bool(0.5) {
        alpha + 0.05 + rng.gen_range(0.0..4.0)
    } else {
        match b {
            EndValue::Finite(b) => b + (alpha - b) * rng.gen_range(0.05..0.9),
            EndValue::NegInfinity => alpha - 0.05 - rng.gen_range(0.0..4.0),
        }
    };
    let v: f64 = rng.gen_range(0.1..0.95);
    let x = if lambda == 0.0 { 1.0 } else { v / lambda.abs() };
    let eps = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    PhasePoint::new(x, lambda, eps).expect("inside the region")
}

fn c3_orbits() -> Check {
    let classes = pool();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for k in 0..20 {
        let c = &classes[k % classes.len()];
        let pm = PhaseMap::new(c);
        let start = random_start(c, &mut rng);
        let p = integrate_profile_with(&pm, start, 0.0, &ProfileOptions::default())
            .map_err(|e| format!("{}: {e}", c.label()))?;
        let comp = pm.component(start.lambda).map_err(|e| e.to_string())?;
        for q in p.samples.iter().step_by(7) {
            if (q.lambda * q.x).abs() > 0.99 || q.x < 1e-6 || pm.component(q.lambda).ok() != Some(comp) {
                continue;
            }
            let x = pm
                .x_of_lambda(start.x, start.lambda, q.lambda)
                .map_err(|e| format!("{}: {e}", c.label()))?;
            worst = worst.max((x - q.x).abs() / q.x);
            compared += 1;
        }
    }
    ensure(
        worst <= 1e-6 && compared > 0,
        format!("{compared} samples, worst relative mismatch {worst:.2e}"),
    )
}

fn observed(p: &ProfileCurve) -> Vec<&EndpointKind> {
    [&p.left_end, &p.right_end].into_iter().filter(|e| e.is_singular()).collect()
}

fn c4_membership() -> Check {
    let classes = [
        preset("cgc", &[1.0]),
        preset("cmc", &[1.0]),
        preset("two_h_eq_k", &[]),
        preset("linear", &[-0.5]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut disagreements = Vec::new();
    let mut tally = [0usize; 3];
    for k in 0..30 {
        let c = &classes[k % classes.len()];
        let pm = PhaseMap::new(c);
        let start = random_start(c, &mut rng);
        let verdict = pm.sing_membership(&start).map_err(|e| e.to_string())?;
        let p = integrate_profile_with(&pm, start, 0.0, &ProfileOptions::default())
            .map_err(|e| format!("{}: {e}", c.label()))?;
        let ends = observed(&p);
        let axis = ends.iter().any(|e| matches!(e, EndpointKind::AxisSingularity { .. }));
        let circle = ends.iter().any(|e| matches!(e, EndpointKind::CircleSingularity { .. }));
        let agree = match verdict {
            Membership::Regular => ends.is_empty(),
            Membership::SingPlus => axis,
            Membership::SingMinus if c.b().is_finite() => circle,
            Membership::SingMinus => axis,
        };
        tally[match verdict {
            Membership::Regular => 0,
            Membership::SingPlus => 1,
            Membership::SingMinus => 2,
        }] += 1;
        if !agree {
            disagreements.push(format!(
                "{} ({}, {}): {verdict:?} vs {:?}/{:?}",
                c.label(),
                start.x,
                start.lambda,
                p.left_end,
                p.right_end
            ));
        }
    }
    ensure(
        disagreements.is_empty(),
        format!(
            "regular/sing+/sing- = {}/{}/{}; disagreements: {disagreements:?}",
            tally[0], tally[1], tally[2]
        ),
    )
}

/// Counts steps of `values` against the expected direction.
fn violations(values: &[f64], increasing: bool) -> usize {
    values
        .windows(2)
        .filter(|w| {
            let d = w[1] - w[0];
            let slack = 1e-12 * w[0].abs().max(w[1].abs());
            if increasing {
                d < -slack
            } else {
                d > slack
            }
        })
        .count()
}

fn g_on(pm: &PhaseMap<'_>, lambdas: impl Iterator<Item = f64>) -> Result<Vec<f64>, String> {
    lambdas.map(|l| pm.g_value(l).map_err(|e| e.to_string())).collect()
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

fn c5_g_monotone() -> Check {
    let n = 200;
    let mut bad = 0;
    // b >= 0: increasing below alpha, decreasing above.
    let c = preset("cgc", &[1.0]);
    let pm = PhaseMap::new(&c);
    bad += violations(&g_on(&pm, grid(0.0, 1.0, n))?, true);
    bad += violations(&g_on(&pm, grid(0.0, 6.0, n).map(|s| 1.0 + (s - 3.0).exp()))?, false);
    // b < 0, alpha != 0: decreasing between alpha and rho = f(0), increasing otherwise.
    let c = preset("cmc", &[1.0]);
    let pm = PhaseMap::new(&c);
    let rho = pm.rho().map_err(|e| e.to_string())?.ok_or("no rho")?;
    bad += violations(&g_on(&pm, grid(1.0, rho, n))?, false);
    bad += violations(&g_on(&pm, grid(rho, rho + 50.0, n))?, true);
    bad += violations(&g_on(&pm, grid(-50.0, 1.0, n))?, true);
    // alpha = 0: increasing on the whole domain, zero at 0.
    let c = preset("two_h_eq_k", &[]);
    let pm = PhaseMap::new(&c);
    bad += violations(&g_on(&pm, grid(-1.0, 20.0, n))?, true);
    let g0 = pm.g_value(0.0).map_err(|e| e.to_string())?;
    ensure(bad == 0 && g0 == 0.0, format!("{bad} violations over 6 grids of {n}; G(0) = {g0}"))
}

fn height_run(c: &WeingartenClass, side: LambdaSide, s_max: f64) -> Result<ProfileCurve, String> {
    let lambda = match side {
        LambdaSide::LambdaPositive => 1.0,
        LambdaSide::LambdaNegative => -1.0,
    };
    let start = PhasePoint::on_gamma(lambda, Sign::Plus).map_err(|e| e.to_string())?;
    let opts = ProfileOptions {
        s_max,
        ..Default::default()
    };
    integrate_profile(c, start, 0.0, &opts).map_err(|e| e.to_string())
}

fn c6_height() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for a in [-2.0, -1.0, -0.5] {
        let c = preset("linear", &[a]);
        for side in [LambdaSide::LambdaPositive, LambdaSide::LambdaNegative] {
            let unbounded_expected = match side {
                LambdaSide::LambdaPositive => (-1.0..0.0).contains(&a),
                LambdaSide::LambdaNegative => a <= -1.0,
            };
            let predicate = bounded_height(&c, side).map_err(|e| e.to_string())?;
            let pred_ok = predicate == if unbounded_expected { TriState::No } else { TriState::Yes };
            let neck = 1.0;
            let (emp_ok, what) = if unbounded_expected {
                let p = height_run(&c, side, 1e306)?;
                let ext = p.z_extent();
                (ext >= 1e3 * neck, format!("extent {ext:.3e}"))
            } else {
                let near = height_run(&c, side, 1e6)?.z_extent();
                let far = height_run(&c, side, 1e12)?.z_extent();
                ((far - near).abs() < 1e-4, format!("tail {:.1e}", (far - near).abs()))
            };
            ok &= pred_ok && emp_ok;
            lines.push(format!("a={a} {side:?}: {predicate:?} {what}"));
        }
    }
    ensure(ok, lines.join("; "))
}

fn c7_halfspace() -> Check {
    let g = |text: &str| WeingartenClass::from_text(text, &Default::default()).map_err(|e| e.to_string());
    let cases = [
        ("minimal", preset("minimal", &[])),
        ("cmc(1)", preset("cmc", &[1.0])),
        ("linear(-2)", preset("linear", &[-2.0])),
        ("-x - x^3", g("-x - x^3")?),
        ("two_h_eq_k", preset("two_h_eq_k", &[])),
    ];
    let expected = [true, false, false, true, true];
    let mut ok = true;
    let mut got = Vec::new();
    for ((name, c), holds) in cases.iter().zip(expected) {
        let v = halfspace_verdict(c);
        let matches = match v {
            HalfspaceVerdict::HoldsSufficient { .. } => holds,
            HalfspaceVerdict::FailsNecessary { reason } => {
                !holds
                    && match *name {
                        "cmc(1)" => reason == NecessaryFailure::G0Nonzero,
                        _ => reason == NecessaryFailure::SlopeNotMinusOne,
                    }
            }
            HalfspaceVerdict::Undetermined => false,
        };
        ok &= matches;
        got.push(format!("{name}: {v:?}"));
    }
    ensure(ok, got.join("; "))
}

fn c8_seventeen() -> Check {
    let lims = [GLimit::Finite { value: 1.0, ln_abs: 0.0 }, GLimit::Infinite];
    let heights = [
        (TriState::No, TriState::Yes),
        (TriState::No, TriState::No),
        (TriState::Yes, TriState::No),
    ];
    let configs: [(f64, &[EndValue]); 3] = [
        (
            1.0,
            &[EndValue::Finite(0.5), EndValue::Finite(0.0), EndValue::Finite(-1.0), EndValue::NegInfinity],
        ),
        (0.0, &[EndValue::Finite(-1.0), EndValue::NegInfinity]),
        (-1.0, &[EndValue::Finite(-2.0), EndValue::NegInfinity]),
    ];
    let mut table = BTreeSet::new();
    for (alpha, bs) in configs {
        for &b in bs {
            for g_inf in lims {
                for g_b in lims {
                    for (bp, bn) in heights {
                        let zero = alpha == 0.0;
                        table.extend(
                            atlas_from(&AtlasInputs {
                                alpha,
                                b,
                                cylinder_radius: Some(0.5),
                                g_inf,
                                g_b,
                                bounded_pos: if zero { bp } else { TriState::Undetermined },
                                bounded_neg: if zero { bn } else { TriState::Undetermined },
                            })
                            .into_iter()
                            .map(|e| e.label),
                        );
                    }
                }
            }
        }
    }
    let mut realized = BTreeSet::new();
    for c in [
        preset("cgc", &[1.0]),
        preset("cmc", &[1.0]),
        preset("minimal", &[]),
        preset("two_h_eq_k", &[]),
        preset("linear", &[-0.5]),
    ] {
        realized.extend(atlas(&c).map_err(|e| e.to_string())?.into_iter().map(|e| e.label));
    }
    let missing: Vec<Label> = Label::ALL.into_iter().filter(|l| !realized.contains(l)).collect();
    ensure(
        table.len() == 17 && Label::ALL.len() == 17 && realized.len() >= 12,
        format!(
            "decision table yields {} labels; presets realize {} (missing {missing:?})",
            table.len(),
            realized.len()
        ),
    )
}

fn c9_yau() -> Check {
    let c = 1.0;
    let r0 = yau::r0(c);
    let grid: Vec<f64> = (1..=64).map(|i| 1.0 + (r0 - 1.0) * i as f64 / 65.0).collect();
    let chk = yau::verify_yau(c, &grid).map_err(|e| e.to_string())?;
    let mesh = yau::yau_surface(c, 64, 32).map_err(|e| e.to_string())?;
    let ratio = yau::lambda_of(c, r0) / yau::mu_of(c, r0);
    let chi = mesh.euler_characteristic();
    ensure(
        chk.residual <= 1e-6
            && (r0 - 2f64.powf(1.5)).abs() <= 1e-12
            && mesh.is_closed()
            && chi == 2
            && (ratio - 0.5).abs() <= 1e-9,
        format!(
            "residual {:.2e}, r0 {r0:.15}, closed {}, chi {chi}, lambda/mu at r0 {ratio:.12}",
            chk.residual,
            mesh.is_closed()
        ),
    )
}

fn c10_limit_angles() -> Check {
    let c = preset("cgc", &[1.0]);
    let pm = PhaseMap::new(&c);
    let mut nus = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let lambda = 1.05 + 0.2 * k as f64;
        let start = PhasePoint::on_gamma(lambda, Sign::Plus).map_err(|e| e.to_string())?;
        if pm.sing_membership(&start).map_err(|e| e.to_string())? != Membership::SingPlus
            || pm.component(lambda).ok() != Some(Component::Upper)
        {
            return Err(format!("lambda = {lambda} is not a singular orbit"));
        }
        let nu = pm.limit_angle(&start).map_err(|e| e.to_string())?.abs();
        let p = integrate_profile_with(&pm, start, 0.0, &ProfileOptions::default()).map_err(|e| e.to_string())?;
        if let EndpointKind::AxisSingularity { nu0, .. } = p.right_end {
            worst = worst.max((nu0.abs() - nu).abs());
        } else {
            return Err(format!("lambda = {lambda}: right end {:?}", p.right_end));
        }
        nus.push(nu);
    }
    nus.sort_by(f64::total_cmp);
    let gap = nus.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    ensure(
        gap > 1e-9 && worst <= 1e-6,
        format!("50 orbits, smallest gap {gap:.2e}, integrator vs formula {worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("delaunay first integral, no singular cmc types", c1_delaunay),
        ("football closed form and limit angle", c2_football),
        ("orbits match quadrature", c3_orbits),
        ("singular-set criterion matches integrator", c4_membership),
        ("G monotonicity", c5_g_monotone),
        ("height dichotomy", c6_height),
        ("halfspace verdicts", c7_halfspace),
        ("seventeen types", c8_seventeen),
        ("non-elliptic compact example", c9_yau),
        ("limit angles separate orbits", c10_limit_angles),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
