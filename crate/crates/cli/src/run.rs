use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thermoform_core::config::MapSpec;
use thermoform_core::markov::Word;
use thermoform_core::parabolic::{self, ParabolicMap};
use thermoform_core::shift::{self, CylinderSet, Lattice, ShiftModel};
use thermoform_core::{orbit, stochastic, transfer};
use thermoform_core::{Arc, ArcSet, BlaschkeMap, CirclePoint, CountingLedger, Error, Observable, Result};

use crate::config::*;
use crate::report::{render, Artifact, Body};

const LYAPUNOV_NODES: usize = 4096;

/// `from, from + step, ...` up to `to`.
fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(to >= from) || (to - from) / step > 1e6 {
        return Err(Error::InvalidInput("report grid needs step > 0, T >= start and at most 1e6 rows".into()));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| from + k as f64 * step).collect())
}

fn observable(text: &str) -> Result<Observable> {
    text.parse()
}

fn arcs(pairs: &[Pair]) -> Result<ArcSet> {
    if pairs.is_empty() {
        return Ok(ArcSet::full());
    }
    ArcSet::new(pairs.iter().map(|p| Arc::new(p.0[0], p.0[1])).collect())
}

fn word(text: &str) -> Result<Vec<usize>> {
    Ok(text.parse::<Word>()?.0)
}

fn complex(p: Pair) -> Complex64 {
    Complex64::new(p.0[0], p.0[1])
}

fn lattice_json(verdict: &Lattice) -> (Value, Value) {
    match verdict {
        Lattice::Lattice { generator } => (json!("lattice"), json!(generator)),
        Lattice::Generic => (json!("generic"), Value::Null),
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Artifact> {
    if config.command.is_stochastic() && config.seed.is_none() {
        return Err(Error::InvalidInput(format!("`{}` needs --seed", config.command.name())));
    }
    let body = match &config.command {
        Command::Spectrum(a) => spectrum(config, a)?,
        Command::Pressure(a) => pressure(config, a)?,
        Command::Count(a) => count(config, a)?,
        Command::Cesaro(a) => cesaro(config, a)?,
        Command::Clt(a) => clt(config, a)?,
        Command::Clark(a) => clark(config, a)?,
        Command::Nevanlinna(a) => nevanlinna(config, a)?,
        Command::ShiftCount(a) => shift_count(config, a)?,
        Command::DGeneric(a) => d_generic(config, a)?,
        Command::Eta(a) => eta(config, a)?,
        Command::Kac(a) => kac(config, a)?,
        Command::ParabolicCount(a) => parabolic_count(config, a)?,
        Command::HolderMod(a) => holder_mod(config, a)?,
        Command::Run(_) => return Err(Error::InvalidInput("`run` cannot be nested in a config".into())),
    };
    let embedded = serde_json::to_value(config).expect("configs serialize");
    Ok(render(&embedded, &body))
}

fn spectrum(config: &ExperimentConfig, a: &SpectrumArgs) -> Result<Body> {
    let mut rows = Vec::new();
    if let MapSpec::Symbolic { .. } = config.map {
        let model = config.map.symbolic()?;
        for s in &a.s {
            let d = shift::spectral_data(&model, complex(*s))?;
            rows.push(vec![s.0[0], s.0[1], d.lambda.re, d.lambda.im, d.gap, d.residual]);
        }
    } else {
        let map = config.map.blaschke()?;
        let g = observable(&a.obs)?;
        let g = (g != Observable::zero()).then_some(&g);
        for s in &a.s {
            let op = transfer::assemble_operator(&map, complex(*s), g, a.n)?;
            let d = transfer::leading_eigen(&op, 1e-12)?;
            rows.push(vec![s.0[0], s.0[1], d.lambda.re, d.lambda.im, d.gap, d.residual]);
        }
    }
    Ok(Body::Csv { header: vec!["s_re", "s_im", "lambda_re", "lambda_im", "gap", "residual"], rows })
}

fn pressure(config: &ExperimentConfig, a: &PressureArgs) -> Result<Body> {
    if let MapSpec::Symbolic { .. } = config.map {
        let model = config.map.symbolic()?;
        let p = shift::pressure_derivs_shift(&model)?;
        return Ok(Body::Json(json!({"p1": p.p1, "p2": p.p2, "mean": p.mean, "sigma2_gk": p.sigma2_gk})));
    }
    let map = config.map.blaschke()?;
    let p = transfer::pressure_and_derivs(&map, &observable(&a.obs)?, a.h, a.n)?;
    Ok(Body::Json(json!({
        "obs": a.obs, "p0": p.p0, "p1": p.p1, "p2": p.p2, "mean": p.mean,
        "sigma2_gk": p.sigma2_gk, "max_gap": p.max_gap,
    })))
}

fn circle_ledger(map: &BlaschkeMap, x: f64, t: f64, set: &ArcSet) -> Result<CountingLedger> {
    Ok(orbit::enumerate(map, CirclePoint::new(x), t)?.restrict_arcs(set))
}

fn count(config: &ExperimentConfig, a: &CountArgs) -> Result<Body> {
    let map = config.map.blaschke()?;
    let set = arcs(&a.arcs)?;
    let ledger = circle_ledger(&map, a.x, a.t, &set)?;
    let lyapunov = map.lyapunov_exponent(LYAPUNOV_NODES)?;
    let closed = !a.strict;
    let rows = grid(a.step, a.t, a.step)?
        .into_iter()
        .map(|t| {
            let n = ledger.count(t, closed);
            let ratio = n as f64 * (-t).exp() * lyapunov / set.measure();
            let cesaro = if a.cesaro { ledger.cesaro(t) } else { f64::NAN };
            vec![t, n as f64, ratio, cesaro]
        })
        .collect();
    Ok(Body::Csv { header: vec!["T", "N", "N_exp_ratio", "cesaro"], rows })
}

fn cesaro(config: &ExperimentConfig, a: &CesaroArgs) -> Result<Body> {
    let map = config.map.blaschke()?;
    let set = arcs(&a.arcs)?;
    let ledger = circle_ledger(&map, a.x, a.t, &set)?;
    let lyapunov = map.lyapunov_exponent(LYAPUNOV_NODES)?;
    let predicted = set.measure() / lyapunov;
    let rows = grid(a.from, a.t, a.step)?
        .into_iter()
        .map(|t| {
            let n = ledger.count(t, true);
            let c = ledger.cesaro(t);
            vec![t, n as f64, n as f64 * (-t).exp() / predicted, c, c / predicted]
        })
        .collect();
    Ok(Body::Csv { header: vec!["T", "N", "N_exp_ratio", "cesaro", "cesaro_ratio"], rows })
}

fn clt(config: &ExperimentConfig, a: &CltArgs) -> Result<Body> {
    let map = config.map.blaschke()?;
    let h = observable(&a.obs)?;
    let seed = config.seed.expect("checked above");
    let sigma2 = stochastic::green_kubo_variance(&map, &h, a.kmax)?;
    let sample = stochastic::birkhoff_samples(&map, &h, a.n, a.samples, seed)?;
    let diag = stochastic::clt_diagnostics(&sample, sigma2)?;
    Ok(Body::Json(json!({
        "n": a.n, "samples": a.samples, "seed": seed, "obs": a.obs, "exact": sample.exact,
        "sigma2_gk": sigma2, "sigma2_mc": diag.sample_variance, "sample_mean": diag.sample_mean,
        "var_ratio": diag.var_ratio, "ks_stat": diag.ks_stat,
    })))
}

fn clark(config: &ExperimentConfig, a: &ClarkArgs) -> Result<Body> {
    let map = config.map.blaschke()?;
    let mu = map.clark_measure(CirclePoint::new(a.alpha))?;
    let atoms: Vec<[f64; 2]> = mu.atoms.iter().map(|(p, m)| [p.angle(), *m]).collect();
    Ok(Body::Json(json!({"alpha": mu.alpha.angle(), "atoms": atoms, "total_mass": mu.total_mass()})))
}

fn nevanlinna(config: &ExperimentConfig, a: &NevanlinnaArgs) -> Result<Body> {
    let map = config.map.blaschke()?;
    let mut points: Vec<Complex64> = a.w.iter().map(|p| complex(*p)).collect();
    if a.random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.expect("checked above"));
        for _ in 0..a.random {
            let r = 0.95 * rng.random::<f64>().sqrt() + 0.01;
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            points.push(Complex64::from_polar(r, phi));
        }
    }
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for w in points {
        let n = map.nevanlinna(w)?;
        let expected = -w.norm().ln();
        worst = worst.max((n - expected).abs());
        rows.push(json!([w.re, w.im, n, expected]));
    }
    Ok(Body::Json(json!({"columns": ["w_re", "w_im", "N", "log_inv_abs_w"], "points": rows, "max_error": worst})))
}

fn cylinder_set(words: &[String]) -> Result<Option<CylinderSet>> {
    if words.is_empty() {
        return Ok(None);
    }
    let words = words.iter().map(|w| w.parse::<Word>()).collect::<Result<Vec<_>>>()?;
    Ok(Some(CylinderSet::new(words)))
}

fn shift_count(config: &ExperimentConfig, a: &ShiftCountArgs) -> Result<Body> {
    let model = config.map.symbolic()?;
    let xi = word(&a.xi)?;
    let set = cylinder_set(&a.cylinders)?;
    let ledger = shift::count_words(&model, &model.seed_state(&xi)?, &xi, a.t, set.as_ref())?;
    let ledger = if set.is_some() { ledger.restrict_members() } else { ledger };
    let rows = grid(a.step, a.t, a.step)?.into_iter().map(|t| vec![t, ledger.count(t, true) as f64]).collect();
    Ok(Body::Csv { header: vec!["T", "N"], rows })
}

fn d_generic(config: &ExperimentConfig, a: &DGenericArgs) -> Result<Body> {
    let (verdict, period, samples) = match &config.map {
        m @ MapSpec::Symbolic { .. } => {
            let d = shift::d_genericity(&m.symbolic()?, a.max_period, a.tol)?;
            (d.verdict, d.period_reached, d.samples)
        }
        m @ MapSpec::Parabolic { .. } => {
            let values = m.parabolic()?.periodic_log_multipliers(a.max_period);
            (shift::lattice_test(&values, a.tol), a.max_period, values.len())
        }
        m => {
            let map = m.blaschke()?;
            let mut values = Vec::new();
            let mut period = 0;
            for n in 1..=a.max_period.min(12) {
                if values.len() as f64 + (map.degree() as f64).powi(n as i32) > 1e6 {
                    break;
                }
                values.extend(map.periodic_points(n)?.into_iter().map(|(_, mult)| mult.ln()));
                period = n;
            }
            (shift::lattice_test(&values, a.tol), period, values.len())
        }
    };
    let (kind, generator) = lattice_json(&verdict);
    Ok(Body::Json(json!({"verdict": kind, "generator": generator, "period_reached": period, "samples": samples})))
}

fn eta(config: &ExperimentConfig, a: &EtaArgs) -> Result<Body> {
    if let MapSpec::Symbolic { .. } = config.map {
        let model = config.map.symbolic()?;
        let r = shift::poincare_eta(&model, None, complex(a.s), &word(&a.xi)?)?;
        return Ok(Body::Json(json!({
            "s": a.s, "series": [r.series.re, r.series.im],
            "resolvent": [r.resolvent.re, r.resolvent.im], "terms": r.terms,
        })));
    }
    let map = config.map.blaschke()?;
    if a.s.0[1] != 0.0 {
        return Err(Error::InvalidInput("circle Poincaré series takes real s".into()));
    }
    let v = transfer::poincare_series(&map, CirclePoint::new(a.x), a.s.0[0], a.n)?;
    Ok(Body::Json(json!({"s": a.s, "x": a.x, "resolvent": [v, 0.0]})))
}

fn kac(config: &ExperimentConfig, a: &KacArgs) -> Result<Body> {
    let map = config.map.parabolic()?;
    let r = parabolic::kac_check(&map, a.level, a.quad_points)?;
    Ok(Body::Json(json!({
        "level": a.level, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.lhs / r.rhs, "tail": r.tail,
        "strata": r.strata, "strata_length": r.strata_length, "core_length": r.core_length,
    })))
}

fn parabolic_count(config: &ExperimentConfig, a: &ParabolicCountArgs) -> Result<Body> {
    let map: ParabolicMap = config.map.parabolic()?;
    let part = parabolic::real_markov_partition(&map, a.level)?;
    let intervals: Vec<(f64, f64)> = a.intervals.iter().map(|p| (p.0[0], p.0[1])).collect();
    if intervals.iter().any(|(lo, hi)| !(hi > lo) || !part.contains(*lo) || !part.contains(*hi)) {
        return Err(Error::InvalidInput("intervals of B must be nonempty and inside the core".into()));
    }
    let ledger = parabolic::parabolic_count(&map, &part, a.x, a.t)?.restrict_intervals(&intervals);
    let lyapunov = map.lyapunov_integral(1e-12);
    let length: f64 = intervals.iter().map(|(lo, hi)| hi - lo).sum();
    let rows = grid(a.step, a.t, a.step)?
        .into_iter()
        .map(|t| {
            let n = ledger.count(t, true);
            vec![t, n as f64, n as f64 * (-t).exp() * lyapunov / length]
        })
        .collect();
    Ok(Body::Csv { header: vec!["T", "N", "N_exp_ratio"], rows })
}

fn holder_mod(config: &ExperimentConfig, a: &HolderModArgs) -> Result<Body> {
    let model: ShiftModel = config.map.symbolic()?;
    let fit = shift::holder_modulus_in_s(&model, a.q, complex(a.s0), a.radius)?;
    let samples: Vec<[f64; 2]> = fit.samples.iter().map(|(d, n)| [*d, *n]).collect();
    Ok(Body::Json(json!({"q": a.q, "constant": fit.constant, "exponent": fit.exponent, "samples": samples})))
}
