//! One function per subcommand; each writes its artifacts through an
//! [`Emitter`].

use std::path::Path;

use serde_json::json;

use whitney_lab::expansion::{condition_check, convergence_experiment, LpExponent, NormOptions};
use whitney_lab::geometry::{
    build_transition_twist, decay_check, distortion_certificate, line_points, pairwise_ratio_check,
    procrustes_align, sample_points, AngleProfile, DecayTarget, DistortionMap, Point, SampleBox, Sampler,
    SlideProfile, SlideSpec, SlowTwistSpec,
};
use whitney_lab::io::{emit_trajectory, fmt_f64, points_to_csv, read_points};
use whitney_lab::jets::{compatibility_residual, WhitneyField};
use whitney_lab::laguerre::{laguerre_coefficients, laguerre_fn, reconstruction_report};
use whitney_lab::mrs::{infinite_finite_check, ratio_diagnostic, MrsTable};
use whitney_lab::ortho::{admissibility_report, recurrence_coefficients, LipschitzProbe, ProbeGrid, WeightSpec};

use crate::config::{ConfigError, RunConfig};
use crate::output::Emitter;
use crate::CliError;

/// Recurrence tolerance for tables built as a side input.
const TABLE_TOL: f64 = 1e-10;

pub fn run(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    match cfg.command.as_str() {
        "twist" => twist(cfg, out),
        "slide" => slide(cfg, out),
        "certify" => certify(cfg, out),
        "procrustes" => procrustes(cfg, out),
        "jets" => jets(cfg, out),
        "recurrence" => recurrence(cfg, out),
        "mrs" => mrs(cfg, out),
        "expand" => expand(cfg, out),
        "conditions" => conditions(cfg, out),
        "laguerre" => laguerre(cfg, out),
        other => Err(ConfigError::UnknownCommand(other.into()).into()),
    }
}

fn choice_error(key: &str, found: &str, options: &'static str) -> CliError {
    ConfigError::TypeMismatch { key: key.into(), expected: options, found: found.into() }.into()
}

fn trajectory(map: &DistortionMap, initial: &[Point], cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let dir = out.dir().to_path_buf();
    for path in emit_trajectory(map, initial, cfg.usize("steps"), &dir, "trajectory")? {
        out.record(&path)?;
    }
    Ok(())
}

fn twist(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let scale = cfg.float("scale");
    let mut transition = None;
    let spec = match cfg.string("profile") {
        "exp" => SlowTwistSpec::planar(AngleProfile::Exponential { amplitude: scale, rate: cfg.float("rate") }),
        "power" => SlowTwistSpec::planar(AngleProfile::Power { coeff: scale, exponent: cfg.float("exponent") }),
        "transition" => {
            let t = build_transition_twist(cfg.float("theta"), cfg.float("c1"), cfg.float("c2"), cfg.float("epsilon"))?;
            let spec = t.spec.clone();
            transition = Some(t);
            spec
        }
        other => return Err(choice_error("profile", other, "one of exp, power, transition")),
    };
    let half = cfg.float("box");
    let profile = spec.profiles().next().cloned().expect("planar twist has one block");
    let map = DistortionMap::SlowTwist(spec);
    let sampler = Sampler { domain: SampleBox::cube(map.dim(), half), count: cfg.usize("points"), seed: cfg.seed };

    out.json("map.json", &map)?;
    trajectory(&map, &sample_points(&sampler), cfg, out)?;
    out.json("certificate.json", &distortion_certificate(&map, &sampler)?)?;
    let radius = half * (map.dim() as f64).sqrt();
    out.json("decay.json", &decay_check(DecayTarget::Twist(&profile), radius, cfg.float("threshold"))?)?;
    if let Some(t) = transition {
        out.json("transition.json", &t)?;
    }
    Ok(())
}

fn slide_profile(family: &str, amplitude: f64, param: f64) -> Result<SlideProfile, CliError> {
    Ok(match family {
        "zero" => SlideProfile::Zero,
        "constant" => SlideProfile::Constant { value: amplitude },
        "lorentzian" => SlideProfile::Lorentzian { amplitude, scale: param },
        "absexp" => SlideProfile::AbsExp { amplitude, rate: param },
        "sine" => SlideProfile::Sine { amplitude, frequency: param },
        other => return Err(choice_error("family", other, "one of zero, constant, lorentzian, absexp, sine")),
    })
}

fn same_length(key: &'static str, found: usize, expected: usize) -> Result<(), CliError> {
    if found == expected {
        Ok(())
    } else {
        Err(CliError::Usage(format!("key \"{key}\" has {found} entries, expected {expected} (one per family)")))
    }
}

fn slide(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let families = cfg.strings("family");
    let d = families.len();
    let amplitude = cfg.floats("amplitude").unwrap_or_default();
    let param = cfg.floats("param").unwrap_or_default();
    let start = cfg.floats("start").unwrap_or_default();
    let end = cfg.floats("end").unwrap_or_default();
    for (key, v) in [("amplitude", amplitude), ("param", param), ("start", start), ("end", end)] {
        same_length(key, v.len(), d)?;
    }
    let profiles = families
        .iter()
        .zip(amplitude.iter().zip(param))
        .map(|(f, (&a, &p))| slide_profile(f, a, p))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SlideSpec::new(profiles)?;
    let half = cfg.float("box");
    let decay = decay_check(DecayTarget::Slide(&spec), half, cfg.float("threshold"))?;
    let map = DistortionMap::Slide(spec);
    let initial = line_points(&Point::new(start.to_vec())?, &Point::new(end.to_vec())?, cfg.usize("count"))?;
    let sampler = Sampler { domain: SampleBox::cube(d, half), count: cfg.usize("points"), seed: cfg.seed };

    out.json("map.json", &map)?;
    trajectory(&map, &initial, cfg, out)?;
    out.json("certificate.json", &distortion_certificate(&map, &sampler)?)?;
    out.json("decay.json", &decay)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_json<T: serde::de::DeserializeOwned>(module: &'static str, path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Module { module, message: format!("{}: {e}", path.display()), numerical: false })
}

fn certify(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let map = match cfg.path("map") {
        Some(p) => parse_json::<DistortionMap>("geometry", p)?,
        None => DistortionMap::identity(cfg.usize("dim")),
    };
    let d = map.validate()?;
    let sampler = Sampler { domain: SampleBox::cube(d, cfg.float("box")), count: cfg.usize("points"), seed: cfg.seed };
    out.json("certificate.json", &distortion_certificate(&map, &sampler)?)
}

fn procrustes(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let y = read_points(cfg.path("source").expect("required key"))?;
    let z = read_points(cfg.path("target").expect("required key"))?;
    let alignment = procrustes_align(&y, &z, cfg.boolean("proper"))?;
    let moved = y.iter().map(|p| alignment.motion.apply(p)).collect::<Result<Vec<_>, _>>()?;
    out.json("alignment.json", &alignment)?;
    out.write("aligned.csv", &points_to_csv(&moved)?)?;
    if let Some(c) = cfg.opt_float("c_prime") {
        out.json("ratio_check.json", &pairwise_ratio_check(&y, &z, c)?)?;
    }
    Ok(())
}

fn jets(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let field: WhitneyField = parse_json("jets", cfg.path("field").expect("required key"))?;
    let table = compatibility_residual(&field)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(format!("residual.csv: {e}"));
    w.write_record(["alpha", "x", "a", "value"]).map_err(csv_err)?;
    for e in &table.entries {
        w.write_record([e.alpha.clone(), e.x.to_string(), e.a.to_string(), fmt_f64(e.value)]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(format!("residual.csv: {e}")))?;
    out.write("residual.csv", &bytes)?;
    out.json(
        "summary.json",
        &json!({
            "n": field.dim(),
            "m": field.order(),
            "points": field.len(),
            "entries": table.entries.len(),
            "max": table.max,
        }),
    )
}

fn weight(cfg: &RunConfig) -> Result<WeightSpec, CliError> {
    Ok(WeightSpec::new(cfg.float("beta"))?)
}

fn recurrence(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let table = recurrence_coefficients(weight(cfg)?, cfg.usize("N"), cfg.float("tol"))?;
    let mut text = table.to_json().map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    out.write("recurrence.json", text.as_bytes())
}

fn mrs(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let w = weight(cfg)?;
    let tol = cfg.float("tol");
    let table = match (cfg.floats("u"), cfg.get("degrees")) {
        (Some(us), None) => MrsTable::build(w, us, tol)?,
        (None, Some(_)) => MrsTable::for_degrees(w, cfg.usize("degrees"), tol)?,
        (Some(_), Some(_)) => return Err(CliError::Usage("keys \"u\" and \"degrees\" are exclusive".into())),
        (None, None) => return Err(ConfigError::MissingRequired("u".into()).into()),
    };
    let mut bytes = Vec::new();
    table.write_csv(&mut bytes).map_err(|e| CliError::Io(format!("mrs.csv: {e}")))?;
    out.write("mrs.csv", &bytes)?;

    let trials = cfg.usize("trials");
    if trials > 0 {
        let n = cfg.usize("n");
        let rec = recurrence_coefficients(w, n + 1, TABLE_TOL)?;
        let by_degree = MrsTable::for_degrees(w, n, tol)?;
        let report = infinite_finite_check(&rec, &by_degree, n, cfg.float("s"), trials, cfg.seed)?;
        let degrees: Vec<usize> = (1..=n).collect();
        let ratios = ratio_diagnostic(&rec, &by_degree, &degrees)?;
        out.json("infinite_finite.json", &json!({ "report": report, "ratios": ratios }))?;
    }
    Ok(())
}

fn expansion_target(name: &str) -> Result<fn(f64) -> f64, CliError> {
    Ok(match name {
        "gaussian" => |x: f64| (-x * x).exp(),
        "cos" => |x: f64| (1.5 * x).cos(),
        "cubic" => |x: f64| x * x * x - 2.0 * x,
        other => return Err(choice_error("function", other, "one of gaussian, cos, cubic")),
    })
}

fn expand(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let f = expansion_target(cfg.string("function"))?;
    let ns = cfg.ints("n");
    let n_top = ns.iter().copied().max().unwrap_or(0);
    let table = recurrence_coefficients(weight(cfg)?, (3 * n_top).max(48), cfg.float("tol"))?;
    let p = LpExponent::new(cfg.float("p"))?;
    let exp = convergence_experiment(&table, f, p, cfg.float("b"), cfg.float("B"), &ns, NormOptions::default())?;
    let mut bytes = Vec::new();
    exp.write_csv(&mut bytes).map_err(|e| CliError::Io(format!("convergence.csv: {e}")))?;
    out.write("convergence.csv", &bytes)?;
    out.json("experiment.json", &exp)
}

fn conditions(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let beta = cfg.float("beta");
    let p = LpExponent::new(cfg.float("p"))?;
    out.json("conditions.json", &condition_check(p, cfg.float("b"), cfg.float("B"), beta)?)?;
    match (cfg.opt_float("eta"), cfg.opt_float("C")) {
        (None, None) => Ok(()),
        (Some(eta), Some(c)) => {
            let grid = ProbeGrid { x_min: cfg.float("x_min"), x_max: cfg.float("x_max"), points: cfg.usize("grid") };
            let probe = LipschitzProbe { epsilon: cfg.float("epsilon"), delta: cfg.float("delta") };
            let report = admissibility_report(&weight(cfg)?, eta, c, grid, probe);
            out.json("admissibility.json", &json!({ "admissible": report.admissible(), "report": report }))
        }
        (None, Some(_)) => Err(ConfigError::MissingRequired("eta".into()).into()),
        (Some(_), None) => Err(ConfigError::MissingRequired("C".into()).into()),
    }
}

fn laguerre_target(name: &str) -> Result<fn(&[f64]) -> f64, CliError> {
    Ok(match name {
        "exp" => |x: &[f64]| (-x.iter().sum::<f64>()).exp(),
        "gaussian" => |x: &[f64]| (-x.iter().map(|t| t * t).sum::<f64>()).exp(),
        "laguerre2" => |x: &[f64]| x.iter().map(|&t| laguerre_fn(2, t).unwrap_or(f64::NAN)).product(),
        "rational" => |x: &[f64]| 1.0 / (1.0 + x.iter().map(|t| t * t).sum::<f64>()),
        other => return Err(choice_error("function", other, "one of exp, gaussian, laguerre2, rational")),
    })
}

fn laguerre(cfg: &RunConfig, out: &mut Emitter) -> Result<(), CliError> {
    let f = laguerre_target(cfg.string("function"))?;
    let dim = cfg.usize("dim");
    let probes: Vec<Vec<f64>> = match cfg.floats("probe") {
        None => vec![vec![0.0; dim]],
        Some(flat) if dim > 0 && flat.len() % dim == 0 => flat.chunks(dim).map(<[f64]>::to_vec).collect(),
        Some(flat) => {
            return Err(CliError::Usage(format!("key \"probe\" has {} entries, not a multiple of dim = {dim}", flat.len())))
        }
    };
    let coeffs = laguerre_coefficients(f, dim, cfg.usize("cap"))?;
    let report = reconstruction_report(&coeffs, f, &probes, &cfg.ints("n"))?;
    let mut bytes = Vec::new();
    coeffs.write_csv(&mut bytes).map_err(|e| CliError::Io(format!("coefficients.csv: {e}")))?;
    out.write("coefficients.csv", &bytes)?;
    out.json(
        "reconstruction.json",
        &json!({
            "dim": coeffs.dim,
            "cap": coeffs.cap,
            "radius": coeffs.radius,
            "nodes_per_axis": coeffs.nodes_per_axis,
            "last_change": coeffs.last_change,
            "report": report,
        }),
    )
}
