//! `ltpg` — classification, construction, action application and identity
//! verification for the explicit (phi,Gamma)-modules, with JSON output.
//!
//! Exit codes: 0 success, 1 failed identity, 2 invalid input or usage,
//! 3 precision exhaustion.

use clap::{Args, Parser, Subcommand};
use ltpg::error::Error;
use ltpg::ffield::{embed, FFElem, FiniteField};
use ltpg::json;
use ltpg::lubin_tate::{default_k, PhiSpec, UnitValue};
use ltpg::padic::LocalFieldSpec;
use ltpg::phigamma::{Corruption, PhiGammaModule};
use ltpg::reps::enumerate_classes;
use ltpg::series::TSeries;
use ltpg::tame_ext::{InertiaElem, TameRing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "ltpg", version, about = "explicit (phi,Gamma)-modules over F_q((t))")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the canonical orbits of q-primitive exponents.
    Classify {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the phi-matrix and the gamma-matrices of the requested units.
    Construct(Config),
    /// Apply phi and gamma_u to a basis vector.
    Act {
        #[command(flatten)]
        cfg: Config,
        /// Basis vector index.
        #[arg(long, default_value_t = 0)]
        vector: usize,
    },
    /// Run the identity suite (commutation, cocycle, determinant, tame
    /// checks) for one class.
    Verify {
        #[command(flatten)]
        cfg: Config,
        /// Deliberately corrupt the module (negative control):
        /// "exp-bump" or "sign-flip".
        #[arg(long)]
        corrupt: Option<String>,
        /// Number of extra seed-derived random test units.
        #[arg(long, default_value_t = 0)]
        random_units: usize,
    },
}

#[derive(Args)]
struct Config {
    /// Residue characteristic.
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Residue degree.
    #[arg(long, default_value_t = 1)]
    f: usize,
    /// Ramification index.
    #[arg(long, default_value_t = 1)]
    e: usize,
    /// Eisenstein polynomial as a JSON array of digit arrays.
    #[arg(long)]
    eis: Option<String>,
    /// Dimension of the representation.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Fundamental-character exponent.
    #[arg(long, default_value_t = 0)]
    h: i64,
    /// Twist exponent.
    #[arg(long, default_value_t = 0)]
    s: i64,
    /// Unramified twist: an integer or a comma-separated coefficient
    /// vector over F_p.
    #[arg(long, default_value = "1")]
    lambda: String,
    /// Series precision (t-digits).
    #[arg(long, default_value_t = 32)]
    prec: i64,
    /// Test unit, e.g. "3" or "1+pi" (repeatable; Teichmueller digits).
    #[arg(long = "unit")]
    units: Vec<String>,
    /// Seed for randomized choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::PrecisionExhausted(_) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Classify { q, n, out } => {
            let classes = enumerate_classes(q, n)?;
            let body = json!({
                "q": q,
                "n": n,
                "count": classes.len(),
                "orbits": classes
                    .iter()
                    .map(|(orb, min)| json!({ "orbit": orb, "min": min }))
                    .collect::<Vec<_>>(),
            });
            emit(&body, &out)?;
            Ok(0)
        }
        Cmd::Construct(cfg) => {
            let (module, spec) = build_module(&cfg)?;
            let mut gammas = Vec::new();
            for expr in &cfg.units {
                let u = parse_unit(expr, &spec, cfg.prec)?;
                gammas.push(json!({
                    "unit": expr,
                    "matrix": json::mat_to_json(&module.gamma_matrix(&u)?),
                }));
            }
            let body = json!({
                "spec": json::spec_to_json(&spec),
                "params": { "n": cfg.n, "h": cfg.h, "s": cfg.s, "lambda": cfg.lambda, "prec": cfg.prec },
                "phi": json::mat_to_json(module.phi_matrix()),
                "gamma": gammas,
            });
            emit(&body, &cfg.out)?;
            Ok(0)
        }
        Cmd::Act { cfg, vector } => {
            let (module, spec) = build_module(&cfg)?;
            if vector >= module.rank() {
                return Err(Error::OutOfRange(vector as i64, spec.q(), cfg.n));
            }
            let v = module.basis_vector(vector);
            let phi_v = module.apply_phi(&v)?;
            let mut gamma_v = Vec::new();
            for expr in &cfg.units {
                let u = parse_unit(expr, &spec, cfg.prec)?;
                gamma_v.push(json!({
                    "unit": expr,
                    "vector": module.apply_gamma(&u, &v)?
                        .iter().map(json::tseries_to_json).collect::<Vec<_>>(),
                }));
            }
            let body = json!({
                "vector": vector,
                "phi": phi_v.iter().map(json::tseries_to_json).collect::<Vec<_>>(),
                "gamma": gamma_v,
            });
            emit(&body, &cfg.out)?;
            Ok(0)
        }
        Cmd::Verify {
            cfg,
            corrupt,
            random_units,
        } => {
            let reports = verify_suite(&cfg, corrupt.as_deref(), random_units)?;
            let ok = reports.iter().all(|r| r["ok"] == json!(true));
            let body = json!({ "ok": ok, "reports": reports });
            emit(&body, &cfg.out)?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn build_module(cfg: &Config) -> Result<(PhiGammaModule, Arc<LocalFieldSpec>), Error> {
    if cfg.prec < 1 {
        return Err(Error::Invalid("prec must be positive".into()));
    }
    let eis = match &cfg.eis {
        None => None,
        Some(text) => {
            let v: Value = serde_json::from_str(text)
                .map_err(|e| Error::Invalid(format!("bad --eis: {e}")))?;
            Some(json::spec_from_json(&json!({
                "p": cfg.p, "f": cfg.f, "e": cfg.e, "eis": v
            }))?)
        }
    };
    let spec = match eis {
        Some(s) => s,
        None => {
            if cfg.e != 1 {
                return Err(Error::Invalid("--eis is required when e > 1".into()));
            }
            LocalFieldSpec::unramified(cfg.p, cfg.f)?
        }
    };
    let lam = parse_lambda(&cfg.lambda, &spec, cfg.n)?;
    let module = PhiGammaModule::construct_twisted(
        cfg.h,
        cfg.s,
        &lam,
        cfg.n,
        working_prec(cfg, &spec),
        &spec,
        &PhiSpec::Default,
    )?;
    Ok((module, spec))
}

/// Internal working precision: checks compare at `cfg.prec`, but Laurent
/// composition spends about `h(q-1)` digits per application.
fn working_prec(cfg: &Config, spec: &LocalFieldSpec) -> i64 {
    cfg.prec + 2 * cfg.h.abs() * (spec.q() as i64 - 1) + 8
}

/// Parses "3", "-5", "1+pi", "2+pi^2", ... as a unit. Terms are
/// Teichmueller digits: `a+b*pi^k` means `tau(a) + tau(b) pi^k`.
fn parse_unit(expr: &str, spec: &Arc<LocalFieldSpec>, prec: i64) -> Result<UnitValue, Error> {
    ltpg::lubin_tate::parse_unit_expr(expr, spec, prec)
}

/// Parses lambda as an integer or a comma-separated F_p coefficient
/// vector, in a field just large enough for the coefficients given.
fn parse_lambda(text: &str, spec: &Arc<LocalFieldSpec>, n: usize) -> Result<FFElem, Error> {
    let coeffs: Vec<i64> = text
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| Error::Invalid(format!("bad --lambda {text}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.len() == 1 {
        return Ok(spec.residue_field().from_int(coeffs[0]));
    }
    let deg = spec.f * n;
    if coeffs.len() > deg {
        return Err(Error::Invalid("--lambda has too many coefficients".into()));
    }
    let field = FiniteField::get(spec.p, deg);
    let mut acc = field.zero();
    let gen = field.gen();
    let mut pw = field.one();
    for c in &coeffs {
        acc = acc.add(&field.from_int(*c).mul(&pw));
        pw = pw.mul(&gen);
    }
    Ok(acc)
}

fn verify_suite(
    cfg: &Config,
    corrupt: Option<&str>,
    random_units: usize,
) -> Result<Vec<Value>, Error> {
    let (module, spec) = build_module(cfg)?;
    let module = match corrupt {
        None => module,
        Some("exp-bump") => module.with_corruption(Corruption::ExponentBump(0)),
        Some("sign-flip") => module.with_corruption(Corruption::SignFlip(0)),
        Some(other) => return Err(Error::Invalid(format!("unknown corruption {other}"))),
    };
    let fq = spec.residue_field().clone();
    let mut units: Vec<(String, UnitValue)> = Vec::new();
    for expr in &cfg.units {
        units.push((expr.clone(), parse_unit(expr, &spec, cfg.prec)?));
    }
    if units.is_empty() {
        units.push((
            format!("{}", 1 + spec.p),
            UnitValue::Int(1 + spec.p as i64),
        ));
        units.push((
            format!("{}", 2 * spec.p - 1),
            UnitValue::Int(2 * spec.p as i64 - 1),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let depth = (2 * default_k(spec.q(), cfg.prec) + 8).max(4) as usize;
    for i in 0..random_units {
        let mut digits = Vec::with_capacity(depth);
        digits.push(fq.elem_at(1 + rng.random_range(0..fq.order() - 1)));
        for _ in 1..depth {
            digits.push(fq.elem_at(rng.random_range(0..fq.order())));
        }
        units.push((format!("random#{i}"), UnitValue::Digits(digits)));
    }

    let mut reports = Vec::new();
    for (name, u) in &units {
        let r = module.check_commutation(u, cfg.prec)?;
        reports.push(with_label(r.to_value(), "unit", name));
    }
    for pair in units.windows(2) {
        let r = module.check_cocycle(&pair[0].1, &pair[1].1, cfg.prec)?;
        reports.push(r.to_value());
    }
    reports.push(det_identity_report(cfg, &module, &spec, &units)?);
    if corrupt.is_none() {
        reports.extend(tame_reports(cfg, &spec, &units)?);
    }
    Ok(reports)
}

fn with_label(mut v: Value, key: &str, val: &str) -> Value {
    v["params"][key] = json!(val);
    v
}

/// The determinant of the module, rescaled by t^h, must have phi-scalar
/// `lambda^n` and gamma-scalar `residue(u)^{h+ns}`.
fn det_identity_report(
    cfg: &Config,
    module: &PhiGammaModule,
    spec: &Arc<LocalFieldSpec>,
    units: &[(String, UnitValue)],
) -> Result<Value, Error> {
    let params = json!({ "h": cfg.h, "s": cfg.s, "n": cfg.n });
    let det = module.det_module()?;
    let f = det.field().clone();
    let p_mat = ltpg::phigamma::Mat::new(
        &f,
        vec![vec![TSeries::monomial(&f, f.one(), cfg.h)]],
    )?;
    let scaled = det.base_change(&p_mat)?;
    let lam = parse_lambda(&cfg.lambda, spec, cfg.n)?;
    let lam_n = embed(&lam, &f)?.pow(cfg.n as u128);
    let expect_phi = TSeries::monomial(&f, lam_n, 0);
    if !scaled.phi_matrix().rows[0][0].eq_mod(&expect_phi, 4) {
        return Ok(ltpg::report::Report::failure(
            "det_identity",
            params,
            "phi-scalar of rescaled determinant is not lambda^n".into(),
        )
        .to_value());
    }
    for (name, u) in units {
        let g = scaled.gamma_matrix(u)?;
        let ubar = embed(&u.residue(spec)?, &f)?;
        let exp = (cfg.h + cfg.n as i64 * cfg.s).rem_euclid(spec.q() as i64 - 1).max(0);
        let expect = TSeries::monomial(&f, ubar.pow(exp as u128), 0);
        let depth = g.rows[0][0].prec().min(cfg.prec).min(8);
        if depth < 1 || !g.rows[0][0].eq_mod(&expect, depth) {
            return Ok(ltpg::report::Report::failure(
                "det_identity",
                params,
                format!("gamma-scalar for unit {name} is not residue^(h+ns)"),
            )
            .to_value());
        }
    }
    Ok(ltpg::report::Report::success("det_identity", params).to_value())
}

fn tame_reports(
    cfg: &Config,
    spec: &Arc<LocalFieldSpec>,
    units: &[(String, UnitValue)],
) -> Result<Vec<Value>, Error> {
    let mut out = Vec::new();
    let ring = TameRing::new(spec, &PhiSpec::Default, cfg.n)?;
    let ind = PhiGammaModule::construct_ind(
        cfg.h,
        cfg.n,
        working_prec(cfg, spec),
        spec,
        &PhiSpec::Default,
    )?;
    let alpha = ltpg::ffield::solve_root_of_sign(cfg.n, spec.q());
    let vs = ring.build_vj(&ind, &alpha, cfg.h)?;
    let n_y = cfg.prec.min(48) * ring.ramification_degree();
    for v in &vs {
        out.push(ring.check_phi_fixed(&ind, v, n_y)?.to_value());
    }
    let (name, u) = &units[0];
    let g = InertiaElem {
        u: u.clone(),
        zeta: ring.compatible_zeta(u)?,
    };
    for (j, v) in vs.iter().enumerate() {
        let r = ring.check_inertia_eigen(&ind, v, j, cfg.h, &g, n_y)?;
        out.push(with_label(r.to_value(), "unit", name));
    }
    if units.len() > 1 {
        let (n2, u2) = &units[1];
        let g2 = InertiaElem {
            u: u2.clone(),
            zeta: ring.compatible_zeta(u2)?,
        };
        let r = ring.check_action_group_law(&g, &g2, n_y)?;
        out.push(with_label(r.to_value(), "g2", n2));
    }
    Ok(out)
}

fn emit(body: &Value, out: &Option<PathBuf>) -> Result<(), Error> {
    let text = format!("{}\n", serde_json::to_string_pretty(body).expect("serializable"));
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display()))),
    }
}
