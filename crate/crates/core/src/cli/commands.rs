use std::path::Path;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use super::{elem_json, ColemanCmd, Command, EllipticArgs, EllipticCmd, JobConfig, MeasureCmd, MeasureSource, Output};
use crate::coleman::{interpolate, mu_zero_pipeline, norm_fixed_point, CompatibleSystem, SystemJson};
use crate::elliptic::{Lattice, LatticePair};
use crate::error::{Error, Result};
use crate::iwasawa::{char_ideal, LambdaPresentation, MatrixJson};
use crate::lubin_tate::{check_factorization, coleman_norm, omega_polys, NormMethod, TorsionTower};
use crate::measures::{self, CharDomain, FiniteCharacter, GroupTag, Measure, MeasureJson};
use crate::padic::{RingElem, RingSpec, RingSpecJson};
use crate::series::{SeriesJson, TruncSeries};

/// Runs one command; returns the string hashed into the provenance block
/// (arguments plus input file contents) and the output.
pub(super) fn dispatch(cmd: &Command) -> Result<(String, Output)> {
    match cmd {
        Command::Group(c) => with_args(c, group(&c.config()?)),
        Command::Omega { common, n } => with_args(&(common, n), omega(&common.config()?, *n)),
        Command::NormOp { common, series } => {
            let text = series.as_deref().map(read).transpose()?;
            let out = norm_op(&common.config()?, text.as_deref())?;
            Ok((format!("{}{}", to_json(&common), text.unwrap_or_default()), out))
        }
        Command::Tower { common, depth } => with_args(&(common, depth), tower(&common.config()?, *depth)),
        Command::Measure(m) => measure(m),
        Command::Coleman(c) => coleman(c),
        Command::Char { matrix, .. } => {
            let text = read(matrix)?;
            let out = char_cmd(&text)?;
            Ok((text, out))
        }
        Command::Elliptic(e) => elliptic(e),
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("arguments serialize")
}

fn with_args<T: serde::Serialize>(args: &T, out: Result<Output>) -> Result<(String, Output)> {
    Ok((to_json(args), out?))
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Format(format!("cannot read {}: {e}", p.display())))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what}: {e}")))
}

fn poly_json(c: &[RingElem]) -> Value {
    Value::Array(c.iter().map(elem_json).collect())
}

fn ratio_json(r: Ratio<i64>) -> Value {
    if r.is_integer() {
        json!(r.to_integer())
    } else {
        json!(r.to_string())
    }
}

fn caps(cfg: &JobConfig) -> Value {
    json!({ "D": cfg.cap, "N": cfg.spec.prec(), "from_env": cfg.cap_from_env })
}

fn random_unit(cfg: &JobConfig, d: usize) -> TruncSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = TruncSeries::random(&cfg.spec, d, &mut rng);
    if g.coeff(0).is_unit() {
        g
    } else {
        g.add(&TruncSeries::one(&cfg.spec, d))
    }
}

fn group(cfg: &JobConfig) -> Result<Output> {
    let g = cfg.group(cfg.cap)?;
    let diff = g.log_derivative()?;
    Ok(Output {
        result: json!({
            "ring": cfg.spec.to_json(),
            "variant": g.variant(),
            "q": g.q(),
            "pi": elem_json(g.pi()),
            "f": poly_json(g.f_poly()),
            "invariant_differential": diff.to_json(),
        }),
        caps: caps(cfg),
        achieved: json!({ "N_eff": diff.n_eff() }),
    })
}

fn omega(cfg: &JobConfig, n: u32) -> Result<Output> {
    let q = cfg.group(2)?.q() as usize;
    // the factorization check runs to X^(q^n + 8) unless the cap is overridden
    let fcap = if cfg.cap_from_env { cfg.cap } else { q.pow(n) + 8 };
    let g = cfg.group(cfg.cap.max(fcap))?;
    let om = omega_polys(&g, n)?;
    let mut result = json!({
        "n": n,
        "pibar": om.pibar.iter().map(|p| poly_json(p)).collect::<Vec<_>>(),
        "plus": poly_json(&om.plus),
        "minus": poly_json(&om.minus),
        "plus_tilde": poly_json(&om.plus_tilde),
        "minus_tilde": poly_json(&om.minus_tilde),
    });
    let mut achieved = json!({ "N": cfg.spec.prec() });
    if n.is_multiple_of(2) && n > 0 {
        let half = n / 2;
        let cap = fcap;
        let a = g.pi().pow(n as u64);
        // [a]_f loses digits to the divisions in its recursion; check at what survives
        let digits = g.endomorphism_to(&a, cap)?.n_eff().min(6);
        if digits == 0 {
            return Err(Error::Precision(format!("[pi^{n}]_f has no correct digits at cap {cap}; raise --prec")));
        }
        let chk = check_factorization(&g, half, &a, cap, digits)?;
        result["factorization"] = json!({
            "a": elem_json(&a),
            "cap": chk.cap,
            "digits": chk.digits,
            "degree": chk.degree,
            "cross_products_agree": chk.cross_products_agree,
            "equals_pi_power": chk.equals_pi_power,
            "unit_match": chk.unit_match,
            "matches": chk.matches,
        });
        achieved = json!({ "digits": chk.digits });
    }
    Ok(Output { result, caps: caps(cfg), achieved })
}

fn norm_op(cfg: &JobConfig, series: Option<&str>) -> Result<Output> {
    let h = match series {
        Some(text) => {
            let s = TruncSeries::from_json(&parse::<SeriesJson>(text, "series file")?)?;
            if s.spec() != &cfg.spec {
                return Err(Error::RingMismatch("the series ring differs from --ring/--p/--prec".into()));
            }
            s
        }
        None => random_unit(cfg, cfg.cap),
    };
    let g = cfg.group(cfg.cap.max(h.cap()))?;
    let a = coleman_norm(&g, &h, NormMethod::ConjugateProduct)?;
    let b = coleman_norm(&g, &h, NormMethod::CoefficientNorm)?;
    let digits = a.norm.n_eff().min(b.norm.n_eff());
    let agree = a.norm.with_n_eff(digits) == b.norm.with_n_eff(digits);
    Ok(Output {
        result: json!({
            "input": h.to_json(),
            "norm": a.norm.to_json(),
            "methods_agree": agree,
            "residual_valuation": a.residual.to_string(),
        }),
        caps: caps(cfg),
        achieved: json!({ "N_eff": digits }),
    })
}

fn tower(cfg: &JobConfig, depth: u32) -> Result<Output> {
    let g = cfg.group(cfg.cap)?;
    let t = TorsionTower::new(&g, depth)?;
    let levels: Vec<Value> = t
        .levels()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            json!({
                "m": i + 1,
                "degree": l.degree(),
                "pibar": poly_json(l.pibar()),
                "v_alpha": l.v_alpha().to_string(),
            })
        })
        .collect();
    Ok(Output { result: json!({ "levels": levels }), caps: caps(cfg), achieved: json!({ "N": cfg.spec.prec() }) })
}

fn load_measure(src: &MeasureSource) -> Result<(String, JobConfig, Measure)> {
    let cfg = src.common.config()?;
    match (&src.dirac, &src.measure) {
        (Some(a), None) => {
            let a = cfg.elem(a)?;
            let base = if cfg.spec.has_quad() { GroupTag::OKp } else { GroupTag::Zp };
            let tag = if src.units { base.units() } else { base };
            let mu = measures::dirac(&a, tag, cfg.cap)?;
            Ok((to_json(src), cfg, mu))
        }
        (None, Some(path)) => {
            let text = read(path)?;
            let mu = Measure::from_json(&parse::<MeasureJson>(&text, "measure file")?)?;
            Ok((format!("{}{text}", to_json(src)), cfg, mu))
        }
        _ => Err(Error::Domain("give exactly one of --dirac and --measure".into())),
    }
}

fn measure(cmd: &MeasureCmd) -> Result<(String, Output)> {
    let (src, extra) = match cmd {
        MeasureCmd::Coset { src, level, delta } => (src, to_json(&(level, delta))),
        MeasureCmd::Moment { src, k } => (src, to_json(k)),
        MeasureCmd::Tilde { src } => (src, String::new()),
        MeasureCmd::Twist { src, k, teich } => (src, to_json(&(k, teich))),
    };
    let (inputs, cfg, mu) = load_measure(src)?;
    let achieved = json!({ "N_eff": mu.amice().n_eff() });
    let result = match cmd {
        MeasureCmd::Coset { level, delta: Some(d), .. } => {
            let d = super::parse_elem(mu.spec(), d)?;
            json!({ "level": level, "delta": elem_json(&d), "mass": elem_json(&measures::coset_mass(&mu, &d, *level)?) })
        }
        MeasureCmd::Coset { level, delta: None, .. } => {
            let masses: Vec<Value> = measures::coset_masses(&mu, *level)?
                .iter()
                .map(|(d, m)| json!({ "delta": elem_json(d), "mass": elem_json(m) }))
                .collect();
            json!({ "level": level, "masses": masses })
        }
        MeasureCmd::Moment { k, .. } => json!({ "k": k, "moment": elem_json(&measures::moment(&mu, *k)?) }),
        MeasureCmd::Tilde { .. } => json!({ "measure": mu.tilde()?.to_json() }),
        MeasureCmd::Twist { k, teich, .. } => {
            let domain = if mu.tag().rank() == 2 { CharDomain::OKp } else { CharDomain::Zp };
            let chi = FiniteCharacter::teichmuller_power(mu.spec(), domain, *teich)?;
            json!({ "k": k, "teich": teich, "value": elem_json(&measures::twist_eval(&mu, &chi, *k)?) })
        }
    };
    Ok((inputs + &extra, Output { result, caps: caps(&cfg), achieved }))
}

fn coleman(cmd: &ColemanCmd) -> Result<(String, Output)> {
    match cmd {
        ColemanCmd::System { common, depth, teichmuller, digits } => {
            let cfg = common.config()?;
            let g = cfg.group(cfg.cap)?;
            let tower = TorsionTower::new(&g, *depth)?;
            let (sys, kind, achieved) = match teichmuller {
                Some(c) => (CompatibleSystem::teichmuller(&tower, &cfg.elem(c)?)?, "teichmuller", json!({})),
                None => {
                    let fp = norm_fixed_point(&g, &random_unit(&cfg, cfg.cap.min(24)), *digits, 200)?;
                    let budget = tower.levels().last().map(|l| l.degree()).unwrap_or(1) * (*digits as usize + 2) * 2;
                    let s = CompatibleSystem::from_series(&tower, &fp.series.extend_exact(budget.max(fp.series.cap())))?;
                    (s, "fixed_point", json!({ "iterations": fp.iterations, "digits": fp.digits }))
                }
            };
            let defects: Vec<String> = sys.norm_defects()?.iter().map(|v| v.to_string()).collect();
            let out = Output {
                result: json!({ "kind": kind, "system": sys.to_json(&g), "norm_defects": defects }),
                caps: caps(&cfg),
                achieved,
            };
            Ok((to_json(&(common, depth, teichmuller, digits)), out))
        }
        ColemanCmd::Interpolate { system, .. } => {
            let text = read(system)?;
            let (_, sys) = CompatibleSystem::from_json(&system_from(&text)?)?;
            let it = interpolate(&sys)?;
            let out = Output {
                result: json!({ "series": it.series.to_json(), "modulus": poly_json(&it.modulus) }),
                caps: json!({ "D": it.series.cap() }),
                achieved: json!({ "digits": it.digits }),
            };
            Ok((text, out))
        }
        ColemanCmd::Mu0 { system, .. } => {
            let text = read(system)?;
            let (g, sys) = CompatibleSystem::from_json(&system_from(&text)?)?;
            let mu = mu_zero_pipeline(&g, &sys)?;
            let out = Output {
                result: json!({ "measure": mu.to_json() }),
                caps: json!({ "D": g.cap() }),
                achieved: json!({ "N_eff": mu.amice().n_eff() }),
            };
            Ok((text, out))
        }
    }
}

/// Accepts a bare system or the output of `coleman system`.
fn system_from(text: &str) -> Result<SystemJson> {
    let v: Value = parse(text, "system file")?;
    let inner = v.get("result").and_then(|r| r.get("system")).cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| Error::Format(format!("system file: {e}")))
}

/// Hand-written matrix: each entry lists its coefficients from `T^0` up,
/// a coefficient being an integer or a coordinate list.
#[derive(Deserialize)]
struct CompactMatrix {
    ring: RingSpecJson,
    #[serde(rename = "D")]
    d: usize,
    entries: Vec<Vec<Vec<Coef>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coef {
    Int(i64),
    Coords(Vec<i64>),
}

impl CompactMatrix {
    fn build(&self) -> Result<LambdaPresentation> {
        let spec = RingSpec::from_json(&self.ring)?;
        let rows = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        let c = e
                            .iter()
                            .map(|c| match c {
                                Coef::Int(a) => Ok(spec.from_int(*a)),
                                Coef::Coords(v) => spec.from_coords(v),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(TruncSeries::from_coeffs(&spec, &c, self.d))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        LambdaPresentation::new(rows)
    }
}

fn char_cmd(text: &str) -> Result<Output> {
    let v: Value = parse(text, "matrix file")?;
    let pres = if v.get("D").is_some() {
        let m: CompactMatrix = serde_json::from_value(v).map_err(|e| Error::Format(format!("matrix file: {e}")))?;
        m.build()?
    } else {
        let m: MatrixJson = serde_json::from_value(v).map_err(|e| Error::Format(format!("matrix file: {e}")))?;
        LambdaPresentation::from_json(&m)?
    };
    let w = char_ideal(&pres)?;
    Ok(Output {
        result: json!({
            "mu": ratio_json(w.mu),
            "lambda": w.lambda,
            "distinguished": poly_json(&w.distinguished),
            "size": pres.size(),
        }),
        caps: json!({ "D": pres.cap(), "N": pres.spec().prec() }),
        achieved: json!({ "digits": w.n_eff }),
    })
}

fn complexes(s: &str, n: usize) -> Result<Vec<Complex64>> {
    let x: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let x = x.map_err(|_| Error::Domain(format!("cannot read numbers {s:?}")))?;
    if x.len() != 2 * n {
        return Err(Error::Domain(format!("expected {} numbers in {s:?}", 2 * n)));
    }
    Ok(x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn lattice_meta(l: &Lattice) -> Value {
    json!({
        "reduced_q_abs": l.q().norm(),
        "legendre_defect": l.legendre_defect(),
        "series_truncation": "q-series stop once a term is below 1e-18 * max(1, |partial sum|)",
    })
}

fn elliptic(cmd: &EllipticCmd) -> Result<(String, Output)> {
    let args: &EllipticArgs = match cmd {
        EllipticCmd::Theta(a) => a,
        EllipticCmd::Psi { args, .. } => args,
    };
    let w = complexes(&args.lattice, 2)?;
    let z = complexes(&args.z, 1)?[0];
    let l = Lattice::new(w[0], w[1])?;
    match cmd {
        EllipticCmd::Theta(_) => {
            let out = Output {
                result: json!({ "theta": cjson(l.theta(z)), "sigma": cjson(l.sigma(z)), "delta": cjson(l.delta()) }),
                caps: lattice_meta(&l),
                achieved: json!({ "arithmetic": "f64" }),
            };
            Ok((to_json(args), out))
        }
        EllipticCmd::Psi { sublattice, .. } => {
            let s = complexes(sublattice, 2)?;
            let inner = Lattice::new(s[0], s[1])?;
            let pair = LatticePair::new(&inner, &l)?;
            let out = Output {
                result: json!({
                    "psi": cjson(pair.psi(z)?),
                    "delta": cjson(pair.delta()),
                    "index": pair.index(),
                    "delta_branch": "principal 12th root; only delta^12 is canonical",
                }),
                caps: lattice_meta(&inner),
                achieved: json!({ "arithmetic": "f64" }),
            };
            Ok((to_json(&(args, sublattice)), out))
        }
    }
}
