//! Command implementations, shared by the binary and the test suites.

use std::fmt::Write as _;

use serde_json::json;

use qoseries::ltseries::LPoly;
use qoseries::motivic::{self, Options};
use qoseries::oracle;
use qoseries::qocore::{Mode, QoSystem};
use qoseries::Error;

use crate::input::InputSpec;
use crate::render;

/// Exit codes: 0 success, 2 invalid input, 3 internal consistency failure,
/// 4 resource budget exceeded.
#[derive(Debug)]
pub enum CmdError {
    Input(String),
    Internal(String),
    Budget(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Input(_) => 2,
            CmdError::Internal(_) => 3,
            CmdError::Budget(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Input(m) | CmdError::Internal(m) | CmdError::Budget(m) => m,
        }
    }
}

pub type CmdResult = Result<String, CmdError>;

fn classify(e: Error) -> CmdError {
    match e {
        Error::BudgetExceeded(_) => CmdError::Budget(format!(
            "{e}; raise --box-limit to allow a larger enumeration box"
        )),
        Error::InternalInconsistency(_)
        | Error::NonPolynomialCoefficient { .. }
        | Error::NotStabilized { .. } => CmdError::Internal(format!(
            "{e}; this indicates a bug or an insufficient --guard window"
        )),
        other => CmdError::Input(other.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum What {
    Interior,
    Geom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Closed,
    Oracle,
    Both,
}

fn build_system(input: &InputSpec) -> Result<QoSystem, CmdError> {
    let cd = input
        .to_char_data()
        .map_err(|e| CmdError::Input(e.to_string()))?;
    QoSystem::new(cd).map_err(classify)
}

pub fn cmd_validate(input: &InputSpec, format: Format) -> CmdResult {
    let sys = build_system(input)?;
    let cd = sys.char_data();
    match format {
        Format::Text => {
            let mut out = String::new();
            let mode = match cd.mode() {
                Mode::Qo => "qo",
                Mode::Toric => "toric",
            };
            writeln!(out, "mode: {mode}").unwrap();
            writeln!(out, "d: {}", cd.dim()).unwrap();
            let label = if cd.mode() == Mode::Qo {
                "exponents"
            } else {
                "generators"
            };
            let vecs: Vec<String> = cd.vectors().iter().map(|v| v.to_string()).collect();
            writeln!(out, "{label}: {}", vecs.join(" ")).unwrap();
            writeln!(out, "coordinate permutation: {:?}", cd.permutation()).unwrap();
            if let Some(chain) = cd.chain() {
                let idx: Vec<String> = chain.indices.iter().map(|n| n.to_string()).collect();
                writeln!(out, "indices n_j: [{}]", idx.join(", ")).unwrap();
                for (j, l) in chain.lattices.iter().enumerate() {
                    writeln!(out, "M_{j} = {l}").unwrap();
                }
            }
            writeln!(out, "M = {}", cd.lattice_m()).unwrap();
            writeln!(out, "N = {}", sys.lattice_n()).unwrap();
            if cd.warnings().is_empty() {
                writeln!(out, "warnings: none").unwrap();
            } else {
                for w in cd.warnings() {
                    writeln!(out, "warning: {w}").unwrap();
                }
            }
            Ok(out)
        }
        Format::Json => {
            let chain = cd.chain().map(|chain| {
                json!({
                    "indices": chain.indices.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
                    "lattices": chain.lattices.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                })
            });
            let doc = json!({
                "mode": match cd.mode() { Mode::Qo => "qo", Mode::Toric => "toric" },
                "d": cd.dim(),
                "vectors": cd.vectors().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "permutation": cd.permutation(),
                "chain": chain,
                "lattice_m": cd.lattice_m().to_string(),
                "lattice_n": sys.lattice_n().to_string(),
                "warnings": cd.warnings(),
            });
            Ok(format!("{:#}\n", doc))
        }
    }
}

pub fn cmd_report(input: &InputSpec, format: Format) -> CmdResult {
    let sys = build_system(input)?;
    let opts = input.to_options().map_err(|e| CmdError::Input(e.to_string()))?;
    let d = sys.dim();
    // per-face candidate poles
    let mut faces = Vec::new();
    for section in sys.sections() {
        let poles: Vec<(i64, u64)> = if section.is_point() {
            vec![(0, 1)]
        } else {
            let cd = section
                .char_data(sys.char_data().mode(), opts.section_lattice)
                .map_err(classify)?;
            let sub = QoSystem::new(cd).map_err(classify)?;
            sub.b_set().into_iter().collect()
        };
        faces.push((section.keep.clone(), poles));
    }
    match format {
        Format::Text => {
            let mut out = String::new();
            for k in 1..=d {
                let gens: Vec<String> = sys
                    .jacobian(k)
                    .generators()
                    .iter()
                    .map(|g| g.to_string())
                    .collect();
                writeln!(out, "J_{k} generators: {}", gens.join(" ")).unwrap();
            }
            for k in 1..=d {
                let rays: Vec<String> =
                    sys.fan(k).rays().iter().map(|r| r.to_string()).collect();
                writeln!(out, "fan Σ_{k} rays (primitive in N): {}", rays.join(" ")).unwrap();
            }
            for k in 1..=d {
                let cones = sys.contributing_cones(k);
                let interior = cones.iter().filter(|(_, f)| *f).count();
                writeln!(
                    out,
                    "D_{k}: {} cones, {} meeting the interior",
                    cones.len(),
                    interior
                )
                .unwrap();
            }
            for (keep, poles) in &faces {
                let pole_strs: Vec<String> =
                    poles.iter().map(|(a, b)| format!("({a},{b})")).collect();
                writeln!(
                    out,
                    "face keep={keep:?}: B = {{{}}}",
                    pole_strs.join(", ")
                )
                .unwrap();
            }
            Ok(out)
        }
        Format::Json => {
            let doc = json!({
                "jacobian_generators": (1..=d).map(|k| {
                    sys.jacobian(k).generators().iter().map(|g| g.to_string()).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
                "fan_rays": (1..=d).map(|k| {
                    sys.fan(k).rays().iter().map(|r| r.to_string()).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
                "contributing_cones": (1..=d).map(|k| {
                    let cones = sys.contributing_cones(k);
                    json!({
                        "total": cones.len(),
                        "interior": cones.iter().filter(|(_, f)| *f).count(),
                    })
                }).collect::<Vec<_>>(),
                "faces": faces.iter().map(|(keep, poles)| json!({
                    "keep": keep,
                    "poles": poles,
                })).collect::<Vec<_>>(),
            });
            Ok(format!("{:#}\n", doc))
        }
    }
}

pub struct SeriesArgs {
    pub what: What,
    pub method: Method,
    pub order: Option<usize>,
    pub format: Format,
}

/// Oracle coefficients of the geometric series: the point contributes 1 per
/// level, every other face its own interior enumeration.
fn oracle_geom_coefficients(
    sys: &QoSystem,
    order: usize,
    opts: &Options,
) -> Result<Vec<LPoly>, Error> {
    let mut total = vec![LPoly::zero(); order + 1];
    for section in sys.sections() {
        let coeffs = if section.is_point() {
            vec![LPoly::one(); order + 1]
        } else {
            let cd = section.char_data(sys.char_data().mode(), opts.section_lattice)?;
            let sub = QoSystem::new(cd)?;
            oracle::series_coefficients(&sub, order, opts.box_limit)?
        };
        for (t, c) in total.iter_mut().zip(coeffs.iter()) {
            *t = t.add(c);
        }
    }
    Ok(total)
}

pub fn cmd_series(input: &InputSpec, args: &SeriesArgs) -> CmdResult {
    let sys = build_system(input)?;
    let opts = input.to_options().map_err(|e| CmdError::Input(e.to_string()))?;
    let order = args.order.unwrap_or(10);

    let closed = |sys: &QoSystem| -> Result<(qoseries::BivRat, qoseries::BivRat), CmdError> {
        match args.what {
            What::Interior => {
                let p = motivic::p_interior(sys, &opts).map_err(classify)?;
                let canon =
                    motivic::canonical_form(&p, &sys.b_set(), opts.guard).map_err(classify)?;
                Ok((p, canon))
            }
            What::Geom => {
                let p = motivic::p_geom(sys, &opts).map_err(classify)?;
                let poles = motivic::candidate_poles(sys, &opts).map_err(classify)?;
                let canon = motivic::canonical_form(&p, &poles, opts.guard).map_err(classify)?;
                Ok((p, canon))
            }
        }
    };

    let oracle_coeffs = |sys: &QoSystem| -> Result<Vec<LPoly>, CmdError> {
        match args.what {
            What::Interior => {
                oracle::series_coefficients(sys, order, opts.box_limit).map_err(classify)
            }
            What::Geom => oracle_geom_coefficients(sys, order, &opts).map_err(classify),
        }
    };

    match args.method {
        Method::Closed => {
            let (_, canon) = closed(&sys)?;
            match args.format {
                Format::Text => {
                    let mut out = String::new();
                    writeln!(out, "rational form:\n  {canon}").unwrap();
                    if args.order.is_some() {
                        let coeffs = canon.expand(order).map_err(classify)?;
                        writeln!(out, "expansion:").unwrap();
                        out.push_str(&render::expansion_to_text(&coeffs));
                    }
                    Ok(out)
                }
                Format::Json => {
                    let mut doc = render::bivrat_to_json(&canon);
                    if args.order.is_some() {
                        let coeffs = canon.expand(order).map_err(classify)?;
                        doc["expansion"] = render::expansion_to_json(&coeffs);
                    }
                    Ok(format!("{:#}\n", doc))
                }
            }
        }
        Method::Oracle => {
            let coeffs = oracle_coeffs(&sys)?;
            match args.format {
                Format::Text => Ok(format!(
                    "oracle expansion:\n{}",
                    render::expansion_to_text(&coeffs)
                )),
                Format::Json => Ok(format!(
                    "{:#}\n",
                    json!({ "oracle_expansion": render::expansion_to_json(&coeffs) })
                )),
            }
        }
        Method::Both => {
            let (_, canon) = closed(&sys)?;
            let closed_coeffs = canon.expand(order).map_err(classify)?;
            let oracle_coeffs = oracle_coeffs(&sys)?;
            let mut mismatches = Vec::new();
            for s in 0..=order {
                if closed_coeffs[s] != oracle_coeffs[s] {
                    mismatches.push(s);
                }
            }
            let mut out = String::new();
            match args.format {
                Format::Text => {
                    for s in 0..=order {
                        let status = if closed_coeffs[s] == oracle_coeffs[s] {
                            "ok"
                        } else {
                            "MISMATCH"
                        };
                        writeln!(
                            out,
                            "  T^{s}: closed = {} | oracle = {} [{status}]",
                            closed_coeffs[s], oracle_coeffs[s]
                        )
                        .unwrap();
                    }
                    if mismatches.is_empty() {
                        writeln!(out, "all {} coefficients agree", order + 1).unwrap();
                    }
                }
                Format::Json => {
                    let doc = json!({
                        "closed": render::expansion_to_json(&closed_coeffs),
                        "oracle": render::expansion_to_json(&oracle_coeffs),
                        "mismatches": mismatches,
                    });
                    out = format!("{:#}\n", doc);
                }
            }
            if mismatches.is_empty() {
                Ok(out)
            } else {
                Err(CmdError::Internal(format!(
                    "{out}closed form and oracle disagree at T^{}",
                    mismatches[0]
                )))
            }
        }
    }
}

pub fn cmd_volume(input: &InputSpec, format: Format) -> CmdResult {
    let sys = build_system(input)?;
    let vol = motivic::motivic_volume(&sys).map_err(classify)?;
    match format {
        Format::Text => Ok(format!("motivic volume:\n  {vol}\n")),
        Format::Json => Ok(format!("{:#}\n", render::volume_to_json(&vol))),
    }
}
