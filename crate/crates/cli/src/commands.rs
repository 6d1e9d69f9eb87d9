use std::path::Path;

use num_rational::Rational64;
use serde_json::{json, Value};

use mtc_orbifold::drinfeld_double::{bialgebra_checks, DrinfeldDouble};
use mtc_orbifold::group_alg::FiniteGroup;
use mtc_orbifold::models::by_name;
use mtc_orbifold::modular_data::Tolerances;
use mtc_orbifold::orbifold::{
    counting_check, derive, glob_identities, sector_identity, sector_mass_solve, sector_sum_check, whole_module_qdim,
    OrbifoldDescriptor,
};
use mtc_orbifold::qseries::{parse_character, qdim_limit, CharacterExpr, LimitOptions, QdimLimit, Strategy};
use mtc_orbifold::{Error, FusionTable, ModularData};

use crate::output::{flag, num, table, Report};
use crate::{CliError, Command, ModelAction, StrategyArg};

type Result<T> = std::result::Result<T, CliError>;

const SECTOR_MASS_TOLERANCE: f64 = 1e-12;

pub fn execute(cmd: &Command, tol: Option<f64>) -> Result<Report> {
    match cmd {
        Command::Check { md } => check(&load_md(md, tol)?),
        Command::Fusion { md, of } => fusion(&load_md(md, tol)?, of.as_deref()),
        Command::Qdim { md } => qdim(&load_md(md, tol)?),
        Command::Glob { md } => glob(&load_md(md, tol)?),
        Command::Orbifold { md, descriptor } => {
            let d = OrbifoldDescriptor::from_json(&read_json(descriptor)?)?;
            orbifold(&load_md(md, tol)?, &d)
        }
        Command::Double { group } => double(group, tol),
        Command::Char {
            model,
            eval,
            terms,
            dump,
        } => character(model, *eval, *terms, *dump),
        Command::QdimLimit { model_pair, strategy } => limit(model_pair, *strategy),
        Command::SectorMass { t } => sector_mass(*t),
        Command::Model {
            action: ModelAction::Export { name, out },
        } => export(name, out),
    }
}

/// Reads a file and checks JSON syntax, so that errors carry a position.
fn read_json(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if let Err(e) = serde_json::from_str::<Value>(&text) {
        return Err(CliError::Json {
            path: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e
                .to_string()
                .replace(&format!(" at line {} column {}", e.line(), e.column()), ""),
        });
    }
    Ok(text)
}

fn load_md(path: &Path, tol: Option<f64>) -> Result<ModularData> {
    let md = ModularData::from_json(&read_json(path)?)?;
    match tol {
        Some(axiom) if md.tolerances() == Tolerances::default() => Ok(md.with_tolerances(Tolerances {
            axiom,
            ..Tolerances::default()
        })?),
        _ => Ok(md),
    }
}

fn check(md: &ModularData) -> Result<Report> {
    let report = md.validate();
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| vec![c.name.clone(), num(c.deviation), num(c.tolerance), flag(c.pass).into()])
        .collect();
    Ok(Report {
        command: "check",
        pass: report.pass,
        result: json!({ "labels": md.labels(), "validation": report }),
        table: table(&["check", "deviation", "tolerance", "status"], &rows),
    })
}

/// Products `a x b` listed as `c` with multiplicity; shared by `fusion` and
/// `double`.
fn fusion_listing(labels: &[String], ft: &FusionTable, of: Option<usize>) -> (Value, String) {
    let n = labels.len();
    let lefts: Vec<usize> = match of {
        Some(a) => vec![a],
        None => (0..n).collect(),
    };
    let mut products = Vec::new();
    let mut rows = Vec::new();
    for &a in &lefts {
        for b in 0..n {
            let terms: Vec<(usize, u32)> = (0..n).map(|c| (c, ft.get(a, b, c))).filter(|&(_, m)| m > 0).collect();
            products.push(json!({
                "left": labels[a],
                "right": labels[b],
                "result": terms
                    .iter()
                    .map(|&(c, m)| json!({ "label": labels[c], "multiplicity": m }))
                    .collect::<Vec<_>>(),
            }));
            let rhs = terms
                .iter()
                .map(|&(c, m)| {
                    if m == 1 {
                        labels[c].clone()
                    } else {
                        format!("{m} {}", labels[c])
                    }
                })
                .collect::<Vec<_>>()
                .join(" + ");
            rows.push(vec![labels[a].clone(), labels[b].clone(), rhs]);
        }
    }
    let value = json!({
        "labels": labels,
        "vacuum": labels[ft.vacuum()],
        "products": products,
    });
    (value, table(&["left", "right", "product"], &rows))
}

fn fusion(md: &ModularData, of: Option<&str>) -> Result<Report> {
    let of = match of {
        Some(l) => Some(
            md.label_index(l)
                .ok_or_else(|| CliError::Usage(format!("unknown label {l:?}")))?,
        ),
        None => None,
    };
    let ft = md.verlinde_fusion()?;
    let axioms = ft.check_axioms();
    let (mut value, mut text) = fusion_listing(md.labels(), &ft, of);
    value["residual"] = json!(ft.residual());
    value["axioms"] = json!(axioms
        .as_ref()
        .map(|_| "ok".to_string())
        .unwrap_or_else(|e| e.to_string()));
    text.push_str(&format!("rounding residual: {}\n", num(ft.residual())));
    if let Err(e) = &axioms {
        text.push_str(&format!("axioms: {e}\n"));
    }
    Ok(Report {
        command: "fusion",
        pass: axioms.is_ok() && ft.residual() <= md.tolerances().integrality,
        result: value,
        table: text,
    })
}

fn glob_parts(md: &ModularData) -> Result<(Value, String, bool)> {
    let g = md.global_dimension()?;
    let pass = g.deviation <= md.tolerances().axiom;
    let text = format!(
        "glob {}  (sum of squares {}, deviation {})\n",
        num(g.value),
        num(g.qdim_square_sum),
        num(g.deviation)
    );
    Ok((json!(g), text, pass))
}

fn qdim(md: &ModularData) -> Result<Report> {
    let q = md.quantum_dimensions()?;
    let (g, gtext, pass) = glob_parts(md)?;
    let rows: Vec<Vec<String>> = md
        .labels()
        .iter()
        .zip(&q)
        .map(|(l, x)| vec![l.clone(), num(*x)])
        .collect();
    let dims: Vec<Value> = md
        .labels()
        .iter()
        .zip(&q)
        .map(|(l, x)| json!({ "label": l, "qdim": x }))
        .collect();
    Ok(Report {
        command: "qdim",
        pass,
        result: json!({ "quantum_dimensions": dims, "global_dimension": g }),
        table: table(&["label", "qdim"], &rows) + &gtext,
    })
}

fn glob(md: &ModularData) -> Result<Report> {
    let (g, text, pass) = glob_parts(md)?;
    Ok(Report {
        command: "glob",
        pass,
        result: json!({ "global_dimension": g }),
        table: text,
    })
}

fn orbifold(md: &ModularData, d: &OrbifoldDescriptor) -> Result<Report> {
    let derived = derive(md, d)?;
    let identities = glob_identities(md, d)?;
    let tol = OrbifoldDescriptor::tolerance(md);
    let mut pass = identities.pass();

    let mut counting = Vec::new();
    let mut sectors = Vec::new();
    for g in d.group.elements() {
        match counting_check(md, d, g) {
            Ok(c) => {
                pass &= c.pass;
                counting.push(c);
            }
            Err(Error::Unsupported(_)) => {}
            Err(e) => return Err(e.into()),
        }
        match sector_identity(md, d, g) {
            Ok(s) => {
                pass &= s.pass;
                sectors.push(s);
            }
            Err(Error::Unsupported(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let sums = match derived.cyclic_order {
        Some(t) => sector_sum_check(&derived, t, tol)?,
        None => Vec::new(),
    };
    pass &= sums.iter().all(|s| s.pass);
    let mut wholes = Vec::new();
    for o in &d.orbits {
        let w = whole_module_qdim(md, d, o.id)?;
        pass &= w.pass;
        wholes.push(w);
    }

    let mut text = table(
        &["irreducible", "sector", "dim W", "qdim"],
        &derived
            .irreducibles
            .iter()
            .map(|i| {
                vec![
                    i.label.clone(),
                    i.sector.to_string(),
                    i.dim_w.to_string(),
                    num(i.qdim_vg),
                ]
            })
            .collect::<Vec<_>>(),
    );
    text.push_str(&format!(
        "{} irreducibles, glob(V^G) {}\n\n",
        derived.count(),
        num(derived.glob_vg)
    ));
    text.push_str(&table(
        &["identity", "lhs", "rhs", "deviation", "status"],
        &identities
            .identities
            .iter()
            .map(|c| {
                vec![
                    c.id.clone(),
                    num(c.lhs),
                    num(c.rhs),
                    num(c.deviation),
                    flag(c.pass).into(),
                ]
            })
            .collect::<Vec<_>>(),
    ));
    let mut rows: Vec<Vec<String>> = Vec::new();
    for c in &counting {
        rows.push(vec![
            format!("counting g={}", c.element),
            c.twisted_count.to_string(),
            c.stable_count.to_string(),
            flag(c.pass).into(),
        ]);
    }
    for s in &sectors {
        rows.push(vec![
            format!("sector g={}", s.element),
            num(s.sum),
            num(s.glob),
            flag(s.pass).into(),
        ]);
    }
    for s in &sums {
        rows.push(vec![
            format!("sector sum r={}", s.r),
            num(s.sum),
            num(s.expected),
            flag(s.pass).into(),
        ]);
    }
    for w in &wholes {
        rows.push(vec![
            format!("whole module orbit {}", w.orbit),
            num(w.value),
            num(w.from_parts),
            flag(w.pass).into(),
        ]);
    }
    text.push('\n');
    text.push_str(&table(&["check", "value", "expected", "status"], &rows));

    Ok(Report {
        command: "orbifold",
        pass,
        result: json!({
            "derived": derived,
            "identities": identities,
            "counting": counting,
            "sector_identities": sectors,
            "sector_sums": sums,
            "whole_module_qdims": wholes,
        }),
        table: text,
    })
}

fn double(spec: &str, tol: Option<f64>) -> Result<Report> {
    let group = FiniteGroup::parse(spec)?;
    let d = DrinfeldDouble::new(group.clone())?;
    let ft = d.fusion_table()?;
    let irreps = d.irreps();
    let mut labels = vec![String::new(); irreps.len()];
    for &i in &irreps {
        labels[d.index(i)] = d.label(i);
    }
    let bialgebra = bialgebra_checks(&group);
    let iso = d.isomorphism_check()?;
    let deviation = d.tensor_rule_deviation();
    let tol = tol.unwrap_or(Tolerances::default().axiom);
    let pass = bialgebra.pass() && iso.pass && deviation <= tol;

    let (fusion, ftext) = fusion_listing(&labels, &ft, None);
    let irrep_rows: Vec<Vec<String>> = irreps
        .iter()
        .map(|&i| {
            vec![
                d.label(i),
                i.lambda.to_string(),
                i.sector.to_string(),
                d.irrep_order(i).to_string(),
            ]
        })
        .collect();
    let irrep_json: Vec<Value> = irreps
        .iter()
        .map(|&i| json!({ "label": d.label(i), "lambda": i.lambda, "sector": i.sector, "order": d.irrep_order(i) }))
        .collect();
    let mut text = table(&["irrep", "lambda", "sector", "order"], &irrep_rows);
    text.push('\n');
    text.push_str(&ftext);
    text.push('\n');
    let checks = [
        ("associative", bialgebra.associative),
        ("unital", bialgebra.unital),
        ("coassociative", bialgebra.coassociative),
        ("counital", bialgebra.counital),
        ("multiplicative", bialgebra.multiplicative),
        ("counit_multiplicative", bialgebra.counit_multiplicative),
        ("fusion_group_isomorphic", iso.pass),
    ];
    let mut rows: Vec<Vec<String>> = checks
        .iter()
        .map(|(n, p)| vec![n.to_string(), flag(*p).into()])
        .collect();
    rows.push(vec![
        format!("tensor_rule_deviation {}", num(deviation)),
        flag(deviation <= tol).into(),
    ]);
    text.push_str(&table(&["check", "status"], &rows));
    Ok(Report {
        command: "double",
        pass,
        result: json!({
            "group": spec,
            "irreps": irrep_json,
            "fusion": fusion,
            "bialgebra": bialgebra,
            "isomorphism": iso,
            "tensor_rule_deviation": deviation,
        }),
        table: text,
    })
}

fn character(name: &str, eval: Option<f64>, terms: i64, dump: bool) -> Result<Report> {
    let expr = parse_character(name)?;
    let order = Rational64::from_integer(terms);
    let lead = expr.leading_exponent();
    let mut result = json!({
        "character": name,
        "leading_exponent": lead.to_string(),
        "order": terms,
    });
    let mut text = format!("character {name}\nleading exponent {lead}\ntruncation order {terms}\n");
    if let Some(y) = eval {
        let e = expr.eval(y, order)?;
        result["y"] = json!(y);
        result["value"] = json!(e.value);
        result["error_bound"] = json!(e.error_bound);
        text.push_str(&format!(
            "value at y = {}: {}  (error bound {})\n",
            num(y),
            num(e.value),
            num(e.error_bound)
        ));
    }
    if dump {
        let series = expr.series(order)?.dump();
        result["series"] = json!(series.lines().collect::<Vec<_>>());
        text.push_str(&series);
    }
    Ok(Report {
        command: "char",
        pass: true,
        result,
        table: text,
    })
}

/// `(label, expr)` for numerator and denominator.
fn limit_pair(spec: &str) -> Result<((String, CharacterExpr), (String, CharacterExpr))> {
    if let Some((m, v)) = spec.split_once('/') {
        return Ok((
            (m.trim().to_string(), parse_character(m)?),
            (v.trim().to_string(), parse_character(v)?),
        ));
    }
    let bundle = by_name(spec)?;
    let twisted = bundle
        .twisted_label
        .clone()
        .ok_or_else(|| CliError::Usage(format!("model {spec} has no twisted module")))?;
    let get = |label: &str| {
        bundle
            .character(label)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("model {spec} has no character for {label}")))
    };
    Ok((
        (twisted.clone(), get(&twisted)?),
        (bundle.vacuum_label.clone(), get(&bundle.vacuum_label)?),
    ))
}

fn limit(spec: &str, strategy: StrategyArg) -> Result<Report> {
    let ((m_label, m), (v_label, v)) = limit_pair(spec)?;
    let opts = match strategy {
        StrategyArg::Transform => LimitOptions::default(),
        StrategyArg::Raw => LimitOptions::raw(),
    };
    let lim = qdim_limit(&m, &v, &opts)?;
    let strategy_name = match opts.strategy {
        Strategy::Transform => "transform",
        Strategy::Raw => "raw",
    };
    let text = match &lim {
        QdimLimit::Finite { value, error } => format!("finite {}  (error {})", num(*value), num(*error)),
        QdimLimit::Divergent => "divergent".to_string(),
        QdimLimit::Inconclusive { reason } => format!("inconclusive: {reason}"),
    };
    Ok(Report {
        command: "qdim-limit",
        pass: !matches!(lim, QdimLimit::Inconclusive { .. }),
        result: json!({
            "model_pair": spec,
            "numerator": m_label,
            "denominator": v_label,
            "strategy": strategy_name,
            "limit": lim,
        }),
        table: format!("lim {m_label} / {v_label} ({strategy_name}): {text}\n"),
    })
}

fn sector_mass(t: usize) -> Result<Report> {
    let m = sector_mass_solve(t)?;
    let pass = m.max_deviation <= SECTOR_MASS_TOLERANCE && m.residual <= SECTOR_MASS_TOLERANCE;
    let rows: Vec<Vec<String>> =
        m.x.iter()
            .enumerate()
            .map(|(r, x)| vec![r.to_string(), num(*x)])
            .collect();
    let text = table(&["r", "x_r"], &rows)
        + &format!(
            "max deviation from 1/T {}, residual {}\n",
            num(m.max_deviation),
            num(m.residual)
        );
    Ok(Report {
        command: "sector-mass",
        pass,
        result: json!({ "T": t, "solution": m, "tolerance": SECTOR_MASS_TOLERANCE }),
        table: text,
    })
}

fn export(name: &str, out: &Path) -> Result<Report> {
    let bundle = by_name(name)?;
    let io = |source| CliError::Io {
        path: out.display().to_string(),
        source,
    };
    std::fs::create_dir_all(out).map_err(io)?;
    let mut written = Vec::new();
    for f in bundle.export() {
        let path = out.join(&f.name);
        std::fs::write(&path, &f.contents).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        written.push(path.display().to_string());
    }
    let text = written.iter().map(|p| format!("wrote {p}\n")).collect::<String>();
    Ok(Report {
        command: "model export",
        pass: true,
        result: json!({ "model": bundle.name, "rational": bundle.rational, "files": written }),
        table: text,
    })
}
