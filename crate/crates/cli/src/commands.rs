use jacarith::bsdinv::{self, Place};
use jacarith::ffield::FieldCache;
use jacarith::monodromy::{self, Extension, SplitType};
use jacarith::points_descent::{self, DescentArg, DescentInstance};
use jacarith::{groupring, heights, lfunction, numth};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::params::InstanceParams;
use crate::report::{int, ints, rat, Report, Table};
use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Lfunction,
    Rank,
    Heights,
    Module,
    Descent,
    Bsd,
    Monodromy,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Lfunction => "lfunction",
            Command::Rank => "rank",
            Command::Heights => "heights",
            Command::Module => "module",
            Command::Descent => "descent",
            Command::Bsd => "bsd",
            Command::Monodromy => "monodromy",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Default)]
pub struct Options {
    pub max_n: Option<u32>,
    pub fields: FieldCache,
}

type Section = fn(&mut Report, &InstanceParams, &Options) -> Result<Table, UsageError>;

pub fn run(cmd: Command, params: &InstanceParams, opts: &Options) -> Result<Report, UsageError> {
    let section: Section = match cmd {
        Command::Lfunction => lfunction_section,
        Command::Rank => rank_section,
        Command::Heights => heights_section,
        Command::Module => module_section,
        Command::Descent => descent_section,
        Command::Bsd => bsd_section,
        Command::Monodromy => monodromy_section,
        Command::Report => return full_report(params, opts),
    };
    let mut rep = Report::new(cmd.name(), params, Table::default());
    rep.table = section(&mut rep, params, opts)?;
    Ok(rep)
}

/// Every section whose hypotheses hold; the others are recorded as skipped.
fn full_report(params: &InstanceParams, opts: &Options) -> Result<Report, UsageError> {
    params.need_q()?;
    params.need_r()?;
    params.need_d()?;
    let mut rep = Report::new("report", params, Table::new(&["section", "check", "pass"]));
    let mut sections: Vec<(&str, Section)> = vec![
        ("lfunction", lfunction_section),
        ("rank", rank_section),
        ("heights", heights_section),
        ("module", module_section),
        ("descent", descent_section),
        ("bsd", bsd_section),
    ];
    if params.ell.is_some() {
        sections.push(("monodromy", monodromy_section));
    }
    for (name, section) in sections {
        let mut sub = Report::new(name, params, Table::default());
        match section(&mut sub, params, opts) {
            Ok(_) => {
                rep.result(name, Value::Object(sub.results));
                for c in sub.checks {
                    rep.table.push(vec![name.into(), c.name.clone(), c.pass.to_string()]);
                    rep.check(&format!("{name}.{}", c.name), c.pass, c.detail);
                }
            }
            Err(UsageError(why)) => rep.result(name, json!({ "skipped": why })),
        }
    }
    Ok(rep)
}

fn p_divides_rd(p: u64, r: u32, d: u32) -> Result<(), UsageError> {
    if (r as u64 * d as u64) % p == 0 {
        return Err(UsageError(format!("regime: requires p ∤ rd (p = {p}, r = {r}, d = {d})")));
    }
    Ok(())
}

fn lpoly_json(l: &lfunction::LPoly) -> Value {
    json!({ "coeffs": ints(&l.coeffs), "text": l.to_string(), "degree": l.degree() })
}

fn lfunction_section(rep: &mut Report, ip: &InstanceParams, opts: &Options) -> Result<Table, UsageError> {
    let (q, r, d) = (ip.need_q()?, ip.need_r()?, ip.need_d()?);
    p_divides_rd(ip.need_p()? as u64, r, d)?;
    let bound = lfunction::degree_bound(d, r);
    let n = opts.max_n.unwrap_or(bound as u32);
    if (n as u64) < bound {
        return Err(UsageError(format!("--max-n {n} is below the degree bound {bound}")));
    }
    let mut table = Table::new(&["k", "closed_form", "brute_force"]);
    let closed = rep.verified("closed_form_integral", lfunction::closed_form_L(q, d, r, &opts.fields), lpoly_json);
    let brute = rep.verified("brute_force_integral", lfunction::brute_force_L(q, d, r, n, &opts.fields), lpoly_json);
    rep.result("degree_bound", json!(bound));
    rep.result("series_terms", json!(n));
    if let Some(c) = &closed {
        rep.result("L", lpoly_json(c));
        let deg = c.degree().unwrap_or(0) as u64;
        rep.check("degree_law", deg == bound, json!({ "degree": deg, "expected": bound }));
    }
    if let (Some(c), Some(b)) = (&closed, &brute) {
        rep.check("dual_path", c == b, json!({ "closed_form": ints(&c.coeffs), "brute_force": ints(&b.coeffs) }));
        let len = c.coeffs.len().max(b.coeffs.len());
        let at = |v: &[BigInt], k: usize| v.get(k).cloned().unwrap_or_default().to_string();
        for k in 0..len {
            table.push(vec![k.to_string(), at(&c.coeffs, k), at(&b.coeffs, k)]);
        }
    }
    Ok(table)
}

fn descent_instance(ip: &InstanceParams, opts: &Options) -> Result<DescentInstance, UsageError> {
    let (p, q, r) = (ip.need_p()?, ip.need_q()?, ip.need_r()?);
    ip.need_d()?;
    let nu = ip.need_nu()?;
    ip.need_r_divides_d()?;
    ip.need_d_divides_q_minus_1()?;
    DescentInstance::new(p, nu, r, q, &opts.fields).map_err(|e| UsageError(e.to_string()))
}

fn rank_section(rep: &mut Report, ip: &InstanceParams, opts: &Options) -> Result<Table, UsageError> {
    let (q, r, d) = (ip.need_q()?, ip.need_r()?, ip.need_d()?);
    p_divides_rd(ip.need_p()? as u64, r, d)?;
    let mut table = Table::new(&["quantity", "value"]);
    let Some(l) = rep.verified("closed_form_integral", lfunction::closed_form_L(q, d, r, &opts.fields), lpoly_json)
    else {
        return Ok(table);
    };
    let ar = lfunction::analytic_rank(&l);
    rep.result("analytic_rank", json!(ar.rho));
    rep.result("leading", rat(&ar.leading));
    table.push(vec!["analytic_rank".into(), ar.rho.to_string()]);
    table.push(vec!["leading".into(), ar.leading.to_string()]);
    if let Some(set) = rep.verified("orbit_decomposition", lfunction::orbit_decomposition(q, d, r), |s| {
        json!(s.orbits.len())
    }) {
        if let Some(b) = rep.verified("balanced_count", lfunction::balanced_count(&set), |b| json!(b)) {
            rep.result("balanced_orbits", json!(b));
            table.push(vec!["balanced_orbits".into(), b.to_string()]);
            rep.check("rank_le_balanced", ar.rho as usize <= b, json!({ "rank": ar.rho, "balanced": b }));
        }
    }
    let nu_bound = numth::lcm(r as u64, d as u64) as u32;
    match lfunction::rank_formula(q, d, r, nu_bound) {
        Ok(f) => {
            rep.result("rank_formula", json!(f));
            table.push(vec!["rank_formula".into(), f.to_string()]);
            rep.check("analytic_eq_formula", f == ar.rho as u64, json!({ "analytic": ar.rho, "formula": f }));
        }
        Err(e) => rep.result("rank_formula", json!({ "skipped": e.to_string() })),
    }
    let descent_applies = numth::is_prime(r as u64) && r > 2;
    match descent_instance(ip, opts) {
        Ok(inst) if descent_applies => {
            if let Some(b) = rep.verified("descent_certificates", points_descent::descent_rank_bound(&inst), |b| {
                json!({ "z_rank": b.z_rank, "conditional": b.conditional })
            }) {
                rep.result("descent_rank", json!({ "z_rank": b.z_rank, "conditional": true }));
                table.push(vec!["descent_rank".into(), b.z_rank.to_string()]);
                rep.check("analytic_eq_descent", b.z_rank == ar.rho, json!({ "analytic": ar.rho, "descent": b.z_rank }));
            }
        }
        Ok(_) => rep.result("descent_rank", json!({ "skipped": "regime: requires r an odd prime" })),
        Err(UsageError(why)) => rep.result("descent_rank", json!({ "skipped": why })),
    }
    Ok(table)
}

fn need_rd(ip: &InstanceParams) -> Result<(u32, u32), UsageError> {
    let (r, d) = (ip.need_r()?, ip.need_d()?);
    ip.need_r_divides_d()?;
    if d < 3 {
        return Err(UsageError(format!("regime: requires d ≥ 3 (d = {d})")));
    }
    Ok((r, d))
}

fn heights_section(rep: &mut Report, ip: &InstanceParams, _: &Options) -> Result<Table, UsageError> {
    let (r, d) = need_rd(ip)?;
    let mut table = Table::new(&["i", "j", "num", "den"]);
    let t = heights::height_table(d, r).map_err(|e| UsageError(e.to_string()))?;
    rep.result("proved_regime", json!(t.proved_regime));
    let entries: Vec<Value> = t.h.iter().map(rat).collect();
    rep.result("h", json!(entries));
    for (k, h) in t.h.iter().enumerate() {
        let (i, j) = (k % d as usize, k / d as usize);
        table.push(vec![i.to_string(), j.to_string(), h.numer().to_string(), h.denom().to_string()]);
    }
    let expected_rank = ((r - 1) * (d - 2)) as usize;
    if let Some(g) = rep.verified("gram_rank_computed", heights::gram_rank(d, r), |g| json!(g)) {
        rep.check("gram_rank", g == expected_rank, json!({ "rank": g, "expected": expected_rank }));
    }
    if let Some(k) = rep.verified("kernel_computed", heights::kernel_contains_ideal(d, r), |k| json!(k)) {
        rep.check("kernel_contains_ideal", k, json!(k));
    }
    rep.verified("proportionality", heights::proportionality_check(d, r), |b| json!(b));
    if let Some(di) = rep.verified("disc_ideal", heights::disc_ideal(d, r), int) {
        rep.result("disc_ideal", int(&di));
    }
    if let Some(v) = rep.verified("disc_v_mod_torsion", heights::disc_v_mod_torsion(d, r), rat) {
        rep.result("disc_v_mod_torsion", rat(&v));
        rep.result("disc_w_mod_torsion", rat(&heights::disc_w_closed(d, r)));
    }
    Ok(table)
}

fn module_section(rep: &mut Report, ip: &InstanceParams, _: &Options) -> Result<Table, UsageError> {
    let (r, d) = need_rd(ip)?;
    let mut table = Table::new(&["invariant_factor"]);
    let Some(t) = rep.verified("smith_form", groupring::torsion_structure(d, r), |t| ints(&t.factors)) else {
        return Ok(table);
    };
    for f in &t.factors {
        table.push(vec![f.to_string()]);
    }
    let predicted: Vec<BigInt> =
        groupring::predicted_torsion(r).into_iter().filter(|&x| x > 1).map(BigInt::from).collect();
    rep.result("torsion_factors", ints(&t.factors));
    rep.result("torsion_order", int(&t.order()));
    rep.result("free_rank", json!(t.free_rank));
    rep.check("torsion_factors", t.factors == predicted, json!({ "got": ints(&t.factors), "predicted": ints(&predicted) }));
    let r3 = BigInt::from(r).pow(3);
    rep.check("torsion_order", t.order() == r3, json!({ "order": int(&t.order()), "expected": int(&r3) }));
    let fr = ((r - 1) * (d - 2)) as usize;
    rep.check("free_rank", t.free_rank == fr, json!({ "free_rank": t.free_rank, "expected": fr }));
    rep.verified("torsion_identities", groupring::check_torsion_identities(d, r), |b| json!(b));
    Ok(table)
}

fn descent_section(rep: &mut Report, ip: &InstanceParams, opts: &Options) -> Result<Table, UsageError> {
    let inst = descent_instance(ip, opts)?;
    let mut table = Table::new(&["element", "pr"]);
    let pr = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    rep.result("zeta_d", json!(inst.zeta_d));
    let mut rows = Vec::new();
    for i in 0..inst.d as i64 {
        match points_descent::xt_image(&inst, DescentArg::Point(i, 0)) {
            Ok(img) => {
                let v = points_descent::pr_projection(&inst, &img);
                table.push(vec![format!("P_{i},0"), pr(&v)]);
                rows.push(json!(v));
            }
            Err(e) => rep.check("explicit_points", false, json!({ "error": e.to_string() })),
        }
    }
    rep.result("pr_matrix", json!(rows));
    for (name, arg) in [("Q_1", DescentArg::Q1), ("Q_2", DescentArg::Q2)] {
        if let Some(img) = rep.verified(&format!("image_{name}"), points_descent::xt_image(&inst, arg), |_| json!(true)) {
            let v = points_descent::pr_projection(&inst, &img);
            table.push(vec![name.into(), pr(&v)]);
            rep.result(&format!("pr_{name}"), json!(v));
            rep.check(&format!("norm_relation_{name}"), points_descent::norm_relation_holds(&inst, &img), json!(null));
        }
    }
    let norms = (0..inst.d as i64).all(|i| {
        points_descent::xt_image(&inst, DescentArg::Point(i, 0))
            .is_ok_and(|img| points_descent::norm_relation_holds(&inst, &img))
    });
    rep.check("norm_relation_points", norms, json!(null));
    rep.verified("vanishing", points_descent::vanishing_checks(&inst), |b| json!(b));
    rep.verified("torsion_consistency", points_descent::torsion_consistency(&inst), |b| json!(b));
    if numth::is_prime(inst.r as u64) && inst.r > 2 {
        if let Some(b) = rep.verified("descent_certificates", points_descent::descent_rank_bound(&inst), |b| {
            json!({ "pr_matrix_rank": b.pr_matrix_rank, "torsion_rank": b.torsion_rank })
        }) {
            rep.result(
                "rank",
                json!({ "over_zeta_r": b.rank_over_zeta, "over_z": b.z_rank, "conditional": b.conditional }),
            );
        }
    } else {
        rep.result("rank", json!({ "skipped": "regime: requires r an odd prime" }));
    }
    Ok(table)
}

fn bsd_section(rep: &mut Report, ip: &InstanceParams, opts: &Options) -> Result<Table, UsageError> {
    let (p, q) = (ip.need_p()?, ip.need_q()?);
    let (r, d) = need_rd(ip)?;
    let nu = ip.need_nu()?;
    ip.need_d_divides_q_minus_1()?;
    let mut table = Table::new(&["place", "c_v", "d_v", "a_v", "m_v", "g_v"]);
    let mut local = Vec::new();
    for place in Place::ALL {
        if let Some(l) = rep.verified(&format!("local_{}", place.label()), bsdinv::local_data(d, r, place), |_| json!(true)) {
            let dv = l.d_v.as_ref().map(int).unwrap_or(Value::Null);
            local.push(json!({
                "place": place.label(), "c_v": l.c_v, "d_v": dv, "a_v": l.a_v, "m_v": l.m_v, "g_v": l.g_v,
            }));
            let dvs = l.d_v.map(|x| x.to_string()).unwrap_or_default();
            table.push(vec![
                place.label().into(),
                l.c_v.to_string(),
                dvs,
                l.a_v.to_string(),
                l.m_v.to_string(),
                l.g_v.to_string(),
            ]);
        }
    }
    rep.result("local_data", json!(local));
    if let Some(c) = rep.verified("conductor_degree", bsdinv::conductor_degree_check(d, r), |c| json!(c)) {
        rep.result("conductor_degree", json!(c));
    }
    if let Some(t) = rep.verified("tamagawa", bsdinv::tamagawa(q, d, r), rat) {
        rep.result("tamagawa", rat(&t));
    }
    if let Some(x) = rep.verified("integrality", bsdinv::integrality_quantity(d, r), int) {
        rep.result("integrality_quantity", int(&x));
    }
    if let Some(s) = rep.verified("sha_ratio", bsdinv::sha_index_ratio(p, nu, q, d, r), rat) {
        rep.result("sha_index_ratio", rat(&s));
    }
    if let Some(b) = rep.verified("bsd_identity", bsdinv::bsd_consistency(p, nu, q, d, r, &opts.fields), |b| rat(&b.value)) {
        rep.result(
            "bsd",
            json!({
                "L": lpoly_json(&b.l),
                "rank": b.rank,
                "leading": rat(&b.leading),
                "det_v_mod_torsion": rat(&b.det_v),
                "tamagawa": rat(&b.tamagawa),
                "torsion_order": int(&b.torsion_order),
                "sha_over_index_squared": rat(&b.value),
                "log_q_units": "L* and R in units of (log q)^rank",
            }),
        );
    }
    if let Some(c) = rep.verified("cartier_ordinary", bsdinv::cartier_matrix(p, r), |c| json!(c.len())) {
        let rows: Vec<Value> =
            c.iter().map(|e| json!({ "i": e.i, "a": e.a, "b": e.b, "c": e.c })).collect();
        rep.result("cartier", json!(rows));
    }
    Ok(table)
}

fn monodromy_section(rep: &mut Report, ip: &InstanceParams, _: &Options) -> Result<Table, UsageError> {
    let (r, ell) = (ip.need_r()? as u64, ip.need_ell()?);
    if r % ell == 0 {
        return Err(UsageError(format!("regime: requires ℓ ∤ r (ℓ = {ell}, r = {r})")));
    }
    let mut table = Table::new(&["level", "residue_degree", "plus_residue_degree", "split_type", "count", "plus_count"]);
    if let Some(ls) = rep.verified("degree_bookkeeping", monodromy::lambda_decomposition(r, ell), |_| json!(true)) {
        let mut rows = Vec::new();
        for l in &ls {
            let split = match l.split_type {
                Some(SplitType::Inert) => "inert",
                Some(SplitType::Split) => "split",
                None => "",
            };
            rows.push(json!({
                "level": l.level,
                "residue_degree": l.residue_degree,
                "plus_residue_degree": l.plus_residue_degree,
                "split_type": if split.is_empty() { Value::Null } else { json!(split) },
                "count": l.count,
                "plus_count": l.plus_count,
            }));
            table.push(vec![
                l.level.to_string(),
                l.residue_degree.to_string(),
                l.plus_residue_degree.to_string(),
                split.into(),
                l.count.to_string(),
                l.plus_count.to_string(),
            ]);
            let consistent = match l.split_type {
                Some(SplitType::Inert) => l.residue_degree == 2 * l.plus_residue_degree,
                Some(SplitType::Split) => l.residue_degree == l.plus_residue_degree,
                None => true,
            };
            rep.check(&format!("split_trichotomy_level_{}", l.level), consistent, json!(null));
        }
        rep.result("lambda", json!(rows));
    }
    if r % 3 != 0 {
        if let Some(c) = rep.verified("flambda_f3", monodromy::flambda_f3_count(r), |c| json!(c)) {
            rep.result("flambda_f3_count", json!(c));
        }
    }
    if let Some(m) = rep.verified("monodromy", monodromy::predicted_monodromy(r, ell), |m| int(&m.order)) {
        let factors: Vec<Value> = m
            .factors
            .iter()
            .map(|f| json!({ "label": f.label, "level": f.level, "order": int(&f.order) }))
            .collect();
        rep.result(
            "monodromy",
            json!({ "structure": m.structure, "order": int(&m.order), "factors": factors, "untwisted": m.untwisted }),
        );
    }
    let mut vanish = serde_json::Map::new();
    for (name, ext) in [("abelian", Extension::Abelian), ("solvable", Extension::Solvable)] {
        if let Ok(t) = monodromy::torsion_vanishing(r, ell, ext) {
            vanish.insert(name.into(), json!({ "asserted": t.asserted, "refined": t.refined }));
        }
    }
    rep.result("torsion_vanishing", Value::Object(vanish));
    if let Some(dims) = rep.verified("new_part_dimensions", monodromy::new_part_dimensions(r), |_| json!(true)) {
        let m: serde_json::Map<String, Value> = dims.iter().map(|(s, v)| (s.to_string(), json!(v))).collect();
        rep.result("new_part_dimensions", Value::Object(m));
    }
    Ok(table)
}
