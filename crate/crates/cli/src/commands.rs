//! Command implementations. Each returns a JSON result and, where a table
//! makes sense, CSV rows.

use chainscope_core::chain::{
    chain_class, chain_components, chain_continuity_check, chain_stable_check, classify_components,
    is_mixing_at_scale, ChainDecomposition, ComponentClass,
};
use chainscope_core::constructions::chains::{hexpansiveness_probe, HStarCheck, HexpEvidence, HexpGrid, HexpReport};
use chainscope_core::constructions::{lemma41_probe, qc_family, PairSearch};
use chainscope_core::entropy::{
    chain_entropy_estimate, entropy_estimate, entropy_point_test, gamma_set, CountLimits, EntropyReport, Horizon,
    PointClass,
};
use chainscope_core::pairs::classify_pair;
use chainscope_core::shadowing::{shadowing_check, Scope, ShadowingVerdict};
use chainscope_core::symbolic::{Sided, SymbolicPoint, SymbolicSystem};
use chainscope_core::{Dyadic, FiniteSystem, NodeSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::builders;
use crate::config::{Command, Grid, RunConfig, Source};
use crate::error::{CliError, Result};
use crate::format;

pub struct Output {
    pub result: Value,
    pub csv: Option<String>,
}

fn sc(d: Dyadic) -> Value {
    json!([d.numerator(), d.exponent()])
}

fn csv_scalar(d: Dyadic) -> String {
    format!("{}/2^{}", d.numerator(), d.exponent())
}

fn limits(cfg: &RunConfig) -> CountLimits {
    CountLimits { exact_cap: cfg.exact_cap, walk_cap: cfg.cap, ..CountLimits::default() }
}

fn system(cfg: &RunConfig) -> Result<FiniteSystem> {
    match &cfg.source {
        Source::File(path) => format::read_system(std::path::Path::new(path)),
        Source::Builder { name, params } => builders::build(name, params, cfg.cap),
        Source::Default { .. } => {
            Err(CliError::Config(format!("{:?} needs --system or --builder", cfg.command).to_lowercase()))
        }
    }
}

/// Builder parameters for the example commands.
fn example_params(cfg: &RunConfig, name: &str) -> Result<Value> {
    match &cfg.source {
        Source::Default { params } => Ok(params.clone()),
        Source::Builder { name: n, params } if n == name => Ok(params.clone()),
        _ => Err(CliError::Config(format!("this command builds its own system; use --builder {name} or omit it"))),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output> {
    cfg.check()?;
    match cfg.command {
        Command::Components => components(cfg, &system(cfg)?),
        Command::Entropy => entropy(cfg, &system(cfg)?),
        Command::Shadowing => shadowing(cfg, &system(cfg)?),
        Command::Pairs => pairs(cfg, &system(cfg)?),
        Command::Hexp => hexp(cfg, &system(cfg)?),
        Command::Example31 => example31_suite(cfg),
        Command::Example41 => example41_suite(cfg),
        Command::Odometer => odometer_suite(cfg),
        Command::Export => {
            let sys = match &cfg.source {
                Source::Default { .. } => return Err(CliError::Config("export needs --system or --builder".into())),
                _ => system(cfg)?,
            };
            Ok(Output { result: serde_json::to_value(format::SystemFile::from_system(&sys))?, csv: None })
        }
    }
}

/// Report text: the result wrapped with the tool version and config, or
/// CSV when requested and available.
pub fn render(cfg: &RunConfig, out: &Output) -> Result<String> {
    if cfg.format == crate::config::Format::Csv {
        return out.csv.clone().ok_or_else(|| CliError::Config("this command has no CSV form".into()));
    }
    if cfg.command == Command::Export {
        return Ok(serde_json::to_string(&out.result)? + "\n");
    }
    let report = json!({
        "tool": "chainscope",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "result": out.result,
    });
    Ok(serde_json::to_string_pretty(&report)? + "\n")
}

fn strictly_decreasing(mut v: Vec<Dyadic>) -> Vec<Dyadic> {
    v.sort_by(|a, b| b.cmp(a));
    v.dedup();
    v
}

fn decomposition_json(dec: &ChainDecomposition) -> Value {
    let comps: Vec<Value> = dec
        .components
        .iter()
        .map(|c| {
            let (class, eps, witness) = match &c.class {
                None => (Value::Null, Value::Null, Value::Null),
                Some(ComponentClass::OLike) => (json!("O"), Value::Null, Value::Null),
                Some(ComponentClass::NoLike { eps, witness }) => (
                    json!("NO"),
                    sc(*eps),
                    json!({"x": witness.x, "step": witness.step, "pair": [witness.pair.0, witness.pair.1]}),
                ),
            };
            json!({"nodes": c.nodes, "class": class, "eps": eps, "witness": witness})
        })
        .collect();
    json!({"delta": sc(dec.delta), "recurrent": dec.recurrent, "components": comps})
}

pub fn components(cfg: &RunConfig, sys: &FiniteSystem) -> Result<Output> {
    let deltas = cfg.grid.delta_or(&[Dyadic::pow2_neg(4)])?;
    let eps = strictly_decreasing(cfg.grid.eps.iter().map(|s| s.get()).collect::<Result<_>>()?);
    let mut cells = Vec::new();
    let mut csv = String::from("delta,component,size,class\n");
    for &d in &deltas {
        let mut dec = chain_components(sys, d);
        if !eps.is_empty() {
            dec = classify_components(sys, &dec, &eps, &strictly_decreasing(deltas.clone()))?;
        }
        for (i, c) in dec.components.iter().enumerate() {
            let class = match &c.class {
                None => "",
                Some(ComponentClass::OLike) => "O",
                Some(ComponentClass::NoLike { .. }) => "NO",
            };
            csv.push_str(&format!("{},{i},{},{class}\n", csv_scalar(d), c.nodes.len()));
        }
        cells.push(decomposition_json(&dec));
    }
    Ok(Output { result: json!({"size": sys.size(), "cells": cells}), csv: Some(csv) })
}

fn entropy_json(kind: &str, rep: &EntropyReport) -> Value {
    let counts: Vec<Value> = rep
        .counts
        .iter()
        .map(|c| json!({"n": c.n, "count": c.count, "exact": c.exact, "walks": c.walks}))
        .collect();
    json!({
        "kind": kind,
        "r": sc(rep.r),
        "delta": rep.delta.map(sc),
        "rate": rep.rate,
        "window_rate": rep.window_rate,
        "fitted": rep.fitted,
        "exact": rep.exact,
        "counts": counts,
    })
}

fn entropy_csv(kind: &str, rep: &EntropyReport, csv: &mut String) {
    let delta = rep.delta.map(csv_scalar).unwrap_or_default();
    for c in &rep.counts {
        csv.push_str(&format!(
            "{kind},{},{delta},{},{},{},{}\n",
            csv_scalar(rep.r),
            c.n,
            c.count,
            (c.count.max(1) as f64).ln(),
            c.exact
        ));
    }
}

pub fn entropy(cfg: &RunConfig, sys: &FiniteSystem) -> Result<Output> {
    let k = if cfg.grid.points.is_empty() {
        NodeSet::full(sys.size())
    } else {
        for &p in &cfg.grid.points {
            sys.check_index(p)?;
        }
        NodeSet::from_indices(sys.size(), cfg.grid.points.iter().copied())
    };
    let window = cfg.grid.n_or(1..=6);
    let deltas: Vec<Dyadic> = cfg.grid.delta.iter().map(|s| s.get()).collect::<Result<_>>()?;
    let lim = limits(cfg);
    let mut cells = Vec::new();
    let mut csv = String::from("kind,r,delta,n,count,log_count,exact\n");
    for r in cfg.grid.r_or(&[Dyadic::new(1, 1)])? {
        let rep = entropy_estimate(sys, &k, r, &window, &lim)?;
        entropy_csv("orbit", &rep, &mut csv);
        cells.push(entropy_json("orbit", &rep));
        for &d in &deltas {
            let rep = chain_entropy_estimate(sys, Some(&k), r, d, &window, &lim)?;
            entropy_csv("chain", &rep, &mut csv);
            cells.push(entropy_json("chain", &rep));
        }
    }
    Ok(Output { result: json!({"size": sys.size(), "window": window, "cells": cells}), csv: Some(csv) })
}

fn verdict_json(v: &ShadowingVerdict) -> Value {
    json!({
        "eps": sc(v.eps),
        "delta": sc(v.delta),
        "scope": v.scope.name(),
        "horizon": v.horizon,
        "holds": v.holds,
        "counterexample": v.counterexample,
        "states": v.states,
    })
}

pub fn shadowing(cfg: &RunConfig, sys: &FiniteSystem) -> Result<Output> {
    let scopes: Vec<Scope> = if cfg.grid.points.is_empty() {
        vec![Scope::All]
    } else {
        cfg.grid.points.iter().map(|&p| Scope::FromPoint(p)).collect()
    };
    let mut cells = Vec::new();
    let mut csv = String::from("eps,delta,scope,start,holds,states\n");
    for eps in cfg.grid.eps_or(&[Dyadic::pow2_neg(2)])? {
        for delta in cfg.grid.delta_or(&[Dyadic::pow2_neg(4)])? {
            for scope in &scopes {
                let v = shadowing_check(sys, eps, delta, scope.clone(), cfg.grid.horizon, cfg.cap)?;
                let start = match scope {
                    Scope::FromPoint(p) => p.to_string(),
                    _ => String::new(),
                };
                csv.push_str(&format!(
                    "{},{},{},{start},{},{}\n",
                    csv_scalar(eps),
                    csv_scalar(delta),
                    scope.name(),
                    v.holds,
                    v.states
                ));
                let mut j = verdict_json(&v);
                if let Scope::FromPoint(p) = scope {
                    j["start"] = json!(p);
                }
                cells.push(j);
            }
        }
    }
    Ok(Output { result: json!({"size": sys.size(), "cells": cells}), csv: Some(csv) })
}

fn default_s_lo(sys: &FiniteSystem) -> Dyadic {
    sys.resolution().or_else(|| sys.min_positive_distance()).unwrap_or(Dyadic::pow2_neg(6))
}

pub fn pairs(cfg: &RunConfig, sys: &FiniteSystem) -> Result<Output> {
    let pool: Vec<(usize, usize)> = if cfg.grid.pairs.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = sys.size();
        (0..cfg.grid.pool.unwrap_or(32)).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    } else {
        cfg.grid.pairs.clone()
    };
    let horizon = cfg.grid.horizon.unwrap_or(64);
    let (s_lo, s_hi) = (default_s_lo(sys), Dyadic::new(1, 1).max(default_s_lo(sys)));
    let mut cells = Vec::new();
    let mut csv = String::from("x,y,class,exact,liminf,limsup\n");
    for (x, y) in pool {
        let v = classify_pair(sys, x, y, horizon, s_lo, s_hi)?;
        csv.push_str(&format!(
            "{x},{y},{},{},{},{}\n",
            v.class.name(),
            v.exact,
            csv_scalar(v.liminf),
            csv_scalar(v.limsup)
        ));
        cells.push(json!({
            "pair": [x, y],
            "class": v.class.name(),
            "exact": v.exact,
            "liminf": sc(v.liminf),
            "limsup": sc(v.limsup),
        }));
    }
    Ok(Output {
        result: json!({"size": sys.size(), "thresholds": [sc(s_lo), sc(s_hi)], "horizon": horizon, "cells": cells}),
        csv: Some(csv),
    })
}

fn search_json(o: &PairSearch) -> Value {
    match o {
        PairSearch::Found(p) => json!({
            "outcome": "found",
            "steps": p.steps(),
            "separation": sc(p.separation),
            "xs": p.xs,
            "ys": p.ys,
        }),
        PairSearch::Absent { states } => json!({"outcome": "absent", "states": states}),
        PairSearch::Inconclusive { states, reason } => {
            json!({"outcome": "inconclusive", "states": states, "reason": reason})
        }
    }
}

fn hexp_json(rep: &HexpReport) -> Value {
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|row| {
            let evidence = match &row.evidence {
                HexpEvidence::NotHExpansive { r, pairs } => {
                    json!({"kind": "not_h_expansive", "r": sc(*r), "pairs": pairs.len()})
                }
                HexpEvidence::HExpansive { certificates } => json!({
                    "kind": "h_expansive",
                    "certificates": certificates.iter().map(|&(r, d)| json!([sc(r), sc(d)])).collect::<Vec<_>>(),
                }),
                HexpEvidence::Inconclusive => json!({"kind": "inconclusive"}),
            };
            let searches: Vec<Value> = row
                .searches
                .iter()
                .map(|s| json!({"r": sc(s.r), "delta": sc(s.delta), "search": search_json(&s.outcome)}))
                .collect();
            json!({
                "eps": sc(row.eps),
                "evidence": evidence,
                "searches": searches,
                "scrambled": row.scrambled.as_ref().map(|w| json!({"xs": w.xs, "ys": w.ys})),
                "h_star": row.h_star,
            })
        })
        .collect();
    json!({
        "transitive_delta": sc(rep.transitive_delta),
        "shadowing": [sc(rep.shadowing.0), sc(rep.shadowing.1)],
        "rows": rows,
    })
}

fn hexp_grid_defaults(grid: &Grid) -> Result<(Vec<Dyadic>, Vec<Dyadic>, Vec<Dyadic>)> {
    let eps = grid.eps_or(&[Dyadic::new(1, 1), Dyadic::pow2_neg(3)])?;
    let r = grid.r_or(&[Dyadic::new(1, 1), Dyadic::pow2_neg(2), Dyadic::pow2_neg(3)])?;
    let mut deltas = grid.delta_or(&[Dyadic::pow2_neg(6), Dyadic::pow2_neg(5)])?;
    deltas.sort();
    Ok((eps, r, deltas))
}

fn run_hexp(cfg: &RunConfig, sys: &FiniteSystem) -> Result<HexpReport> {
    let (eps, r, deltas) = hexp_grid_defaults(&cfg.grid)?;
    let window = cfg.grid.n.clone();
    let h_star = (!window.is_empty()).then(|| HStarCheck {
        window: &window,
        r_schedule: &r,
        centers: (!cfg.grid.points.is_empty()).then_some(&cfg.grid.points[..]),
        limits: limits(cfg),
    });
    let grid = HexpGrid {
        eps_schedule: &eps,
        r_grid: &r,
        delta_schedule: &deltas,
        length_bound: cfg.grid.length_bound.unwrap_or(64),
        cap: cfg.cap,
        h_star,
    };
    Ok(hexpansiveness_probe(sys, &grid)?)
}

pub fn hexp(cfg: &RunConfig, sys: &FiniteSystem) -> Result<Output> {
    let rep = run_hexp(cfg, sys)?;
    let mut csv = String::from("eps,r,delta,outcome\n");
    for row in &rep.rows {
        for s in &row.searches {
            let o = match &s.outcome {
                PairSearch::Found(_) => "found",
                PairSearch::Absent { .. } => "absent",
                PairSearch::Inconclusive { .. } => "inconclusive",
            };
            csv.push_str(&format!("{},{},{},{o}\n", csv_scalar(row.eps), csv_scalar(s.r), csv_scalar(s.delta)));
        }
    }
    Ok(Output { result: hexp_json(&rep), csv: Some(csv) })
}

/// One named property check of a reproduction suite.
struct Block {
    name: &'static str,
    pass: bool,
    detail: Value,
}

fn suite_output(params: Value, blocks: Vec<Block>) -> Output {
    let mut csv = String::from("block,pass\n");
    for b in &blocks {
        csv.push_str(&format!("{},{}\n", b.name, b.pass));
    }
    let pass = blocks.iter().all(|b| b.pass);
    let blocks: Vec<Value> =
        blocks.into_iter().map(|b| json!({"name": b.name, "pass": b.pass, "detail": b.detail})).collect();
    Output { result: json!({"params": params, "pass": pass, "blocks": blocks}), csv: Some(csv) }
}

pub fn example31_suite(cfg: &RunConfig) -> Result<Output> {
    let (p, e) = builders::build_example31(&example_params(cfg, "example31")?, cfg.cap)?;
    let sys = &e.compiled.system;
    let lim = limits(cfg);
    let fine = e.s.last().map_or(Dyadic::pow2_neg(13), |s| s.shr(p.depth + 1));
    let class_delta = cfg.grid.delta_or(&[fine])?[0];
    let mut blocks = Vec::new();

    let dec = chain_components(sys, class_delta);
    let mut got: Vec<Vec<usize>> = dec.components.iter().map(|c| c.nodes.clone()).collect();
    let mut want: Vec<Vec<usize>> = e.levels.iter().map(NodeSet::to_vec).collect();
    got.sort();
    want.sort();
    blocks.push(Block {
        name: "components",
        pass: got == want,
        detail: json!({
            "delta": sc(class_delta),
            "sizes": dec.components.iter().map(|c| c.nodes.len()).collect::<Vec<_>>(),
            "level_sizes": e.levels.iter().map(NodeSet::count).collect::<Vec<_>>(),
        }),
    });

    let eps = cfg.grid.eps_or(&[Dyadic::new(1, 1), Dyadic::pow2_neg(3)])?;
    let schedule = [Dyadic::pow2_neg(9), Dyadic::pow2_neg(11), class_delta.min(Dyadic::pow2_neg(12))];
    let mut granted = Vec::new();
    for &ep in &eps {
        let v = chain_stable_check(sys, &e.levels[0], ep, &schedule)?;
        granted.push(json!([sc(ep), v.granted.map(sc)]));
    }
    blocks.push(Block {
        name: "zero_level_chain_stable",
        pass: granted.iter().all(|g| !g[1].is_null()),
        detail: json!({"granted": granted}),
    });

    let class = chain_class(sys, class_delta, e.x)?;
    let mut want = e.levels[0].clone();
    let mut v = e.x;
    while want.insert(v) {
        v = sys.image(v);
    }
    blocks.push(Block {
        name: "class_of_marked_point",
        pass: class == want,
        detail: json!({"class": class.to_vec()}),
    });

    let balls = cfg.grid.balls_or(&[Dyadic::pow2_neg(9), Dyadic::pow2_neg(11)])?;
    let window = cfg.grid.n_or(2..=6);
    let threshold = cfg.grid.threshold.unwrap_or(0.05);
    let r_x = e.s[0].half();
    let px = entropy_point_test(sys, e.x, r_x, 0.0, &balls, &window, threshold, &lim)?;
    blocks.push(Block {
        name: "marked_point_not_entropy_point",
        pass: px.class == PointClass::Negative,
        detail: json!({
            "r": sc(r_x),
            "rates": px.evidence.iter().map(|(rho, rep)| json!([sc(*rho), rep.rate, rep.exact])).collect::<Vec<_>>(),
        }),
    });

    let r_k = cfg.grid.r_or(&[fine])?[0];
    let floor = core::f64::consts::LN_2 - 0.1;
    let mut levels = Vec::new();
    let mut all = true;
    for (k, &xk) in e.xs.iter().enumerate() {
        let pk = entropy_point_test(sys, xk, r_k, 0.0, &balls, &window, threshold, &lim)?;
        let cl = chain_class(sys, class_delta, xk)?;
        let rep = entropy_estimate(sys, &cl, r_k, &window, &lim)?;
        let ok = pk.class != PointClass::Negative && rep.rate >= floor;
        all &= ok;
        levels.push(json!({
            "k": k + 1,
            "point_class": format!("{:?}", pk.class).to_lowercase(),
            "class_rate": rep.rate,
            "class_exact": rep.exact,
            "pass": ok,
        }));
    }
    blocks.push(Block { name: "level_points_entropy", pass: all, detail: json!({"r": sc(r_k), "levels": levels}) });
    Ok(suite_output(serde_json::to_value(&p)?, blocks))
}

fn asymptotic_pool(rng: &mut ChaCha8Rng, size: usize) -> Vec<(SymbolicPoint, SymbolicPoint)> {
    let word = |rng: &mut ChaCha8Rng, lo: usize, hi: usize| -> Vec<u8> {
        let n = rng.gen_range(lo..=hi);
        (0..n).map(|_| rng.gen_range(0..2)).collect()
    };
    (0..size)
        .map(|_| {
            let left = word(rng, 1, 3);
            let right = word(rng, 1, 5);
            let a = word(rng, 1, 6);
            let mut b = a.clone();
            let k = rng.gen_range(0..a.len());
            b[k] ^= 1;
            (
                SymbolicPoint::two_sided(left.clone(), a, -2, right.clone()).expect("nonempty periods"),
                SymbolicPoint::two_sided(left, b, -2, right).expect("nonempty periods"),
            )
        })
        .collect()
}

pub fn example41_suite(cfg: &RunConfig) -> Result<Output> {
    let (p, t) = builders::build_example41(&example_params(cfg, "example41")?, cfg.cap)?;
    let sys = &t.system;
    let mut blocks = Vec::new();

    let (level, f) = t.level_system()?;
    let space = SymbolicSystem::binary_full_shift(Sided::Two);
    let mut fibers = vec![Vec::new(); level.size()];
    for (w, &x) in f.iter().enumerate() {
        fibers[x].push(w);
    }
    let mut ok = true;
    for (x, fib) in fibers.iter().enumerate() {
        if !fib.is_empty() {
            ok &= fib.len() == 2 && level.dist(fib[0], fib[1]) == Dyadic::ONE;
        }
        let word: Vec<u8> = (0..t.period()).map(|q| ((x >> q) & 1) as u8).collect();
        let xp = SymbolicPoint::periodic(word)?;
        let lifts = t.factor.fiber(&xp)?;
        ok &= lifts.len() == 2
            && lifts.iter().all(|y| t.factor.forward(y).same_point(&xp))
            && space.metric(&lifts[0], &lifts[1])? == Dyadic::ONE;
    }
    blocks.push(Block { name: "fibers", pass: ok, detail: json!({"words": level.size()}) });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pool = asymptotic_pool(&mut rng, cfg.grid.pool.unwrap_or(500));
    let from = t.depth.saturating_sub(1);
    let rep = lemma41_probe(&t, from, &pool, 64, t.resolution(), Dyadic::new(1, 1))?;
    let lift_ok = rep.lift_classes.keys().all(|k| *k == "asymptotic" || *k == "distal");
    blocks.push(Block {
        name: "asymptotic_lifts",
        pass: lift_ok && !rep.pattern_found(),
        detail: json!({"examined": rep.examined, "classes": rep.lift_classes, "scrambled": rep.found.len()}),
    });

    let qs: Vec<usize> = if cfg.grid.points.is_empty() {
        (0..8).map(|_| rng.gen_range(0..t.size())).collect()
    } else {
        cfg.grid.points.clone()
    };
    let mut counts = Vec::new();
    let mut ok = true;
    for &q in &qs {
        for n in 1..t.depth {
            let eps = Dyadic::pow2_neg(n as u32 + 1);
            let fam = qc_family(&t, q, n, eps)?;
            let g = gamma_set(sys, q, eps, Horizon::Closure)?;
            let good = fam.count() == 1 << (t.depth - n) && g.points.to_vec() == fam.points;
            ok &= good;
            counts.push(json!({"q": q, "level": n, "count": fam.count(), "matches_gamma": good}));
        }
    }
    blocks.push(Block { name: "qc_family", pass: ok, detail: json!({"families": counts}) });

    let res = t.resolution();
    let lonely = (0..t.size()).filter(|&q| t.gamma_distance(q, t.top_flip(q)) > res).count();
    blocks.push(Block {
        name: "gamma_never_singleton",
        pass: lonely == 0,
        detail: json!({"points": t.size(), "resolution": sc(res), "singletons": lonely}),
    });

    let rep = run_hexp(cfg, sys)?;
    let found = rep.rows.iter().flat_map(|r| &r.searches).filter(|s| s.outcome.found().is_some()).count();
    let hexp = rep.rows.iter().all(|r| matches!(r.evidence, HexpEvidence::HExpansive { .. }));
    let detail = hexp_json(&rep);
    blocks.push(Block { name: "no_chain_pairs_above_resolution", pass: found == 0 && hexp, detail });

    let mixing = is_mixing_at_scale(sys, rep.transitive_delta);
    blocks.push(Block {
        name: "mixing_at_scale",
        pass: mixing,
        detail: json!({"delta": sc(rep.transitive_delta), "mixing": mixing}),
    });
    Ok(suite_output(serde_json::to_value(&p)?, blocks))
}

pub fn odometer_suite(cfg: &RunConfig) -> Result<Output> {
    let (p, sys) = builders::build_odometer(&example_params(cfg, "odometer")?, cfg.cap)?;
    let n = sys.size();
    let mut blocks = Vec::new();

    let inv = sys.inverse();
    blocks.push(Block { name: "bijection", pass: inv.is_some(), detail: json!({"size": n}) });
    let isometry = (0..n).all(|x| (0..n).all(|y| sys.dist(sys.image(x), sys.image(y)) == sys.dist(x, y)));
    blocks.push(Block { name: "isometry", pass: isometry, detail: Value::Null });

    let all = NodeSet::full(n);
    let window = cfg.grid.n_or(1..=8);
    let mut rates = Vec::new();
    let mut flat = true;
    for r in cfg.grid.r_or(&[Dyadic::new(1, 1), Dyadic::pow2_neg(5)])? {
        let rep = entropy_estimate(&sys, &all, r, &window, &limits(cfg))?;
        flat &= rep.counts.windows(2).all(|w| w[0].count == w[1].count);
        rates.push(entropy_json("orbit", &rep));
    }
    blocks.push(Block { name: "zero_entropy", pass: flat, detail: json!({"cells": rates}) });

    let eps = strictly_decreasing(cfg.grid.eps_or(&[Dyadic::new(1, 1), Dyadic::pow2_neg(3)])?);
    let deltas = strictly_decreasing(cfg.grid.delta_or(&[Dyadic::pow2_neg(5), Dyadic::pow2_neg(6)])?);
    let mut cells = Vec::new();
    let mut ok = true;
    for &e in &eps {
        let at = deltas.iter().find(|&&d| chain_continuity_check(&sys, &all, e, d).holds);
        ok &= at.is_some();
        cells.push(json!([sc(e), at.map(|&d| sc(d))]));
    }
    blocks.push(Block { name: "chain_continuity", pass: ok, detail: json!({"granted": cells}) });

    let finest = *deltas.last().expect("nonempty schedule");
    let dec = classify_components(&sys, &chain_components(&sys, finest), &eps, &deltas)?;
    let o_like = dec.components.iter().all(|c| c.class == Some(ComponentClass::OLike));
    blocks.push(Block { name: "components_o_like", pass: o_like, detail: decomposition_json(&dec) });
    Ok(suite_output(serde_json::to_value(&p)?, blocks))
}
