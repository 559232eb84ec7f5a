//! Acceptance suite. Runs without the libtest harness so each criterion
//! prints exactly one PASS/FAIL line; the process fails if any line is FAIL.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bibranch::arborescence::min_arborescence;
use bibranch::bridge::{lp_cert_from_potential, potentials_from_lp_dual, tighten_potential};
use bibranch::exec::Exec;
use bibranch::graph::{Instance, Side};
use bibranch::lp::{comp_slack_check, dual_feasible, objectives, primal_feasible, solve_dual_integral, LpError, LpPrimal};
use bibranch::mconvex::{exchange_check, ExtValue};
use bibranch::msf::{self, check_optimal_potential, find_optimal_potential, solve_benders, Flow, Method, MsfError, Oracles};
use bibranch::testkit::{
    brute_min_arborescence, brute_min_bibranching, gen_instance, repartition_search, random_repartition_triple,
    random_rooted_digraph, GenConfig, RepartitionOutcome, TestkitError,
};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUITE1_INSTANCES: u64 = 520;
const SUITE1_MAX_SIDE: usize = 4;
const SUITE1_MAX_ARCS: usize = 14;
const SUITE1_WMAX: i64 = 8;
const SUITE1_BUDGET: Duration = Duration::from_secs(60);
const EXCHANGE_INSTANCES: u64 = 100;
const EXCHANGE_RADIUS: i64 = 2;
const ROOTED_INSTANCES: usize = 200;
const ROOTED_MAX_N: usize = 6;
const REPARTITION_TRIPLES: u64 = 200;
const REPARTITION_MAX_N: usize = 5;
const CLI_SEEDS: u64 = 12;

type Outcome = Result<String, String>;

fn suite1_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_97ed ^ seed);
    let cfg = GenConfig {
        seed,
        ns: rng.random_range(1..=SUITE1_MAX_SIDE),
        nt: rng.random_range(1..=SUITE1_MAX_SIDE),
        arcs: rng.random_range(1..=SUITE1_MAX_ARCS),
        wmax: SUITE1_WMAX,
        ..GenConfig::default()
    };
    gen_instance(&cfg).expect("valid generator config")
}

/// Per-instance results of the suite-1 pipeline, gathered once and shared by
/// several criteria.
struct Record {
    inst: Instance,
    /// None when infeasible.
    optimum: Option<i64>,
    oracle_mismatch: Option<String>,
    dual_problem: Option<String>,
    lp2msf_problem: Option<String>,
    sign_problem: Option<String>,
    tighten_problem: Option<String>,
    cert_problem: Option<String>,
    benders_problem: Option<String>,
}

fn run_suite1() -> (Vec<Record>, Duration) {
    let start = Instant::now();
    let records = (0..SUITE1_INSTANCES).map(|seed| run_instance(suite1_instance(seed))).collect();
    (records, start.elapsed())
}

fn run_instance(inst: Instance) -> Record {
    let mut rec = Record {
        optimum: None,
        oracle_mismatch: None,
        dual_problem: None,
        lp2msf_problem: None,
        sign_problem: None,
        tighten_problem: None,
        cert_problem: None,
        benders_problem: None,
        inst,
    };
    let inst = &rec.inst;
    let brute = match brute_min_bibranching(inst) {
        Ok(b) => Some(b),
        Err(TestkitError::Infeasible) => None,
        Err(e) => panic!("brute force failed: {e}"),
    };
    let value = |r: Result<msf::MsfSolution, MsfError>| match r {
        Ok(s) => Ok(Some(s.value)),
        Err(MsfError::Infeasible) => Ok(None),
        Err(e) => Err(e.to_string()),
    };
    let want = brute.as_ref().map(|b| b.value);
    let msf_brute = value(msf::solve_msf(inst, Method::Brute));
    let msf_benders = value(msf::solve_msf(inst, Method::Benders));
    let dual = solve_dual_integral(inst);
    let dual_value = match &dual {
        Ok(d) => Ok(Some(d.value)),
        Err(LpError::UnboundedDual) => Ok(None),
        Err(e) => Err(e.to_string()),
    };
    if msf_brute != Ok(want) || msf_benders != Ok(want) || dual_value != Ok(want) {
        rec.oracle_mismatch =
            Some(format!("brute {want:?}, msf {msf_brute:?}, benders {msf_benders:?}, dual {dual_value:?}"));
    }

    let oracles = Oracles::new(inst, Exec::Sequential).expect("desk-scale oracles");
    rec.benders_problem = benders_cut_problem(inst, &oracles);

    let Some(brute) = brute else { return rec };
    rec.optimum = Some(brute.value);
    let Ok(dual) = dual else {
        rec.dual_problem = Some("no integral dual".into());
        return rec;
    };
    if !dual.dual.is_integral() || dual.value != brute.value {
        rec.dual_problem = Some(format!("dual value {} vs primal {}", dual.value, brute.value));
    }

    let x = LpPrimal::indicator(&brute.arcs);
    let (flow, pot) = match potentials_from_lp_dual(inst, &x, &dual.dual) {
        Ok(fp) => fp,
        Err(e) => {
            rec.lp2msf_problem = Some(e.to_string());
            return rec;
        }
    };
    match check_optimal_potential(inst, &flow, &pot) {
        Ok(v) if v.is_optimal() => {}
        Ok(v) => rec.lp2msf_problem = Some(v.to_string()),
        Err(e) => rec.lp2msf_problem = Some(e.to_string()),
    }
    let found = find_optimal_potential(inst, &flow);
    let mut produced = vec![("lp2msf", pot.clone())];
    if let Ok(p) = &found {
        produced.push(("finder", p.clone()));
    } else if let Err(e) = &found {
        rec.sign_problem = Some(format!("finder failed: {e}"));
    }

    let bound = inst.cross_arcs().len();
    for (origin, start) in produced.clone() {
        let t = match tighten_potential(inst, &flow, &start) {
            Ok(t) => t,
            Err(e) => {
                rec.tighten_problem = Some(format!("{origin}: {e}"));
                continue;
            }
        };
        let slack = flow.arcs().iter().find(|&a| t.potential.reduced_cost(inst, a) != 0);
        let optimal = check_optimal_potential(inst, &flow, &t.potential).map(|v| v.is_optimal());
        if t.rounds > bound || slack.is_some() || optimal != Ok(true) {
            rec.tighten_problem = Some(format!("{origin}: rounds {} bound {bound}, slack {slack:?}", t.rounds));
        }
        produced.push(("tightened", t.potential.clone()));
        if let Err(e) = certificate_check(inst, &flow, &t.potential, brute.value) {
            rec.cert_problem = Some(format!("{origin}: {e}"));
        }
    }
    if let Some((origin, _)) = produced.iter().find(|(_, p)| !p.sign_facts_hold(inst, &flow)) {
        rec.sign_problem = Some(format!("{origin} potential breaks the sign facts"));
    }
    rec
}

fn certificate_check(inst: &Instance, flow: &Flow, pot: &msf::Potential, optimum: i64) -> Result<(), String> {
    let cert = lp_cert_from_potential(inst, flow, pot).map_err(|e| e.to_string())?;
    let err = |e: LpError| e.to_string();
    if let Some(v) = primal_feasible(inst, &cert.x).map_err(err)? {
        return Err(v.to_string());
    }
    if let Some(v) = dual_feasible(inst, &cert.dual).map_err(err)? {
        return Err(v.to_string());
    }
    if let Some(v) = comp_slack_check(inst, &cert.x, &cert.dual).map_err(err)? {
        return Err(v.to_string());
    }
    let (p, d) = objectives(inst, &cert.x, &cert.dual).map_err(err)?;
    let opt = BigRational::from_integer(optimum.into());
    if p != d || p != opt {
        return Err(format!("primal {p}, dual {d}, optimum {opt}"));
    }
    Ok(())
}

fn benders_cut_problem(inst: &Instance, oracles: &Oracles) -> Option<String> {
    let run = match solve_benders(inst) {
        Ok(r) => r,
        Err(MsfError::Infeasible) => return None,
        Err(e) => return Some(format!("benders did not finish: {e}")),
    };
    let k = inst.cross_arcs().len();
    let feasible: Vec<Flow> = (0..1u64 << k)
        .filter(|&m| oracles.objective_mask(m).is_finite())
        .map(|m| Flow::from_cross_mask(inst, m))
        .collect();
    for (cut, at) in &run.cuts {
        let table = if cut.side == Side::S { &oracles.g_s } else { &oracles.g_t };
        let h = |f: &Flow| {
            let eta = if cut.side == Side::S { f.eta_s(inst) } else { f.eta_t(inst) };
            table.value(&eta)
        };
        let tight = match cut.bound_at(at) {
            Some(b) => h(at) == ExtValue::Finite(b),
            None => !h(at).is_finite(),
        };
        if !tight {
            return Some(format!("{:?} cut not tight at its generating flow", cut.side));
        }
        for f in &feasible {
            let below = cut.bound_at(f).is_none_or(|b| ExtValue::Finite(b) <= h(f));
            if !cut.admits(f) || !below {
                return Some(format!("{:?} cut overestimates at flow {:?}", cut.side, f.arcs()));
            }
        }
    }
    None
}

fn first_problem(records: &[Record], pick: impl Fn(&Record) -> &Option<String>) -> Outcome {
    let feasible = records.iter().filter(|r| r.optimum.is_some()).count();
    match records.iter().enumerate().find_map(|(i, r)| pick(r).as_ref().map(|p| (i, p))) {
        Some((i, p)) => Err(format!("instance seed {i}: {p}")),
        None => Ok(format!("{feasible} feasible of {} instances", records.len())),
    }
}

fn criterion_exchange() -> Outcome {
    let mut checked = 0;
    for seed in 0..EXCHANGE_INSTANCES {
        let inst = suite1_instance(10_000 + seed);
        let oracles = Oracles::new(&inst, Exec::Parallel).map_err(|e| e.to_string())?;
        for table in [&oracles.g_s, &oracles.g_t] {
            let dim = table.ground().len();
            let found = exchange_check(|x| table.value_raw(x), dim, EXCHANGE_RADIUS, Exec::Parallel)
                .map_err(|e| e.to_string())?;
            if let Some(c) = found {
                return Err(format!("seed {}: eta {:?} zeta {:?} u {}", 10_000 + seed, c.eta, c.zeta, c.u));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} functions, zero counterexamples"))
}

fn criterion_edmonds() -> Outcome {
    let mut feasible = 0;
    let mut seed = 0u64;
    while feasible < ROOTED_INSTANCES {
        let ri = random_rooted_digraph(seed, ROOTED_MAX_N, 12, 9);
        let oracle = brute_min_arborescence(&ri);
        match (min_arborescence(&ri), oracle) {
            (Err(_), None) => {}
            (Ok(arb), Some(w)) => {
                feasible += 1;
                let g = &ri.graph;
                let min_entering = |v: usize| g.arcs().iter().filter(|a| a.head == v).map(|a| a.weight).min();
                let rho_ok = (0..g.n()).filter(|&v| v != ri.root).all(|v| Some(arb.dual.vertex[v]) == min_entering(v));
                if arb.weight != w
                    || arb.dual.first_violation(&ri).is_some()
                    || !arb.dual.is_laminar()
                    || arb.dual.objective() != w
                    || !rho_ok
                {
                    return Err(format!("seed {seed}: weight {} vs {w}, dual {:?}", arb.weight, arb.dual));
                }
            }
            (got, want) => return Err(format!("seed {seed}: solver {:?} vs enumeration {want:?}", got.map(|a| a.weight))),
        }
        seed += 1;
    }
    Ok(format!("{feasible} rooted digraphs ({seed} generated)"))
}

fn criterion_repartition() -> Outcome {
    for seed in 0..REPARTITION_TRIPLES {
        let (d, b1, b2, s) = random_repartition_triple(seed, REPARTITION_MAX_N);
        match repartition_search(&d, &b1, &b2, s) {
            Ok(RepartitionOutcome::Found { .. }) => {}
            Ok(RepartitionOutcome::NotFound) => return Err(format!("seed {seed}: no split found")),
            Err(e) => return Err(format!("seed {seed}: {e}")),
        }
    }
    Ok(format!("{REPARTITION_TRIPLES} triples"))
}

fn bibranch(args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bibranch")).args(args).output().map_err(|e| e.to_string())?;
    Ok(out.status.code().unwrap_or(-1))
}

fn criterion_cli() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut certified = 0;
    for seed in 0..CLI_SEEDS {
        let inst = p(&format!("g{seed}.txt"));
        let seed_s = seed.to_string();
        if bibranch(&["gen", "--seed", &seed_s, "--ns", "3", "--nt", "3", "--arcs", "9", "--wmax", "8", "-o", &inst])? != 0 {
            return Err(format!("seed {seed}: gen failed"));
        }
        for method in ["brute", "msf", "benders"] {
            let cert = p(&format!("g{seed}.{method}.json"));
            match bibranch(&["solve", "-i", &inst, "--method", method, "--certify", "-o", &cert])? {
                0 => {}
                2 => continue,
                c => return Err(format!("seed {seed}: solve --method {method} exited {c}")),
            }
            certified += 1;
            let first = read(&cert)?;
            if bibranch(&["solve", "-i", &inst, "--method", method, "--certify", "-o", &cert])? != 0 || read(&cert)? != first {
                return Err(format!("seed {seed}: {method} certificate not deterministic"));
            }
            if bibranch(&["verify", "-i", &inst, "-c", &cert])? != 0 {
                return Err(format!("seed {seed}: {method} certificate rejected"));
            }
            for dir in ["lp2msf", "msf2lp"] {
                let out = p(&format!("g{seed}.{method}.{dir}.json"));
                let code = bibranch(&["translate", "-i", &inst, "-c", &cert, "--direction", dir, "-o", &out])?;
                if code != 0 || bibranch(&["verify", "-i", &inst, "-c", &out])? != 0 {
                    return Err(format!("seed {seed}: translate {dir} of {method} certificate failed"));
                }
            }
        }
    }
    if certified == 0 {
        return Err("no feasible generated instance".into());
    }
    Ok(format!("{certified} certificates over {CLI_SEEDS} generated instances"))
}

fn read(path: impl AsRef<Path>) -> Result<Vec<u8>, String> {
    std::fs::read(path.as_ref()).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let (records, elapsed) = run_suite1();
    let within = |o: Outcome| match o {
        Ok(msg) if elapsed <= SUITE1_BUDGET => Ok(format!("{msg}, {:.1}s", elapsed.as_secs_f64())),
        Ok(_) => Err(format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), SUITE1_BUDGET.as_secs())),
        e => e,
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("oracle equivalence", within(first_problem(&records, |r| &r.oracle_mismatch))),
        ("integral dual optimum", first_problem(&records, |r| &r.dual_problem)),
        ("exchange property of g_S and g_T", criterion_exchange()),
        ("optimal potential from LP dual", first_problem(&records, |r| &r.lp2msf_problem)),
        ("potential sign facts", first_problem(&records, |r| &r.sign_problem)),
        ("tightening", first_problem(&records, |r| &r.tighten_problem)),
        ("LP certificate from potential", first_problem(&records, |r| &r.cert_problem)),
        ("arborescence primal and dual", criterion_edmonds()),
        ("branching repartition", criterion_repartition()),
        ("Benders cuts", first_problem(&records, |r| &r.benders_problem)),
        ("CLI round trip", criterion_cli()),
    ];
    let mut ok = true;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", i + 1),
            Err(msg) => {
                ok = false;
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
