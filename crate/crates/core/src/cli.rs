//! Command-line front end and the JSON certificate format.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::bridge::{lp_cert_from_potential, potentials_from_lp_dual, tighten_potential};
use crate::graph::text::{instance_digest, parse_instance, write_instance};
use crate::graph::{Instance, Side};
use crate::lp::{comp_slack_check, dual_feasible, objectives, primal_feasible, solve_dual_integral, LpDual, LpError, LpPrimal};
use crate::msf::{self, find_optimal_potential, Flow, MsfError, Oracles, Potential};
use crate::testkit::{brute_min_bibranching, gen_instance, GenConfig, TestkitError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "bibranch", version, about = "Shortest S-T bibranching solver and certificate checker")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMethod {
    /// Exhaustive search over arc subsets
    Brute,
    /// Exhaustive search over S-T flows
    Msf,
    /// Benders decomposition over S-T flows
    Benders,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Lp2msf,
    Msf2lp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance and optionally write a certificate
    Solve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        method: SolveMethod,
        #[arg(long)]
        certify: bool,
        /// Certificate path (default: <input>.cert.json)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check every section of a certificate against an instance
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        cert: PathBuf,
    },
    /// Derive the other certificate pair from the one present
    Translate {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        cert: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a seeded random instance
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        ns: usize,
        #[arg(long)]
        nt: usize,
        #[arg(long)]
        arcs: usize,
        #[arg(long)]
        wmax: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcValue {
    pub arc: usize,
    pub value: String,
}

/// x as an index list when it is 0-1, otherwise as (arc, value) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrimalSection {
    Support(Vec<usize>),
    Values(Vec<ArcValue>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetValue {
    pub subset: Vec<usize>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexValue {
    pub vertex: usize,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Meta {
    pub digest: String,
    pub producer: String,
    #[serde(default)]
    pub values: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primal_x: Option<PrimalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_y: Option<Vec<SetValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_z: Option<Vec<SetValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_xi: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_p: Option<Vec<VertexValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_q: Option<Vec<VertexValue>>,
    pub meta: Meta,
}

impl Certificate {
    pub fn new(inst: &Instance, producer: &str) -> Self {
        Certificate {
            meta: Meta { digest: format!("{:016x}", instance_digest(inst)), producer: producer.into(), values: BTreeMap::new() },
            ..Certificate::default()
        }
    }

    /// Pretty JSON with keys in sorted order and a trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("certificate serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> Result<Self, String> {
        serde_json::from_str(src).map_err(|e| format!("bad certificate: {e}"))
    }

    pub fn set_lp(&mut self, x: &LpPrimal, d: &LpDual) {
        self.primal_x = Some(match x.as_arc_set() {
            Some(b) => PrimalSection::Support(b.to_vec()),
            None => PrimalSection::Values(
                x.values()
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != BigRational::from_integer(0.into()))
                    .map(|(arc, v)| ArcValue { arc, value: v.to_string() })
                    .collect(),
            ),
        });
        let list = |m: &BTreeMap<Vec<usize>, BigRational>| {
            m.iter().map(|(k, v)| SetValue { subset: k.clone(), value: v.to_string() }).collect()
        };
        self.dual_y = Some(list(&d.y));
        self.dual_z = Some(list(&d.z));
    }

    pub fn set_msf(&mut self, flow: &Flow, pot: &Potential) {
        self.flow_xi = Some(flow.arcs().to_vec());
        let list = |v: &crate::graph::IntVecOnSet| v.iter().map(|(vertex, value)| VertexValue { vertex, value }).collect();
        self.potential_p = Some(list(&pot.p));
        self.potential_q = Some(list(&pot.q));
    }

    pub fn has_lp(&self) -> bool {
        self.primal_x.is_some() && (self.dual_y.is_some() || self.dual_z.is_some())
    }

    pub fn has_msf(&self) -> bool {
        self.flow_xi.is_some() && self.potential_p.is_some() && self.potential_q.is_some()
    }

    pub fn lp_primal(&self, inst: &Instance) -> Result<Option<LpPrimal>, String> {
        let Some(sec) = &self.primal_x else { return Ok(None) };
        let mut values = vec![BigRational::from_integer(0.into()); inst.m()];
        let mut put = |arc: usize, v: BigRational| {
            if arc >= inst.m() {
                return Err(format!("arc index {arc} out of range"));
            }
            values[arc] = v;
            Ok(())
        };
        match sec {
            PrimalSection::Support(idx) => {
                for &a in idx {
                    put(a, BigRational::from_integer(1.into()))?;
                }
            }
            PrimalSection::Values(pairs) => {
                for p in pairs {
                    put(p.arc, parse_rational(&p.value)?)?;
                }
            }
        }
        Ok(Some(LpPrimal::new(values)))
    }

    pub fn lp_dual(&self) -> Result<Option<LpDual>, String> {
        if self.dual_y.is_none() && self.dual_z.is_none() {
            return Ok(None);
        }
        let mut d = LpDual::default();
        for (side, list) in [(Side::S, &self.dual_y), (Side::T, &self.dual_z)] {
            for sv in list.iter().flatten() {
                d.add(side, sv.subset.clone(), parse_rational(&sv.value)?);
            }
        }
        Ok(Some(d))
    }

    pub fn msf_pair(&self, inst: &Instance) -> Result<Option<(Flow, Option<Potential>)>, String> {
        let Some(xi) = &self.flow_xi else { return Ok(None) };
        let flow = Flow::from_indices(inst, xi).map_err(|e| e.to_string())?;
        let pot = match (&self.potential_p, &self.potential_q) {
            (Some(p), Some(q)) => {
                let mut pot = Potential::zero(inst);
                for vv in p {
                    pot.p.try_get(vv.vertex).ok_or(format!("vertex {} is not in S", vv.vertex))?;
                    pot.p.set(vv.vertex, vv.value);
                }
                for vv in q {
                    pot.q.try_get(vv.vertex).ok_or(format!("vertex {} is not in T", vv.vertex))?;
                    pot.q.set(vv.vertex, vv.value);
                }
                Some(pot)
            }
            _ => None,
        };
        Ok(Some((flow, pot)))
    }
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    BigRational::from_str(s.trim()).map_err(|_| format!("bad rational `{s}`"))
}

/// Why a command failed, mapped to an exit code.
enum Failure {
    Verify(String),
    Infeasible(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => EXIT_VERIFY,
            Failure::Infeasible(_) => EXIT_INFEASIBLE,
            Failure::Input(_) => EXIT_INPUT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verify(m) | Failure::Infeasible(m) | Failure::Input(m) => m,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn input_err(e: impl ToString) -> Failure {
    Failure::Input(e.to_string())
}

fn verify_err(e: impl ToString) -> Failure {
    Failure::Verify(e.to_string())
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let src = fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    parse_instance(&src).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_certificate(path: &Path, inst: &Instance) -> Result<Certificate, Failure> {
    let src = fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let cert = Certificate::from_json(&src).map_err(input_err)?;
    let want = format!("{:016x}", instance_digest(inst));
    if cert.meta.digest != want {
        return Err(input_err(format!("instance digest mismatch: certificate has {}, instance is {want}", cert.meta.digest)));
    }
    Ok(cert)
}

fn write_file(path: &Path, content: &str) -> CmdResult {
    fs::write(path, content).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let res = match cli.cmd {
        Command::Solve { input, method, certify, output } => cmd_solve(&input, method, certify, output),
        Command::Verify { input, cert } => cmd_verify(&input, &cert),
        Command::Translate { input, cert, direction, output } => cmd_translate(&input, &cert, direction, &output),
        Command::Gen { seed, ns, nt, arcs, wmax, output } => cmd_gen(seed, ns, nt, arcs, wmax, output),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn cmd_solve(input: &Path, method: SolveMethod, certify: bool, output: Option<PathBuf>) -> CmdResult {
    let inst = load_instance(input)?;
    let value = match method {
        SolveMethod::Brute => match brute_min_bibranching(&inst) {
            Ok(b) => b.value,
            Err(TestkitError::Infeasible) => return Err(Failure::Infeasible("infeasible: no bibranching exists".into())),
            Err(e) => return Err(input_err(e)),
        },
        SolveMethod::Msf | SolveMethod::Benders => {
            let m = if method == SolveMethod::Msf { msf::Method::Brute } else { msf::Method::Benders };
            match msf::solve_msf(&inst, m) {
                Ok(s) => s.value,
                Err(MsfError::Infeasible) => return Err(Failure::Infeasible("infeasible: no bibranching exists".into())),
                Err(e) => return Err(input_err(e)),
            }
        }
    };
    println!("{value}");
    if !certify {
        return Ok(());
    }
    let producer = format!("bibranch {} solve --method {method:?}", env!("CARGO_PKG_VERSION")).to_lowercase();
    let cert = match method {
        SolveMethod::Brute => certify_lp_first(&inst, &producer)?,
        _ => certify_msf_first(&inst, &producer, method)?,
    };
    let path = output.unwrap_or_else(|| {
        let mut p = input.as_os_str().to_owned();
        p.push(".cert.json");
        PathBuf::from(p)
    });
    write_file(&path, &cert.to_json())
}

/// Brute-force primal and integral dual, then potentials read off the dual
/// and tightened.
fn certify_lp_first(inst: &Instance, producer: &str) -> Result<Certificate, Failure> {
    let primal = brute_min_bibranching(inst).map_err(verify_err)?;
    let dual = match solve_dual_integral(inst) {
        Ok(d) => d,
        Err(e @ LpError::TooLarge { .. }) => return Err(input_err(e)),
        Err(e) => return Err(verify_err(e)),
    };
    let x = LpPrimal::indicator(&primal.arcs);
    let (flow, pot) = potentials_from_lp_dual(inst, &x, &dual.dual).map_err(verify_err)?;
    let tight = tighten_potential(inst, &flow, &pot).map_err(verify_err)?;
    let mut cert = Certificate::new(inst, producer);
    cert.set_lp(&x, &dual.dual);
    cert.set_msf(&flow, &tight.potential);
    cert.meta.values.insert("primal".into(), primal.value.to_string());
    cert.meta.values.insert("dual".into(), dual.value.to_string());
    Ok(cert)
}

/// Optimal flow from the chosen solver, a potential for it, then the LP pair
/// built from the tightened potential.
fn certify_msf_first(inst: &Instance, producer: &str, method: SolveMethod) -> Result<Certificate, Failure> {
    let m = if method == SolveMethod::Msf { msf::Method::Brute } else { msf::Method::Benders };
    let sol = msf::solve_msf(inst, m).map_err(verify_err)?;
    let pot = match find_optimal_potential(inst, &sol.flow) {
        Ok(p) => p,
        Err(e @ MsfError::TooLarge { .. }) => return Err(input_err(e)),
        Err(e) => return Err(verify_err(e)),
    };
    let tight = tighten_potential(inst, &sol.flow, &pot).map_err(verify_err)?;
    let lp = lp_cert_from_potential(inst, &sol.flow, &tight.potential).map_err(verify_err)?;
    let mut cert = Certificate::new(inst, producer);
    cert.set_lp(&lp.x, &lp.dual);
    cert.set_msf(&sol.flow, &tight.potential);
    cert.meta.values.insert("msf".into(), sol.value.to_string());
    cert.meta.values.insert("primal".into(), lp.value.to_string());
    Ok(cert)
}

/// Verifies every section present; returns the first violation.
pub fn verify_certificate(inst: &Instance, cert: &Certificate) -> Result<(), String> {
    let x = cert.lp_primal(inst)?;
    let d = cert.lp_dual()?;
    let pair = cert.msf_pair(inst)?;
    if x.is_none() && d.is_none() && pair.is_none() {
        return Err("certificate has no sections".into());
    }
    let lp_err = |e: LpError| e.to_string();
    if let Some(x) = &x {
        if let Some(v) = primal_feasible(inst, x).map_err(lp_err)? {
            return Err(v.to_string());
        }
    }
    if let Some(d) = &d {
        if let Some(v) = dual_feasible(inst, d).map_err(lp_err)? {
            return Err(v.to_string());
        }
    }
    let mut lp_value = None;
    if let (Some(x), Some(d)) = (&x, &d) {
        if let Some(v) = comp_slack_check(inst, x, d).map_err(lp_err)? {
            return Err(v.to_string());
        }
        let (p, dv) = objectives(inst, x, d).map_err(lp_err)?;
        if p != dv {
            return Err(format!("primal value {p} differs from dual value {dv}"));
        }
        lp_value = Some(p);
    }
    if let Some((flow, pot)) = &pair {
        let oracles = Oracles::new(inst, Default::default()).map_err(|e| e.to_string())?;
        let Some(value) = oracles.objective(inst, flow).finite() else {
            return Err("flow is infeasible".into());
        };
        if let Some(pot) = pot {
            let verdict = oracles.check_potential(inst, flow, pot).map_err(|e| e.to_string())?;
            if !verdict.is_optimal() {
                return Err(verdict.to_string());
            }
        }
        if let Some(lv) = lp_value {
            if lv != BigRational::from_integer(value.into()) {
                return Err(format!("LP value {lv} differs from flow value {value}"));
            }
        }
    }
    Ok(())
}

fn cmd_verify(input: &Path, cert_path: &Path) -> CmdResult {
    let inst = load_instance(input)?;
    let cert = load_certificate(cert_path, &inst)?;
    if !(cert.primal_x.is_some() || cert.dual_y.is_some() || cert.dual_z.is_some() || cert.flow_xi.is_some()) {
        return Err(input_err("certificate has no sections"));
    }
    verify_certificate(&inst, &cert).map_err(Failure::Verify)?;
    println!("verified");
    Ok(())
}

fn cmd_translate(input: &Path, cert_path: &Path, direction: Direction, output: &Path) -> CmdResult {
    let inst = load_instance(input)?;
    let mut cert = load_certificate(cert_path, &inst)?;
    match direction {
        Direction::Lp2msf => {
            if !cert.has_lp() {
                return Err(input_err("certificate lacks primal_x or dual sections"));
            }
            let x = cert.lp_primal(&inst).map_err(input_err)?.expect("checked above");
            let d = cert.lp_dual().map_err(input_err)?.expect("checked above");
            let (flow, pot) = potentials_from_lp_dual(&inst, &x, &d).map_err(verify_err)?;
            cert.set_msf(&flow, &pot);
        }
        Direction::Msf2lp => {
            if !cert.has_msf() {
                return Err(input_err("certificate lacks flow or potential sections"));
            }
            let (flow, pot) = cert.msf_pair(&inst).map_err(input_err)?.expect("checked above");
            let pot = pot.expect("checked above");
            let tight = tighten_potential(&inst, &flow, &pot).map_err(verify_err)?;
            let lp = lp_cert_from_potential(&inst, &flow, &tight.potential).map_err(verify_err)?;
            cert.set_lp(&lp.x, &lp.dual);
            cert.meta.values.insert("primal".into(), lp.value.to_string());
        }
    }
    verify_certificate(&inst, &cert).map_err(Failure::Verify)?;
    write_file(output, &cert.to_json())
}

fn cmd_gen(seed: u64, ns: usize, nt: usize, arcs: usize, wmax: i64, output: Option<PathBuf>) -> CmdResult {
    let inst = gen_instance(&GenConfig { seed, ns, nt, arcs, wmax, ..GenConfig::default() }).map_err(input_err)?;
    let text = write_instance(&inst);
    match output {
        Some(p) => write_file(&p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
