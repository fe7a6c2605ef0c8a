use std::collections::BTreeSet;

use popdiff_core::bounds::{self, PropertyArgs, RsParams};
use popdiff_core::profile::{self, ProfileBackend};
use popdiff_core::rational::{self, Rational};
use popdiff_core::residue::{
    largest_gap, rectify as lift, IntSet, PrimeModulus, ResidueSet, SetLiteral,
};
use popdiff_core::search::{
    self, render_report, Gate, Mode, ReportFormat, SearchConfig, SearchRecord, SearchReport,
};
use popdiff_core::sumset::{self, AdditiveSet, RestrictedMap};
use popdiff_core::verdict::{BoundVerdict, ClaimId, Outcome};
use popdiff_core::{Error, Result};
use serde_json::json;

use super::*;

fn residue(s: &str) -> Result<ResidueSet> {
    s.parse()
}

fn integers(s: &str) -> Result<IntSet> {
    s.parse()
}

fn rat(s: &str) -> Result<Rational> {
    let r = rational::parse(s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}")))?;
    if r <= rational::int(0) {
        return Err(Error::InvalidArgument(format!(
            "expected a positive rational, got {s}"
        )));
    }
    Ok(r)
}

fn need<'a, T>(v: &'a Option<T>, flag: &str, claim: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::InvalidArgument(format!("{claim} needs --{flag}")))
}

fn done() -> Result<Completed> {
    Ok(Completed { violation: false })
}

fn print_verdict(v: &BoundVerdict, as_json: bool) -> Result<Completed> {
    if as_json {
        emitln!("{}", v.to_json());
    } else {
        emitln!("{}", v.human());
    }
    Ok(Completed {
        violation: v.pass == Outcome::Fail,
    })
}

pub fn profile(args: ProfileArgs) -> Result<Completed> {
    let set = residue(&args.set)?;
    let backend: ProfileBackend = args.backend.parse()?;
    let prof = profile::profile(&set, backend);
    match args.out.parse::<ReportFormat>()? {
        ReportFormat::Csv => {
            emitln!("b,delta");
            for (b, d) in prof.values.iter().enumerate() {
                emitln!("{b},{d}");
            }
        }
        ReportFormat::Json => emitln!("{}", serde_json::to_string(&prof)?),
        ReportFormat::Human => {
            emitln!(
                "A = {set}  |A| = {}  backend = {}",
                set.len(),
                backend.resolve(set.p())
            );
            for (b, d) in prof.values.iter().enumerate() {
                emitln!("Δ({b}) = {d}");
            }
        }
    }
    done()
}

pub fn census(args: CensusArgs) -> Result<Completed> {
    if let Some(p) = args.p {
        let p = PrimeModulus::new(p)?;
        let v = search::extremal_census(p, args.d.unwrap(), args.n.unwrap(), args.m)?;
        return print_verdict(&v, args.json);
    }
    let set = residue(args.set.as_deref().expect("clap enforces --set"))?;
    let report = profile::census(&set, args.m);
    if args.json {
        emitln!("{}", serde_json::to_string(&report)?);
    } else {
        emitln!(
            "N_{}(A) = {}  (bound 2m = {})",
            report.m,
            report.count,
            2 * report.m
        );
        let w: Vec<String> = report.witnesses.iter().map(u64::to_string).collect();
        emitln!("shifts: {}", w.join(","));
        if let Some(warning) = &report.warning {
            emitln!("warning: {warning}");
        }
    }
    done()
}

pub fn mu(args: MuArgs) -> Result<Completed> {
    let value = match (args.a.parse::<SetLiteral>()?, args.b.parse::<SetLiteral>()?) {
        (SetLiteral::Residue(a), SetLiteral::Residue(b)) => u64::from(profile::mu(&a, &b)?),
        (SetLiteral::Int(a), SetLiteral::Int(b)) => profile::mu_int(&a, &b)?,
        _ => {
            return Err(Error::InvalidArgument(
                "A and B must live in the same group".into(),
            ))
        }
    };
    if args.json {
        emitln!("{}", json!({ "mu": value }));
    } else {
        emitln!("mu_A(B) = {value}");
    }
    done()
}

fn print_set(label: &str, set: &dyn std::fmt::Display, as_json: bool) {
    if as_json {
        emitln!("{}", json!({ label: set.to_string() }));
    } else {
        emitln!("{set}");
    }
}

pub fn sumset(args: SumsetArgs) -> Result<Completed> {
    let b_lit = || need(&args.b, "B", &args.op);
    match args.op.as_str() {
        "sum" | "hfold" | "symclosure" | "diffset" => {
            let out = match args.a.parse::<SetLiteral>()? {
                SetLiteral::Residue(a) => SetLiteral::Residue(residue_op(&args, &a)?),
                SetLiteral::Int(a) => SetLiteral::Int(int_op(&args, &a)?),
            };
            match out {
                SetLiteral::Residue(s) => print_set("result", &s, args.json),
                SetLiteral::Int(s) => print_set("result", &s, args.json),
            }
            done()
        }
        "restricted" => {
            let (a, b) = (residue(&args.a)?, residue(b_lit()?)?);
            let tau: RestrictedMap = need(&args.tau, "tau", "restricted")?.parse()?;
            print_set(
                "result",
                &sumset::restricted_sumset(&a, &b, &tau)?,
                args.json,
            );
            done()
        }
        "cd" => {
            let v = sumset::cauchy_davenport_check(&residue(&args.a)?, &residue(b_lit()?)?)?;
            print_verdict(&v, args.json)
        }
        "freiman" => print_verdict(&sumset::freiman_condition(&residue(&args.a)?)?, args.json),
        "coverap" => {
            let set = residue(&args.a)?;
            let ap = sumset::shortest_covering_ap(&set)?;
            if args.json {
                emitln!("{}", serde_json::to_string(&ap)?);
            } else {
                emitln!(
                    "start {} difference {} length {}: {}",
                    ap.start,
                    ap.difference,
                    ap.length,
                    ap.elements(set.modulus())
                );
            }
            done()
        }
        "difsetint" => {
            let k = *need(&args.k, "k", "difsetint")?;
            print_verdict(
                &sumset::difset_interval_check(&integers(&args.a)?, k)?,
                args.json,
            )
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown sumset op {other:?}"
        ))),
    }
}

fn residue_op(args: &SumsetArgs, a: &ResidueSet) -> Result<ResidueSet> {
    match args.op.as_str() {
        "sum" => a.sumset(&residue(need(&args.b, "B", "sum")?)?),
        "hfold" => a.hfold(*need(&args.h, "h", "hfold")?),
        "symclosure" => Ok(sumset::sym_closure(a)),
        _ => a.difference_set(),
    }
}

fn int_op(args: &SumsetArgs, a: &IntSet) -> Result<IntSet> {
    match args.op.as_str() {
        "sum" => a.sumset(&integers(need(&args.b, "B", "sum")?)?),
        "hfold" => a.hfold(*need(&args.h, "h", "hfold")?),
        "symclosure" => Ok(sumset::sym_closure_int(a)),
        _ => a.difference_set(),
    }
}

fn parse_shifts(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad shift {x:?}")))
        })
        .map(|r| r.map(|v| v as u64))
        .collect::<Result<Vec<_>>>()
}

/// Cap on the number of maps `B -> A` tried when `--tau` is omitted.
const MAX_TAUS: usize = 1 << 20;

pub fn verify(args: VerifyArgs) -> Result<Completed> {
    let claim: ClaimId = args.claim.parse()?;
    let id = claim.as_str();
    let c = rat(&args.c)?;
    let a_lit = || need(&args.a, "A", id);
    let b_lit = || need(&args.b, "B", id);
    let verdict = match claim {
        ClaimId::P1 | ClaimId::P2 | ClaimId::P3 | ClaimId::P4 => {
            let a = residue(a_lit()?)?;
            let shifts = match &args.shifts {
                Some(s) => {
                    let p = a.modulus();
                    parse_shifts(s)?
                        .into_iter()
                        .map(|b| p.reduce(b as i64))
                        .collect()
                }
                None => Vec::new(),
            };
            let set = args.b.as_deref().map(residue).transpose()?;
            bounds::check_property(claim, &a, &PropertyArgs { shifts, set })?
        }
        ClaimId::Eq1 => bounds::check_eq1(&residue(a_lit()?)?, &residue(b_lit()?)?)?,
        ClaimId::L31 => {
            let h = *need(&args.h, "h", id)?;
            bounds::check_subadditivity(&residue(a_lit()?)?, &residue(b_lit()?)?, h)?
        }
        ClaimId::L32 => bounds::check_hls(&residue(a_lit()?)?, &residue(b_lit()?)?)?,
        ClaimId::T33 => bounds::check_freiman_cover(&residue(b_lit()?)?)?,
        ClaimId::L34 => {
            sumset::difset_interval_check(&integers(b_lit()?)?, *need(&args.k, "k", id)?)?
        }
        ClaimId::T1 => bounds::check_kl(&integers(a_lit()?)?, &integers(b_lit()?)?, c)?,
        ClaimId::T2 => {
            let (a, b) = (residue(a_lit()?)?, residue(b_lit()?)?);
            let v = bounds::check_main(&a, &b, c)?;
            if args.trace {
                let t = bounds::proof_trace(&a, &b)?;
                if args.json {
                    emitln!("{}", serde_json::to_string(&t)?);
                } else {
                    emitln!(
                        "branch: {}  (8|B|^2 < p: {})",
                        t.branch.as_str(),
                        t.sqrt_gate
                    );
                    for (k, v) in &t.intermediate {
                        emitln!("  {k} = {}", rational::render(v));
                    }
                    for (k, ok) in &t.identities {
                        emitln!("  [{}] {k}", if *ok { "ok" } else { "FAILED" });
                    }
                    for (k, v) in &t.counterfactual {
                        emitln!("  (only under mu < |B|) {k} = {}", rational::render(v));
                    }
                }
            }
            v
        }
        ClaimId::T2Census => {
            let m = *need(&args.m, "m", id)?;
            bounds::check_main_census(&residue(a_lit()?)?, m, c)?
        }
        ClaimId::T51 | ClaimId::T52 | ClaimId::T53 => {
            let (a, b) = (residue(a_lit()?)?, residue(b_lit()?)?);
            let params = RsParams {
                eps: args.eps.as_deref().map(rat).transpose()?,
                c: Some(c),
            };
            rs_verdict(claim, &a, &b, args.tau.as_deref(), params)?
        }
        ClaimId::Cd => sumset::cauchy_davenport_check(&residue(a_lit()?)?, &residue(b_lit()?)?)?,
    };
    print_verdict(&verdict, args.json)
}

/// With an explicit map, that map; otherwise every map `B -> A`, reporting
/// the first failure or else the tightest case.
fn rs_verdict(
    claim: ClaimId,
    a: &ResidueSet,
    b: &ResidueSet,
    tau: Option<&str>,
    params: RsParams,
) -> Result<BoundVerdict> {
    if let Some(t) = tau {
        let tau: RestrictedMap = t.parse()?;
        return bounds::check_rs_theorems(claim, a, b, &tau, params);
    }
    let count = (a.len() as f64).powi(b.len() as i32);
    if count > MAX_TAUS as f64 {
        return Err(Error::InvalidArgument(format!(
            "{count} maps B -> A; pass --tau to pick one"
        )));
    }
    let mut worst: Option<(BoundVerdict, RestrictedMap)> = None;
    for tau in RestrictedMap::enumerate_all(a, b) {
        let v = bounds::check_rs_theorems(claim, a, b, &tau, params)?;
        if v.pass == Outcome::Fail {
            worst = Some((v, tau));
            break;
        }
        if worst.as_ref().is_none_or(|(w, _)| v.lhs < w.lhs) {
            worst = Some((v, tau));
        }
    }
    let (v, tau) = worst.ok_or(Error::EmptySet)?;
    let note = if v.note.is_empty() {
        format!("tau = {tau}")
    } else {
        format!("{}; tau = {tau}", v.note)
    };
    Ok(v.with_note(note))
}

pub fn rectify(args: RectifyArgs) -> Result<Completed> {
    let set = residue(&args.set)?;
    let gap = largest_gap(&set)?;
    let lifted = lift(&set)?;
    if args.json {
        emitln!("{}", json!({ "set": lifted.to_string(), "gap": gap }));
    } else {
        emitln!(
            "largest gap [{}, {}) length {}",
            gap.start,
            gap.end,
            gap.length
        );
        emitln!("{lifted}");
    }
    done()
}

fn load_config(args: &SearchArgs) -> Result<SearchConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => SearchConfig::default(),
    };
    if !args.primes.is_empty() {
        cfg.primes = args
            .primes
            .iter()
            .map(|&p| PrimeModulus::new(p))
            .collect::<Result<_>>()?;
    }
    if let Some(r) = &args.prime_range {
        cfg.prime_range = Some([r[0], r[1]]);
    }
    if let Some(m) = &args.mode {
        cfg.mode = match m.as_str() {
            "exhaustive" => Mode::Exhaustive,
            "random" => Mode::Random,
            _ => return Err(Error::Parse(format!("unknown mode {m:?}"))),
        };
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    if let Some(g) = &args.gate {
        cfg.gate = g.parse::<Gate>()?;
    }
    if let Some(c) = &args.c {
        cfg.c = rat(c)?;
    }
    if let Some(b) = &args.backend {
        cfg.backend = b.parse()?;
    }
    if !args.suites.is_empty() {
        cfg.suites = args
            .suites
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_>>()?;
    }
    cfg.min_card = args.min_card.or(cfg.min_card);
    cfg.max_card = args.max_card.or(cfg.max_card);
    cfg.m_max = args.m_max.or(cfg.m_max);
    if args.all_sets {
        cfg.up_to_affine = false;
    }
    if let Some(o) = &args.output {
        cfg.output = Some(o.clone());
    }
    cfg.resume |= args.resume;
    cfg.stop_after = args.stop_after.or(cfg.stop_after);
    cfg.workers = args.workers.or(cfg.workers);
    Ok(cfg)
}

pub fn search(args: SearchArgs) -> Result<Completed> {
    let format: ReportFormat = args.format.parse()?;
    let cfg = load_config(&args)?;
    let report = search::run(&cfg)?;
    emit!("{}", render_report(&report, format));
    if format == ReportFormat::Json {
        emitln!();
    }
    Ok(Completed {
        violation: report.has_theorem_failure(),
    })
}

pub fn report(args: ReportArgs) -> Result<Completed> {
    let format: ReportFormat = args.format.parse()?;
    let text = std::fs::read_to_string(&args.input)?;
    let records = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str::<SearchRecord>(l).map_err(Error::from))
        .collect::<Result<Vec<_>>>()?;
    let units = records
        .iter()
        .map(|r| r.task.as_str())
        .collect::<BTreeSet<_>>()
        .len() as u64;
    let report = SearchReport::new(records, units, true);
    emit!("{}", render_report(&report, format));
    if format == ReportFormat::Json {
        emitln!();
    }
    Ok(Completed {
        violation: report.has_theorem_failure(),
    })
}
