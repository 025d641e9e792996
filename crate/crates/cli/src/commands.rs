use std::fs;
use std::path::Path;

use skalab::analysis::{run_experiment, ExperimentConfig, ExperimentReport};
use skalab::hashing::{build_prefix_extractor, verify_extractor, ExtractorTable, VerdictKind, VerifyMode};
use skalab::protocol::TranscriptFile;
use skalab::vm::StepCap;
use skalab::{Oracle, OracleConfig, Value};

use crate::config::{Config, ScheduleSection};
use crate::{CliError, ExtractorCommand, OracleArgs, RunArgs, ScheduleArgs};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

impl ScheduleArgs {
    fn section(&self) -> ScheduleSection {
        ScheduleSection {
            base_space: self.base_space,
            ratio: self.ratio,
            level_min: self.level_min,
            level_max: self.level_max,
            cap: self.space_cap,
        }
    }
}

pub fn oracle(args: OracleArgs) -> Result<(), CliError> {
    let cfg = Config {
        schedule: args.schedule.section(),
        ..Config::default()
    };
    let schedule = cfg.schedule();
    let x = args.x.0;
    let parts: Vec<_> = args.cond.into_iter().map(|b| b.0).collect();
    let mut oc = OracleConfig::for_input_len(x.len());
    if let Some(l) = args.l_max {
        oc.l_max = l;
    }
    if let Some(q) = args.quota {
        oc.program_quota = q;
    }
    if let Some(cap) = args.step_cap {
        oc.step_cap = StepCap::Fixed(cap);
    }
    let l_max = oc.l_max;
    let oracle = Oracle::new(schedule, oc)?;
    let r = oracle.complexity(&x, &parts, args.level)?;
    println!("value {}", r.value);
    match &r.witness {
        Some(w) => println!("witness \"{w}\" ({} bits, hex {})", w.len(), hex_of(w)),
        None => println!("witness none"),
    }
    println!("level {} space {} cells", r.level, r.space);
    println!("l_max {l_max}");
    println!("condition sha256 {}", r.condition_digest);
    println!("status {}", if r.truncated { "budget-truncated" } else { "exact" });
    match r.value {
        Value::Finite(_) => Ok(()),
        Value::Infinite => Err(CliError::Infinite),
    }
}

/// Bits packed most significant first, zero-padded to whole bytes.
fn hex_of(b: &skalab::BitString) -> String {
    b.bits()
        .chunks(8)
        .map(|c| {
            let byte = c
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &bit)| acc | (bit as u8) << (7 - i));
            format!("{byte:02x}")
        })
        .collect()
}

fn run_config(args: &RunArgs) -> Result<Config, CliError> {
    let mut cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let mut over = Config::default();
    over.experiment.variant = args.variant;
    over.experiment.n = args.n;
    over.experiment.epsilon = args.epsilon;
    over.experiment.trials = args.trials;
    over.experiment.master_seed = args.seed;
    over.experiment.flips = args.flips;
    over.experiment.c = args.c;
    over.schedule = args.schedule.section();
    over.budget.l_max = args.l_max;
    over.budget.program_quota = args.quota;
    over.budget.step_cap = args.step_cap;
    over.extractor.path = args.extractor.clone();
    over.output.dir = args.out.clone();
    cfg.merge(over);
    Ok(cfg.resolved())
}

fn load_extractor(path: &Path) -> Result<ExtractorTable, CliError> {
    Ok(ExtractorTable::from_text(&read(path)?)?)
}

fn sweep(exp: &ExperimentConfig, extractor: Option<&Path>) -> Result<skalab::analysis::ExperimentOutput, CliError> {
    let table = extractor.map(load_extractor).transpose()?;
    Ok(run_experiment(exp, table)?)
}

pub fn run(args: RunArgs) -> Result<(), CliError> {
    let cfg = run_config(&args)?;
    let exp = cfg.experiment();
    let out = sweep(&exp, cfg.extractor.path.as_deref())?;
    let dir = cfg.out_dir();
    let tdir = dir.join("transcripts");
    fs::create_dir_all(&tdir).map_err(|e| CliError::io(&tdir, e))?;
    let report = &out.report;
    let digest = report.digest();
    write(&dir.join("config.toml"), cfg.to_toml())?;
    write(&dir.join("report.json"), report.to_json())?;
    write(&dir.join("report.sha256"), format!("{digest}  report.json\n"))?;
    write(&dir.join("runs.csv"), report.to_csv())?;
    let mut index = String::new();
    for (i, file) in &out.transcripts {
        let name = format!("run-{i:06}.txt");
        write(&tdir.join(&name), file.to_text())?;
        index.push_str(&format!("{}  {name}\n", file.digest()));
    }
    write(&tdir.join("SHA256SUMS"), index)?;
    let summary = report.summary_line();
    write(&dir.join("summary.txt"), format!("{summary}\n"))?;
    println!("{summary}");
    println!("report {} sha256 {digest}", dir.join("report.json").display());
    Ok(())
}

fn parse_dims(s: &str, count: usize) -> Result<Vec<usize>, CliError> {
    let dims: Vec<usize> = s
        .split(':')
        .map(|p| p.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad dimensions {s:?}")))?;
    if dims.len() != count {
        return Err(CliError::Usage(format!(
            "expected {count} colon-separated dimensions, got {s:?}"
        )));
    }
    Ok(dims)
}

pub fn extractor(cmd: ExtractorCommand) -> Result<(), CliError> {
    match cmd {
        ExtractorCommand::Build {
            n,
            d,
            m,
            epsilon,
            seed,
            certify,
            attempts,
            out,
        } => {
            let e = build_prefix_extractor(n, d, m, epsilon, seed, certify.unwrap_or(n.min(m)), attempts)?;
            write(&out, e.to_text())?;
            println!("built n={n} d={d} m={m} on attempt {}", e.attempt);
            println!("table {} sha256 {}", out.display(), e.digest());
            Ok(())
        }
        ExtractorCommand::Verify {
            table,
            identity,
            constant,
            k,
            epsilon,
            prefix,
            sampled,
        } => {
            let mut e = match (table, identity, constant) {
                (Some(p), _, _) => load_extractor(&p)?,
                (_, Some(s), _) => {
                    let v = parse_dims(&s, 2)?;
                    ExtractorTable::identity_seed(v[0], v[1])?
                }
                (_, _, Some(s)) => {
                    let v = parse_dims(&s, 3)?;
                    ExtractorTable::constant(v[0], v[1], v[2])?
                }
                _ => {
                    return Err(CliError::Usage(
                        "one of --table, --identity, --constant is required".into(),
                    ))
                }
            };
            if let Some(p) = prefix {
                e = e.prefix(p)?;
            }
            let mode = sampled.map_or(VerifyMode::exhaustive(), VerifyMode::sampled);
            let v = verify_extractor(&e, k, epsilon, mode)?;
            let kind = match v.kind {
                VerdictKind::Pass => "PASS",
                VerdictKind::Fail => "FAIL",
                VerdictKind::Inconclusive => "INCONCLUSIVE",
            };
            println!("{kind} deviation {} sources {}", v.max_deviation, v.sources_checked);
            if v.kind == VerdictKind::Fail {
                println!("worst source {:?}", v.worst_source);
                return Err(CliError::Failed(format!(
                    "deviation {} >= epsilon {epsilon}",
                    v.max_deviation
                )));
            }
            Ok(())
        }
    }
}

pub fn replay(path: &Path) -> Result<(), CliError> {
    let file = TranscriptFile::from_text(&read(path)?)?;
    let t = &file.transcript;
    t.observe_all()?;
    println!(
        "variant {} n {} epsilon {} seed {}",
        file.variant, file.n, file.epsilon, file.seed
    );
    for (k, v) in &file.params {
        println!("param {k} {v}");
    }
    for m in &t.messages {
        println!("round {} {:?} {}", m.round, m.sender, m.payload);
    }
    println!(
        "messages {} bits {} payload {} framing {}",
        t.messages.len(),
        t.len_bits(),
        t.payload_bits(),
        t.framing_bits()
    );
    println!("transcript sha256 {}", t.digest());
    println!("file sha256 {}", file.digest());
    Ok(())
}

pub fn report(path: &Path, verify: bool, extractor: Option<&Path>) -> Result<(), CliError> {
    let text = read(path)?;
    let report: ExperimentReport =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    println!("{}", report.summary_line());
    for (name, c) in &report.aggregates.checks {
        println!(
            "check {name}: held {}/{} max slack {}",
            c.held, c.evaluated, c.max_min_slack
        );
    }
    for (d, count) in &report.aggregates.deficiency_histogram {
        println!("deficiency {d}: {count}");
    }
    let digest = report.digest();
    println!("sha256 {digest}");
    if report.to_json() != text {
        return Err(CliError::Failed("file is not in canonical form".into()));
    }
    if verify {
        let again = sweep(&report.config, extractor)?;
        if again.report.digest() != digest {
            return Err(CliError::Failed(format!(
                "regenerated digest {} differs",
                again.report.digest()
            )));
        }
        println!("regenerated byte-identically");
    }
    Ok(())
}
