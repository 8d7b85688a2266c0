use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use prodcoh::cohomology::{CohClass, Cohomology};
use prodcoh::group::Group;
use prodcoh::parse::{expr_degree, format_class, parse_class, parse_coords};
use prodcoh::resolution::Resolution;
use prodcoh::steenrod::{self, Status, Verdict, Witness};
use prodcoh::{acceptance, lzeta, postnikov, Error, Field};

#[derive(Parser, Debug)]
#[command(name = "prodcoh", version, about = "Productive classes in mod-p group cohomology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ResolutionKind {
    Minimal,
    Bar,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Preset group (C2, C3, C4, C8, C2xC2, C2xC2xC2, C3xC3, Q8, D8).
    #[arg(long, conflicts_with = "group_file")]
    group: Option<String>,
    /// JSON multiplication table {"order": n, "table": [[...]]}.
    #[arg(long)]
    group_file: Option<PathBuf>,
    /// Field: a prime p, or p^m:c0,...,cm with the coefficients of a monic
    /// irreducible polynomial, lowest degree first (GF(4) is 2^2:1,1,1).
    #[arg(long, default_value = "2")]
    field: String,
    #[arg(long, value_enum, default_value = "minimal")]
    resolution: ResolutionKind,
    /// Degree cap for ring dimensions and certified verdicts.
    #[arg(long)]
    cap: Option<usize>,
    /// Class expression such as "x^2+x*y+y^2"; repeat for several classes.
    #[arg(long, conflicts_with = "coords")]
    expr: Vec<String>,
    /// Class as "n:c0,c1,..." in the canonical basis of H^n; repeatable.
    #[arg(long)]
    coords: Vec<String>,
    /// Print one JSON object instead of text
    #[arg(long)]
    json: bool,
    /// Seed for regenerating the contraction (and hence all chain-level choices).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleMode {
    Productive,
    Semiproductive,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions of H^n for n ≤ cap.
    Ring(Common),
    /// Cup product of two classes.
    Cup(Common),
    /// Top-minus-one Steenrod square of a class (p = 2).
    Sq(Common),
    /// Triple Massey product with its indeterminacy.
    Massey(Common),
    /// Decide whether ζ is productive, with the certified degree.
    Productive(Common),
    /// Decide whether ζ is semi-productive, with a witness if not.
    Semiproductive(Common),
    /// Decide via Ext over the module L_ζ.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "productive")]
        mode: OracleMode,
    },
    /// The lifting obstruction for the comultiplication on P(ζ).
    Obstruction(Common),
    /// Run the acceptance checks.
    Selftest {
        /// Run a single check by number.
        #[arg(long)]
        only: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

const DEFAULT_CAP: usize = 4;

struct Session {
    common: Common,
    group: Group,
    field: Field,
}

impl Session {
    fn new(common: &Common) -> anyhow::Result<Session> {
        let group = match (&common.group, &common.group_file) {
            (Some(name), None) => Group::preset(name)?,
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("G");
                Group::from_json(name, &text)?
            }
            _ => return Err(Error::Input("exactly one of --group and --group-file is required".into()).into()),
        };
        let field: Field = common.field.parse()?;
        Ok(Session { common: common.clone(), group, field })
    }

    fn cap(&self) -> usize {
        self.common.cap.unwrap_or(DEFAULT_CAP)
    }

    /// Cohomology computed through degree `top` (resolution through top + 1).
    fn ring(&self, top: usize) -> anyhow::Result<Cohomology> {
        let hi = top as i64 + 1;
        let res = match self.common.resolution {
            ResolutionKind::Minimal => {
                let r = Resolution::minimal(&self.group, &self.field, hi)?;
                match self.common.seed {
                    Some(s) => r.perturbed(s)?,
                    None => r,
                }
            }
            ResolutionKind::Bar => Resolution::bar(&self.group, &self.field, hi)?,
        };
        Ok(Cohomology::new(Arc::new(res))?)
    }

    /// The class arguments, in order: expressions, then coordinates.
    fn classes(&self, ring: &Cohomology) -> anyhow::Result<Vec<CohClass>> {
        let mut out = Vec::new();
        for e in &self.common.expr {
            out.push(parse_class(ring, e)?);
        }
        for c in &self.common.coords {
            out.push(parse_coords(ring, c)?);
        }
        Ok(out)
    }

    /// Degrees of the class arguments, before any ring is built.
    fn degrees(&self) -> anyhow::Result<Vec<usize>> {
        let mut out = Vec::new();
        for e in &self.common.expr {
            out.push(expr_degree(e)?);
        }
        for c in &self.common.coords {
            let (d, _) = c.split_once(':').ok_or(Error::Parse { position: 0, expected: "'degree:coordinates'".into() })?;
            out.push(d.trim().parse().map_err(|_| Error::Parse { position: 0, expected: "degree".into() })?);
        }
        Ok(out)
    }

    fn expect(&self, count: usize) -> anyhow::Result<Vec<usize>> {
        let d = self.degrees()?;
        if d.len() != count {
            return Err(Error::Input(format!("expected {count} class argument(s), got {}", d.len())).into());
        }
        Ok(d)
    }

    /// Reject a cap below n + 2 for class-dependent commands.
    fn check_cap(&self, n: usize) -> anyhow::Result<()> {
        if self.cap() < n + 2 {
            return Err(Error::TruncationUnderflow { needed: n as i64 + 2, bound: self.cap() as i64 }.into());
        }
        Ok(())
    }

    fn header(&self, command: &str) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), json!(command));
        m.insert("group".into(), json!(self.group.name()));
        m.insert("field".into(), json!(self.field.spec_string()));
        m
    }
}

fn class_json(ring: &Cohomology, c: &CohClass) -> Value {
    serde_json::to_value(ring.to_json(c)).unwrap_or(Value::Null)
}

fn class_text(ring: &Cohomology, c: &CohClass) -> String {
    format_class(ring, c).unwrap_or_else(|_| format!("{:?}", ring.to_json(c).coords))
}

fn status_name(s: Status) -> (&'static str, Option<usize>) {
    match s {
        Status::Yes => ("Yes", None),
        Status::No => ("No", None),
        Status::YesUpToDegree(d) => ("YesUpToDegree", Some(d)),
        Status::Undetermined(d) => ("Undetermined", Some(d)),
    }
}

fn witness_json(ring: &Cohomology, w: &Option<Witness>) -> Value {
    let f = ring.field();
    match w {
        None => Value::Null,
        Some(Witness::Multiplier(u)) => json!({"kind": "multiplier", "u": class_json(ring, u)}),
        Some(Witness::Residue(r)) => json!({"kind": "residue", "residue": class_json(ring, r)}),
        Some(Witness::Failing { v, residue }) => {
            json!({"kind": "failing", "v": class_json(ring, v), "residue": class_json(ring, residue)})
        }
        Some(Witness::Oracle { degree, cocycle }) => json!({
            "kind": "oracle",
            "degree": degree,
            "cocycle": cocycle.iter().map(|&x| f.format_scalar(x)).collect::<Vec<_>>(),
        }),
    }
}

fn witness_text(ring: &Cohomology, w: &Option<Witness>) -> String {
    match w {
        None => String::new(),
        Some(Witness::Multiplier(u)) => format!("witness: multiplier u = {}", class_text(ring, u)),
        Some(Witness::Residue(r)) => format!("witness: residue mod (ζ) = {}", class_text(ring, r)),
        Some(Witness::Failing { v, residue }) => {
            format!("witness: v = {}, residue of v·Sq mod (ζ) = {}", class_text(ring, v), class_text(ring, residue))
        }
        Some(Witness::Oracle { degree, cocycle }) => format!("witness: Ext^{degree} cocycle of length {}", cocycle.len()),
    }
}

fn verdict_output(s: &Session, command: &str, ring: &Cohomology, z: &CohClass, v: &Verdict) -> String {
    let (status, certified) = status_name(v.status);
    if s.common.json {
        let mut m = s.header(command);
        m.insert("class".into(), class_json(ring, z));
        m.insert("status".into(), json!(status));
        m.insert("certified_degree".into(), json!(certified));
        m.insert("witness".into(), witness_json(ring, &v.witness));
        return Value::Object(m).to_string();
    }
    let mut out = format!("{command} {}: {status}", class_text(ring, z));
    if let Some(d) = certified {
        out.push_str(&format!(" (through degree {d})"));
    }
    let w = witness_text(ring, &v.witness);
    if !w.is_empty() {
        out.push('\n');
        out.push_str(&w);
    }
    out
}

fn plain_output(s: &Session, command: &str, ring: Option<&Cohomology>, class: Option<&CohClass>, witness: Value, text: String) -> String {
    if !s.common.json {
        return text;
    }
    let mut m = s.header(command);
    m.insert("class".into(), match (ring, class) {
        (Some(r), Some(c)) => class_json(r, c),
        _ => Value::Null,
    });
    m.insert("status".into(), json!("Ok"));
    m.insert("certified_degree".into(), Value::Null);
    m.insert("witness".into(), witness);
    Value::Object(m).to_string()
}

fn run_command(cmd: &Command) -> anyhow::Result<String> {
    match cmd {
        Command::Ring(c) => {
            let s = Session::new(c)?;
            let cap = c.cap.unwrap_or(5);
            let ring = s.ring(cap)?;
            let dims: Vec<usize> = (0..=cap).map(|n| ring.dim(n)).collect::<prodcoh::Result<_>>()?;
            let text = format!(
                "dim H^n for n = 0..{cap}: {}",
                dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
            );
            Ok(plain_output(&s, "ring", None, None, json!({"dims": dims}), text))
        }
        Command::Cup(c) => {
            let s = Session::new(c)?;
            let d = s.expect(2)?;
            let ring = s.ring(d[0] + d[1])?;
            let cl = s.classes(&ring)?;
            let p = ring.cup(&cl[0], &cl[1])?;
            let text = format!("({})·({}) = {}", class_text(&ring, &cl[0]), class_text(&ring, &cl[1]), class_text(&ring, &p));
            let w = json!({"factors": [class_json(&ring, &cl[0]), class_json(&ring, &cl[1])]});
            Ok(plain_output(&s, "cup", Some(&ring), Some(&p), w, text))
        }
        Command::Sq(c) => {
            let s = Session::new(c)?;
            let n = s.expect(1)?[0];
            let ring = s.ring(2 * n)?;
            let z = s.classes(&ring)?.remove(0);
            let t = steenrod::sq(&ring, &z)?;
            let text = format!("Sq^{}({}) = {}", n.saturating_sub(1), class_text(&ring, &z), class_text(&ring, &t));
            Ok(plain_output(&s, "sq", Some(&ring), Some(&z), json!({"sq": class_json(&ring, &t)}), text))
        }
        Command::Massey(c) => {
            let s = Session::new(c)?;
            let d = s.expect(3)?;
            let top = d.iter().sum::<usize>();
            let ring = s.ring(top)?;
            let cl = s.classes(&ring)?;
            let m = steenrod::massey_triple(&ring, &cl[0], &cl[1], &cl[2])?;
            let ind: Vec<Value> = m.indeterminacy.iter().map(|c| class_json(&ring, c)).collect();
            let text = format!(
                "<{}, {}, {}> = {} (indeterminacy of dimension {})",
                class_text(&ring, &cl[0]),
                class_text(&ring, &cl[1]),
                class_text(&ring, &cl[2]),
                class_text(&ring, &m.representative),
                m.indeterminacy.len()
            );
            let w = json!({"representative": class_json(&ring, &m.representative), "indeterminacy": ind});
            Ok(plain_output(&s, "massey", Some(&ring), Some(&m.representative), w, text))
        }
        Command::Productive(c) => {
            let s = Session::new(c)?;
            let n = s.expect(1)?[0];
            s.check_cap(n)?;
            let ring = s.ring((2 * n).max(s.cap()))?;
            let z = s.classes(&ring)?.remove(0);
            let v = steenrod::is_productive(&ring, &z, s.cap())?;
            Ok(verdict_output(&s, "productive", &ring, &z, &v))
        }
        Command::Semiproductive(c) => {
            let s = Session::new(c)?;
            let n = s.expect(1)?[0];
            s.check_cap(n)?;
            let ring = s.ring(s.cap() + 2 * n)?;
            let z = s.classes(&ring)?.remove(0);
            let v = steenrod::is_semiproductive(&ring, &z, s.cap())?;
            Ok(verdict_output(&s, "semiproductive", &ring, &z, &v))
        }
        Command::Oracle { common, mode } => {
            let s = Session::new(common)?;
            let n = s.expect(1)?[0];
            s.check_cap(n)?;
            let ring = s.ring(s.cap() + n)?;
            let z = s.classes(&ring)?.remove(0);
            let v = match mode {
                OracleMode::Productive => lzeta::oracle_productive(&ring, &z, s.cap())?,
                OracleMode::Semiproductive => lzeta::oracle_semiproductive(&ring, &z, s.cap())?,
            };
            Ok(verdict_output(&s, "oracle", &ring, &z, &v))
        }
        Command::Obstruction(c) => {
            let s = Session::new(c)?;
            let n = s.expect(1)?[0];
            s.check_cap(n)?;
            let ring = s.ring((2 * n + 1).max(s.cap()))?;
            let z = s.classes(&ring)?.remove(0);
            let ob = postnikov::obstruction(&ring, &z)?;
            let residue = ob.residue.as_ref().or(ob.sq_residue.as_ref());
            let witness = match (&ob.multiplier, residue) {
                (Some(u), _) if ob.vanishes => json!({"kind": "multiplier", "u": class_json(&ring, u)}),
                (_, Some(r)) if !ob.vanishes => json!({"kind": "residue", "residue": class_json(&ring, r)}),
                _ => Value::Null,
            };
            if s.common.json {
                let mut m = s.header("obstruction");
                m.insert("class".into(), class_json(&ring, &z));
                m.insert("status".into(), json!(if ob.vanishes { "Vanishes" } else { "Nonzero" }));
                m.insert("certified_degree".into(), json!(ring.resolution().hi()));
                m.insert("vanishes".into(), json!(ob.vanishes));
                m.insert(
                    "residue_coords".into(),
                    residue.map(|r| class_json(&ring, r)["coords"].clone()).unwrap_or(Value::Null),
                );
                m.insert("witness".into(), witness);
                return Ok(Value::Object(m).to_string());
            }
            let mut out = format!(
                "obstruction for {}: {}",
                class_text(&ring, &z),
                if ob.vanishes { "vanishes" } else { "nonzero" }
            );
            if let Some(r) = residue {
                out.push_str(&format!("\nresidue mod (ζ) = {}", class_text(&ring, r)));
            }
            Ok(out)
        }
        Command::Selftest { .. } => bail!("selftest is handled separately"),
    }
}

fn selftest(only: Option<usize>, json_out: bool) -> anyhow::Result<bool> {
    let ids: Vec<usize> = match only {
        Some(i) if (1..=acceptance::count()).contains(&i) => vec![i],
        Some(i) => return Err(Error::Input(format!("no check numbered {i}")).into()),
        None => (1..=acceptance::count()).collect(),
    };
    let mut all = true;
    let mut rows = Vec::new();
    for id in ids {
        let c = acceptance::run(id);
        all &= c.passed;
        if json_out {
            rows.push(json!({"id": c.id, "name": c.name, "passed": c.passed, "detail": c.detail}));
        } else {
            println!("{c}");
        }
    }
    if json_out {
        println!("{}", json!({"command": "selftest", "passed": all, "checks": rows}));
    }
    Ok(all)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded(_)) => 3,
        Some(err) if err.is_input() => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Selftest { only, json } => selftest(*only, *json).map(|ok| if ok { 0 } else { 1 }),
        cmd => run_command(cmd).map(|out| {
            println!("{out}");
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
