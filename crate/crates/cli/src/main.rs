//! `pmod`: build, restrict and verify persistence modules stored as JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pmod_core::constructions::{self, BuildResult, CandyModule};
use pmod_core::io::{
    barcode_to_json, line_from_json, line_to_json, module_from_json, module_to_json, morphism_to_value,
    rects_from_json,
};
use pmod_core::rect::barcode_1d;
use pmod_core::verify::{self, Status};
use pmod_core::{Error, Field, PersModule, RectDecomp};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "pmod", version, about = "Exact persistence modules on finite grids")]
struct Cli {
    /// Require every input to be over this field ("Q" or "Fp:<p>").
    #[arg(long, global = true)]
    field: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a module one dimension up whose hyperplane restriction is the input.
    Construct {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        line_out: Option<PathBuf>,
    },
    /// Restrict a module along a LINE embedding.
    Restrict {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        line: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Barcode of a 1D module, printed as RECTS.
    Barcode {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print a JSON verification report.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[arg(long = "in")]
        input: PathBuf,
        /// Second module for `iso`.
        #[arg(long)]
        with: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
    /// Dimension of the space of morphisms `a -> b`.
    Hom {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Also print a basis.
        #[arg(long)]
        basis: bool,
    },
    /// Concatenate two candy modules along the last two axes.
    Concat {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Wrap each listed module and string the candies together.
    String {
        /// JSON array of module paths, or `{"modules": [...]}`; relative to the manifest.
        #[arg(long)]
        list: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the recovering embeddings here as a JSON array of LINE records.
        #[arg(long)]
        lines_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    S4,
    Sprime,
    Sdual,
    Candy,
    Min3,
    Min3rect,
    Gen4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Indec,
    Candy,
    Iso,
    Tworows,
}

enum Failure {
    /// A checked property does not hold.
    Violated(Value),
    Inconclusive(Value),
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<Option<Value>, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Core(Error::Parse(format!("{}: {e}", path.display()))))
}

struct Ctx {
    field: Option<Field>,
}

impl Ctx {
    fn check_field(&self, f: Field) -> Result<(), Failure> {
        match self.field {
            Some(want) if want != f => Err(Failure::Input(format!("input is over {f}, --field asks for {want}"))),
            _ => Ok(()),
        }
    }

    fn module(&self, path: &Path) -> Result<PersModule, Failure> {
        let text = read(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let m = if v.get("rects").is_some() { rects_from_json(&text)?.to_module() } else { module_from_json(&text)? };
        m.check()?;
        self.check_field(m.field())?;
        Ok(m)
    }

    fn rects(&self, path: &Path) -> Result<RectDecomp, Failure> {
        let r = rects_from_json(&read(path)?)?;
        self.check_field(r.field())?;
        Ok(r)
    }
}

fn construct(ctx: &Ctx, method: Method, input: &Path, out: &Path, line_out: Option<&Path>) -> Outcome {
    let b: BuildResult = match method {
        Method::S4 => constructions::build_s(&ctx.rects(input)?)?,
        Method::Min3 => constructions::min3(&ctx.rects(input)?)?,
        Method::Min3rect => constructions::min3_rect(&ctx.rects(input)?)?,
        Method::Sprime => constructions::build_s_prime(&ctx.module(input)?)?,
        Method::Sdual => constructions::build_s_dprime(&ctx.module(input)?)?,
        Method::Candy => constructions::candy_wrap(&ctx.module(input)?)?,
        Method::Gen4 => constructions::gen4(&ctx.module(input)?)?,
    };
    write(out, &module_to_json(&b.module))?;
    if let Some(p) = line_out {
        write(p, &line_to_json(&b.line, Some(&b.domain)))?;
    }
    let bx = b.module.grid();
    Ok(Some(json!({ "layer_count": b.layer_count, "lo": bx.lo(), "hi": bx.hi() })))
}

fn restrict(ctx: &Ctx, input: &Path, line: &Path, out: &Path) -> Outcome {
    let m = ctx.module(input)?;
    let (l, domain) = line_from_json(&read(line)?)?;
    let domain = match domain {
        Some(d) => d,
        None => l
            .max_domain(m.grid())
            .ok_or_else(|| Failure::Input("the line misses the module's box".into()))?,
    };
    write(out, &module_to_json(&m.restrict(&l, &domain)?))?;
    Ok(None)
}

fn run_verify(ctx: &Ctx, check: Check, input: &Path, with: Option<&Path>, seed: u64, trials: usize) -> Outcome {
    let m = ctx.module(input)?;
    match check {
        Check::Indec => {
            let v = verify::try_split(&m, seed, trials)?;
            let report = serde_json::to_value(&v).expect("report serializes");
            match v.status {
                Status::IndecomposableCertified => Ok(Some(report)),
                Status::DecomposableCertified => Err(Failure::Violated(report)),
                Status::Inconclusive => Err(Failure::Inconclusive(report)),
            }
        }
        Check::Candy => {
            let r = verify::check_candy(&CandyModule::new(m)?)?;
            let report = serde_json::to_value(&r).expect("report serializes");
            if r.passed { Ok(Some(report)) } else { Err(Failure::Violated(report)) }
        }
        Check::Iso => {
            let path = with.ok_or_else(|| Failure::Input("verify iso needs --with".into()))?;
            let n = ctx.module(path)?;
            match verify::iso_certificate(&m, &n, seed, trials)? {
                Some(f) => Ok(Some(json!({ "iso": true, "certificate": morphism_to_value(&f) }))),
                None if m.n() == 1 || m.dims() != n.dims() => Err(Failure::Violated(json!({ "iso": false }))),
                None => Err(Failure::Inconclusive(json!({ "iso": null }))),
            }
        }
        Check::Tworows => {
            let Some(y) = verify::find_separator(&m) else {
                return Err(Failure::Inconclusive(json!({ "status": "Inconclusive", "separator": null })));
            };
            let s = verify::decompose_two_rows(&m, &y)?;
            Ok(Some(json!({ "status": "DecomposableCertified", "separator": y, "dims": s.dims() })))
        }
    }
}

fn hom(ctx: &Ctx, a: &Path, b: &Path, basis: bool) -> Outcome {
    let (m, n) = (ctx.module(a)?, ctx.module(b)?);
    let hb = verify::hom_basis(&m, &n)?;
    let mut report = json!({ "dim": hb.len() });
    if basis {
        report["basis"] = hb.iter().map(morphism_to_value).collect();
    }
    Ok(Some(report))
}

fn concat(ctx: &Ctx, a: &Path, b: &Path, out: &Path) -> Outcome {
    let ca = CandyModule::new(ctx.module(a)?)?;
    let cb = CandyModule::new(ctx.module(b)?)?;
    let (c, t) = constructions::concat_with_shift(&ca, &cb)?;
    write(out, &module_to_json(&c.module))?;
    Ok(Some(json!({ "ul": c.ul, "lr": c.lr, "translation": t })))
}

fn string(ctx: &Ctx, list: &Path, out: &Path, lines_out: Option<&Path>) -> Outcome {
    let manifest: Value =
        serde_json::from_str(&read(list)?).map_err(|e| Failure::Input(format!("{}: {e}", list.display())))?;
    let entries = manifest.get("modules").unwrap_or(&manifest);
    let paths: Vec<&str> = entries
        .as_array()
        .and_then(|a| a.iter().map(Value::as_str).collect())
        .ok_or_else(|| Failure::Input("manifest must list module paths".into()))?;
    let base = list.parent().unwrap_or(Path::new("."));
    let mods = paths.iter().map(|p| ctx.module(&base.join(p))).collect::<Result<Vec<_>, _>>()?;
    let s = constructions::string_candies(&mods)?;
    write(out, &module_to_json(&s.candy.module))?;
    let lines: Vec<Value> = s
        .embeddings
        .iter()
        .map(|(l, d)| serde_json::from_str(&line_to_json(l, Some(d))).expect("valid json"))
        .collect();
    if let Some(p) = lines_out {
        write(p, &serde_json::to_string_pretty(&lines).expect("valid json"))?;
    }
    Ok(Some(json!({ "count": mods.len(), "ul": s.candy.ul, "lr": s.candy.lr })))
}

fn run(cli: Cli) -> Outcome {
    let field = cli.field.as_deref().map(Field::from_label).transpose()?;
    let ctx = Ctx { field };
    match cli.cmd {
        Cmd::Construct { method, input, out, line_out } => construct(&ctx, method, &input, &out, line_out.as_deref()),
        Cmd::Restrict { input, line, out } => restrict(&ctx, &input, &line, &out),
        Cmd::Barcode { input } => {
            let m = ctx.module(&input)?;
            let bars = barcode_1d(&m)?;
            println!("{}", barcode_to_json(m.field(), &bars));
            Ok(None)
        }
        Cmd::Verify { check, input, with, seed, trials } => {
            run_verify(&ctx, check, &input, with.as_deref(), seed, trials)
        }
        Cmd::Hom { a, b, basis } => hom(&ctx, &a, &b, basis),
        Cmd::Concat { a, b, out } => concat(&ctx, &a, &b, &out),
        Cmd::String { list, out, lines_out } => string(&ctx, &list, &out, lines_out.as_deref()),
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("valid json"));
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            if let Some(r) = report {
                print(&r);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Violated(r)) => {
            print(&r);
            ExitCode::from(1)
        }
        Err(Failure::Inconclusive(r)) => {
            print(&r);
            ExitCode::from(3)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("pmod: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("pmod: {e}");
            ExitCode::from(if matches!(e, Error::Internal(_)) { 1 } else { 2 })
        }
    }
}
