use std::fs;
use std::io::{self, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use synted_core::ast::read_doc;
use synted_core::layout::pretty_print;
use synted_core::service::{serve_stream, Session, SessionConfig};
use synted_core::store::Store;
use synted_core::syntax::{parse_text, roundtrip_check};
use synted_core::{builtin_demo_spec, parse_spec, validate_spec, GrammarSpec};

#[derive(Parser)]
#[command(name = "synted", version, about = "Grammar-driven structure editor toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a language spec.
    Check { spec: PathBuf },
    /// Parse program text and print its canonical AST form.
    Parse { spec: PathBuf, file: PathBuf },
    /// Pretty-print a document given in canonical AST form.
    Pretty {
        spec: PathBuf,
        astfile: PathBuf,
        #[arg(long, default_value_t = 2)]
        tab_width: usize,
    },
    /// Compare a program with its canonical unparse; exit 0 iff identical.
    Roundtrip {
        spec: PathBuf,
        file: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print the completion menu of a class, one item per line.
    Complete { spec: PathBuf, class: String },
    /// Run the line-delimited JSON protocol server.
    Serve(ServeArgs),
}

#[derive(Args)]
struct ServeArgs {
    /// Language spec; the bundled demo language when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long, conflicts_with = "stdio", required_unless_present = "stdio")]
    listen: Option<String>,
    #[arg(long)]
    stdio: bool,
    #[arg(long)]
    tab_width: Option<usize>,
    #[arg(long)]
    hspace: Option<i64>,
    #[arg(long)]
    vspace: Option<i64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("synted: {message}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_spec(path: &Path) -> Result<GrammarSpec, String> {
    let spec = parse_spec(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let problems = validate_spec(&spec);
    if problems.is_empty() {
        Ok(spec)
    } else {
        let lines: Vec<String> = problems.iter().map(|d| format!("  {}: {d}", d.rule)).collect();
        Err(format!("{}: invalid spec\n{}", path.display(), lines.join("\n")))
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    let mut out = io::stdout().lock();
    let mut emit = |text: &str| out.write_all(text.as_bytes()).map_err(|e| e.to_string());
    match command {
        Command::Check { spec } => {
            let spec = load_spec(&spec)?;
            emit(&format!(
                "{}: {} classes, {} productions, {} leaves, {} pretty rules, {} sugar rules\n",
                spec.name,
                spec.classes.len(),
                spec.productions.len(),
                spec.leaves.len(),
                spec.pretty_rules.len(),
                spec.sugar_rules.len()
            ))?;
        }
        Command::Parse { spec, file } => {
            let spec = load_spec(&spec)?;
            let text = read(&file)?;
            let outcome = parse_text(&spec, &text).map_err(|e| format!("{}: {e}", file.display()))?;
            emit(&synted_core::ast::write_doc(&outcome.doc))?;
        }
        Command::Pretty { spec, astfile, tab_width } => {
            let spec = load_spec(&spec)?;
            let doc = read_doc(&read(&astfile)?, &spec).map_err(|e| format!("{}: {e}", astfile.display()))?;
            let text = pretty_print(&doc, doc.root(), &spec, tab_width).map_err(|e| e.to_string())?;
            emit(&text)?;
            emit("\n")?;
        }
        Command::Roundtrip { spec, file, json } => {
            let spec = load_spec(&spec)?;
            let report = roundtrip_check(&spec, &read(&file)?).map_err(|e| format!("{}: {e}", file.display()))?;
            if json {
                emit(&serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?)?;
                emit("\n")?;
            } else {
                emit(&report.render())?;
            }
            return Ok(if report.identical { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Complete { spec, class } => {
            let spec = load_spec(&spec)?;
            let items = spec.completions_of_class(&class).map_err(|e| e.to_string())?;
            for item in items {
                emit(&format!("{item}\n"))?;
            }
        }
        Command::Serve(args) => serve(args)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn session(args: &ServeArgs, spec: &GrammarSpec) -> Result<Session, String> {
    let store = match &args.store {
        Some(dir) => Some(Store::open(dir).map_err(|e| format!("{}: {e}", dir.display()))?),
        None => None,
    };
    let mut config = SessionConfig::default();
    if let Some(t) = args.tab_width {
        config.tab_width = t;
    }
    if let Some(h) = args.hspace {
        config.layout.hspace = h;
    }
    if let Some(v) = args.vspace {
        config.layout.vspace = v;
    }
    Ok(Session::new(spec.clone(), store, config))
}

fn serve(args: ServeArgs) -> Result<(), String> {
    let spec = match &args.spec {
        Some(path) => load_spec(path)?,
        None => builtin_demo_spec(),
    };
    if args.stdio {
        let mut s = session(&args, &spec)?;
        return serve_stream(&mut s, io::stdin().lock(), io::stdout().lock()).map_err(|e| e.to_string());
    }
    let addr = args.listen.as_deref().expect("clap requires --listen or --stdio");
    let listener = TcpListener::bind(addr).map_err(|e| format!("{addr}: {e}"))?;
    eprintln!("synted: listening on {}", listener.local_addr().map_err(|e| e.to_string())?);
    // One client at a time, each with a fresh session.
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("synted: accept failed: {e}");
                continue;
            }
        };
        let mut s = session(&args, &spec)?;
        let reader = BufReader::new(stream.try_clone().map_err(|e| e.to_string())?);
        if let Err(e) = serve_stream(&mut s, reader, stream) {
            eprintln!("synted: connection closed: {e}");
        }
        if s.is_shut_down() {
            break;
        }
    }
    Ok(())
}
