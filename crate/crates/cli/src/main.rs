use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use grade3_core::engine::presentation_from_linked_json;
use grade3_core::planner::{realize_with_cap, DEFAULT_MAX_SEARCH};
use grade3_core::{
    arranged_presentation, atlas_grid, canonical_presentation, classify, is_permissible, mapping_cone_presentation,
    verify_certificate, verify_linkage_theorems, ArrangementId, ClassLabel, ClassifierReport, DerivationCertificate,
    Error, Format, LinkSpec, RealizeOutcome, Status, TorPresentation,
};

const OK: u8 = 0;
const NO: u8 = 1;
const UNKNOWN: u8 = 2;
const INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "grade3", version, about = "Grade-3 Tor algebras: classification, permissibility, linkage, certificates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a presentation (or linked presentation) document
    Classify { file: PathBuf },
    /// Write the normal-form table of a class in a format
    Canonical {
        class: ClassLabel,
        m: usize,
        n: usize,
        #[arg(long)]
        arrangement: Option<ArrangementId>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Decide whether a class can occur in a format
    Permissible { class: ClassLabel, m: usize, n: usize },
    /// Grid of H(p,q) labels in a format
    Atlas {
        m: usize,
        n: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Link a presentation through the mapping cone
    Link {
        file: PathBuf,
        #[arg(long = "t", value_parser = clap::value_parser!(u8).range(0..=3))]
        t: u8,
        #[arg(long)]
        phi2: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Search for a linkage derivation of a (class, format) pair
    Realize {
        class: ClassLabel,
        m: usize,
        n: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Check the linkage rule tables against the mapping-cone engine
    VerifyTheorems {
        #[arg(long = "max-m", default_value_t = 10)]
        max_m: usize,
        #[arg(long = "max-n", default_value_t = 8)]
        max_n: usize,
    },
    /// Replay a derivation certificate
    VerifyCert { file: PathBuf },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::OutOfDomain(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, body: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, format!("{body}\n")).map_err(|e| Error::OutOfDomain(format!("{}: {e}", p.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn load_presentation(path: &Path) -> Result<TorPresentation, Error> {
    let s = read(path)?;
    let v: serde_json::Value = serde_json::from_str(&s)?;
    if v.get("splits").is_some() {
        presentation_from_linked_json(&s)
    } else {
        TorPresentation::from_json(&s)
    }
}

fn report_line(rep: &ClassifierReport, f: Format) -> String {
    let label = rep.label.map_or("unclassifiable".to_string(), |c| c.to_string());
    format!(
        "class {label} format {f} (p,q,r,s1) = ({},{},{},{})",
        rep.p, rep.q, rep.r, rep.s1
    )
}

fn label_code(rep: &ClassifierReport) -> u8 {
    if rep.label.is_some() {
        OK
    } else {
        UNKNOWN
    }
}

fn run(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Classify { file } => {
            let a = load_presentation(&file)?;
            let rep = classify(&a);
            println!("{}", report_line(&rep, a.format()?));
            Ok(label_code(&rep))
        }
        Cmd::Canonical {
            class,
            m,
            n,
            arrangement,
            output,
        } => {
            let f = Format::new(m, n)?;
            let a = match arrangement {
                Some(arr) => arranged_presentation(class, f, arr)?,
                None => canonical_presentation(class, f)?,
            };
            write_or_print(output.as_deref(), &a.to_json())?;
            Ok(OK)
        }
        Cmd::Permissible { class, m, n } => {
            let f = Format::new(m, n)?;
            let v = is_permissible(class, f);
            println!("{class}@{f}: {}", v.status);
            for r in &v.violated_rules {
                println!("  {} [{}] {}", r.id, r.cite, r.text);
            }
            Ok(match v.status {
                Status::Permissible => OK,
                Status::NotPermissible => NO,
                Status::UnknownNecessaryOnly => UNKNOWN,
            })
        }
        Cmd::Atlas { m, n, csv } => {
            let g = atlas_grid(Format::new(m, n)?);
            if csv {
                print!("{}", g.render_csv());
            } else {
                print!("{}", g.render_text());
            }
            Ok(OK)
        }
        Cmd::Link { file, t, phi2, output } => {
            let a = load_presentation(&file)?;
            let linked = mapping_cone_presentation(&a, LinkSpec::new(t as usize, phi2))?;
            let rep = linked.classify();
            let line = report_line(&rep, linked.format());
            match output {
                Some(p) => {
                    write_or_print(Some(&p), &linked.to_json())?;
                    println!("{line}");
                }
                None => {
                    println!("{}", linked.to_json());
                    eprintln!("{line}");
                }
            }
            Ok(label_code(&rep))
        }
        Cmd::Realize { class, m, n, output } => {
            let f = Format::new(m, n)?;
            let cap = match std::env::var("GRADE3_MAX_SEARCH") {
                Ok(s) => s
                    .parse()
                    .map_err(|_| Error::OutOfDomain(format!("GRADE3_MAX_SEARCH={s} is not a count")))?,
                Err(_) => DEFAULT_MAX_SEARCH,
            };
            match realize_with_cap(class, f, cap) {
                RealizeOutcome::Certificate(c) => {
                    match output {
                        Some(p) => {
                            write_or_print(Some(&p), &c.to_json())?;
                            print!("{}", c.render_text());
                        }
                        None => println!("{}", c.to_json()),
                    }
                    Ok(OK)
                }
                RealizeOutcome::NotPermissible(v) => {
                    println!("{class}@{f}: {}", v.status);
                    for r in &v.violated_rules {
                        println!("  {} [{}] {}", r.id, r.cite, r.text);
                    }
                    Ok(NO)
                }
                RealizeOutcome::NotFound(why) => {
                    println!("{class}@{f}: not found: {why}");
                    Ok(UNKNOWN)
                }
            }
        }
        Cmd::VerifyTheorems { max_m, max_n } => {
            let r = verify_linkage_theorems(max_m, max_n);
            print!("{}", r.render_text());
            Ok(if r.all_passed() { OK } else { NO })
        }
        Cmd::VerifyCert { file } => {
            let c = DerivationCertificate::from_json(&read(&file)?)?;
            if verify_certificate(&c) {
                println!("valid: {}@{} in {} steps", c.target.0, c.target.1, c.steps.len());
                Ok(OK)
            } else {
                println!("invalid");
                Ok(NO)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => OK,
                _ => INVALID,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.to_string().lines().next().unwrap_or_default());
            ExitCode::from(INVALID)
        }
    }
}
