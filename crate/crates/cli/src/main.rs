use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use flatveech::{
    analyze, build_default, constructions::build, load_string, pair_label, render_svg, save_string,
    set_epsilon, AnalysisOptions, Error, Family, FamilySpec, Overlay, RenderOptions,
    TranslationSurface,
};

#[derive(Parser)]
#[command(
    name = "flatveech",
    version,
    about = "Translation surfaces with prescribed finite isometric Veech groups"
)]
struct Cli {
    /// Override the global geometric tolerance.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a surface from the dihedral or cyclic family and write it to a file.
    Build {
        /// `dihedral` or `cyclic`.
        kind: Family,
        /// Group order parameter, at least 3.
        n: usize,
        #[arg(long)]
        l1: Option<f64>,
        #[arg(long)]
        l2: Option<f64>,
        #[arg(long)]
        l3: Option<f64>,
        /// Output surface file.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Analyze a surface file and print the report.
    Analyze {
        path: PathBuf,
        /// Saddle connection length bound (default: three times the shortest).
        #[arg(long)]
        bound: Option<f64>,
        /// Skip the Veech group computation.
        #[arg(long)]
        no_veech: bool,
        /// Also write the structured JSON report here (`-` for stdout instead of text).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Render a surface file as an SVG figure.
    Render {
        path: PathBuf,
        /// Output SVG file.
        #[arg(short, long)]
        out: PathBuf,
        /// Overlays to draw; may be repeated or comma separated.
        #[arg(long, value_enum, value_delimiter = ',')]
        overlay: Vec<OverlayArg>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum OverlayArg {
    Copies,
    Segments,
    Centroids,
}

impl From<OverlayArg> for Overlay {
    fn from(o: OverlayArg) -> Self {
        match o {
            OverlayArg::Copies => Overlay::Copies,
            OverlayArg::Segments => Overlay::Segments,
            OverlayArg::Centroids => Overlay::Centroids,
        }
    }
}

/// Failure classes mapped to exit codes.
enum Failure {
    Validation(anyhow::Error),
    Input(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Input(e.into()),
            _ => Failure::Validation(e.into()),
        }
    }
}

fn io<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Input)
}

fn read_surface(path: &Path) -> Result<(TranslationSurface, Option<FamilySpec>), Failure> {
    let text = io(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
    Ok(load_string(&text)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    io(fs::write(path, contents).with_context(|| format!("writing {}", path.display())))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn pairing_table(surface: &TranslationSurface) -> String {
    let mut out = String::from("pair  edge      edge      holonomy\n");
    for (k, (a, b)) in surface.pairing().pairs.iter().enumerate() {
        let (s, t) = surface.polygons()[a.polygon].edge_points(a.edge);
        let h = t - s;
        out.push_str(&format!(
            "{:<5} {:<9} {:<9} ({}, {})\n",
            pair_label(k),
            a.to_string(),
            b.to_string(),
            fixed(h.x),
            fixed(h.y)
        ));
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(eps) = cli.epsilon {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Failure::Validation(anyhow::anyhow!(
                "--epsilon must be positive"
            )));
        }
        set_epsilon(eps);
    }
    match cli.command {
        Command::Build {
            kind,
            n,
            l1,
            l2,
            l3,
            out,
        } => {
            let built = if l1.is_none() && l2.is_none() && l3.is_none() {
                build_default(kind, n)?
            } else {
                let (d1, d2, d3) = flatveech::default_lengths(kind, n);
                build(FamilySpec {
                    kind,
                    n,
                    l1: l1.unwrap_or(d1),
                    l2: l2.unwrap_or(d2),
                    l3: l3.unwrap_or(d3),
                })?
            };
            write_file(&out, &save_string(&built.surface, Some(built.spec)))?;
            emit(&pairing_table(&built.surface));
            emit(&format!(
                "wrote {} ({} N={}, {} edges, genus {})\n",
                out.display(),
                kind,
                n,
                built.surface.polygons()[0].len(),
                built.surface.genus()
            ));
        }
        Command::Analyze {
            path,
            bound,
            no_veech,
            json,
        } => {
            let (surface, family) = read_surface(&path)?;
            let opts = AnalysisOptions {
                bound,
                veech: !no_veech,
                ..AnalysisOptions::default()
            };
            let report = analyze(&surface, family, &opts)?;
            match json.as_deref() {
                Some(p) if p == Path::new("-") => emit(&report.to_json()),
                Some(p) => {
                    write_file(p, &report.to_json())?;
                    emit(&report.to_text());
                }
                None => emit(&report.to_text()),
            }
            if !report.all_invariants_hold() {
                let failed: Vec<&str> = report
                    .invariants
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                return Err(Failure::Validation(anyhow::anyhow!(
                    "invariant failed: {}",
                    failed.join(", ")
                )));
            }
        }
        Command::Render { path, out, overlay } => {
            let (surface, family) = read_surface(&path)?;
            let overlays: Vec<Overlay> = overlay.into_iter().map(Overlay::from).collect();
            let svg = render_svg(
                &surface,
                family.as_ref(),
                &RenderOptions::with_overlays(&overlays),
            )?;
            write_file(&out, &svg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
