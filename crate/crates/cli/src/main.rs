use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use epw::geometry::{mesh_boundary, read_mesh, write_boundary_csv, Domain};
use epw::sampling::{SamplingStrategy, SetKind};
use epw_cli::experiments::{
    mesh_info, run_fundamental, run_random_expansion, run_spherical_modes, run_svd_spectrum, sample_set,
};
use epw_cli::output::{to_csv, write_run};
use epw_cli::settings::{DomainSpec, ExperimentName, ExperimentSpec, Normalization, Settings};
use epw_cli::Result;

#[derive(Parser)]
#[command(name = "epw", version, about = "Evanescent plane wave approximation experiments")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Approximate the spherical waves b_l^0 with one sampling matrix per set.
    SphericalModes(Common),
    /// Reconstruct a random spherical-wave expansion over a sweep of P/N.
    RandomExpansion(Common),
    /// Reconstruct the field of an exterior point source.
    Fundamental(Common),
    /// Singular values and epsilon-ranks of sampling matrices.
    SvdSpectrum(Common),
    /// Dump the parameters and scales of one approximation set.
    SampleSet(Common),
    /// Topology and area of a mesh file; with --s, export boundary nodes.
    MeshInfo {
        path: PathBuf,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Set size, or a comma-separated sweep.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    #[arg(long)]
    l: Option<usize>,
    /// Boundary sample count.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// ball, cube or mesh:<path>.
    #[arg(long, value_parser = parse_domain)]
    domain: Option<DomainSpec>,
    #[arg(long, value_parser = parse_set)]
    set: Option<SetKind>,
    /// density, linf or none.
    #[arg(long, value_parser = parse_norm)]
    normalization: Option<Normalization>,
    /// Source distance to the domain, in wavelengths.
    #[arg(long)]
    offset: Option<f64>,
    #[arg(long)]
    max_ell: Option<usize>,
    /// deterministic, quasi-random or random.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<SamplingStrategy>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reduced sizes (kappa = 4 unless given).
    #[arg(long)]
    quick: bool,
}

fn parse_domain(s: &str) -> std::result::Result<DomainSpec, String> {
    s.parse().map_err(|e: epw_cli::CliError| e.to_string())
}

fn parse_norm(s: &str) -> std::result::Result<Normalization, String> {
    s.parse().map_err(|e: epw_cli::CliError| e.to_string())
}

fn parse_set(s: &str) -> std::result::Result<SetKind, String> {
    match s {
        "epw" => Ok(SetKind::Epw),
        "ppw" => Ok(SetKind::Ppw),
        _ => Err(format!("set `{s}` is not epw or ppw")),
    }
}

fn parse_strategy(s: &str) -> std::result::Result<SamplingStrategy, String> {
    match s {
        "deterministic" => Ok(SamplingStrategy::Deterministic),
        "quasi-random" => Ok(SamplingStrategy::QuasiRandom),
        "random" => Ok(SamplingStrategy::Random),
        _ => Err(format!("strategy `{s}` is not deterministic, quasi-random or random")),
    }
}

impl Common {
    fn settings(self) -> Result<Settings> {
        let base = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let flags = Settings {
            kappa: self.kappa,
            p: self.p,
            l: self.l,
            s: self.s,
            epsilon: self.epsilon,
            seed: self.seed,
            domain: self.domain,
            set: self.set,
            normalization: self.normalization,
            offset: self.offset,
            max_ell: self.max_ell,
            strategy: self.strategy,
            out: self.out,
            quick: self.quick.then_some(true),
        };
        Ok(base.overlay(flags))
    }
}

fn out_dir(settings: &Settings, name: &str) -> PathBuf {
    settings.out.clone().unwrap_or_else(|| PathBuf::from("out").join(name))
}

fn experiment(name: ExperimentName, common: Common) -> Result<()> {
    let settings = common.settings()?;
    let spec = ExperimentSpec::new(name, &settings)?;
    let dir = out_dir(&settings, name.as_str());
    let (tables, wall) = match name {
        ExperimentName::SphericalModes => {
            let r = run_spherical_modes(&spec)?;
            (vec![("modes.csv", to_csv(&r.rows)?)], r.wall_time)
        }
        ExperimentName::RandomExpansion => {
            let r = run_random_expansion(&spec)?;
            (vec![("random_expansion.csv", to_csv(&r.rows)?)], r.wall_time)
        }
        ExperimentName::Fundamental => {
            let r = run_fundamental(&spec)?;
            (vec![("fundamental.csv", to_csv(&r.rows)?)], r.wall_time)
        }
        ExperimentName::SvdSpectrum => {
            let r = run_svd_spectrum(&spec)?;
            (vec![("ranks.csv", to_csv(&r.ranks)?), ("spectrum.csv", to_csv(&r.spectrum)?)], r.wall_time)
        }
    };
    write_run(&dir, name.as_str(), &spec, &tables, wall, None)?;
    println!("{} -> {}", name.as_str(), dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.verb {
        Verb::SphericalModes(c) => experiment(ExperimentName::SphericalModes, c),
        Verb::RandomExpansion(c) => experiment(ExperimentName::RandomExpansion, c),
        Verb::Fundamental(c) => experiment(ExperimentName::Fundamental, c),
        Verb::SvdSpectrum(c) => experiment(ExperimentName::SvdSpectrum, c),
        Verb::SampleSet(c) => {
            let settings = c.settings()?;
            let spec = ExperimentSpec::new(ExperimentName::SphericalModes, &settings)?;
            let t0 = std::time::Instant::now();
            let (set, rows) = sample_set(&spec)?;
            let dir = out_dir(&settings, "sample-set");
            let summary = serde_json::json!({ "kind": set.kind, "p": set.len(), "trunc": set.trunc });
            write_run(&dir, "sample-set", &spec, &[("set.csv", to_csv(&rows)?)], t0.elapsed().as_secs_f64(), Some(summary))?;
            println!("sample-set -> {}", dir.display());
            Ok(())
        }
        Verb::MeshInfo { path, s, out } => {
            let mesh = read_mesh(&path)?;
            let info = mesh_info(&mesh);
            println!("{}", serde_json::to_string_pretty(&info)?);
            if let Some(s) = s {
                let dom = Domain::from_mesh(mesh)?;
                let bs = mesh_boundary(&dom, s)?;
                let dir = out.unwrap_or_else(|| PathBuf::from("out").join("mesh-info"));
                std::fs::create_dir_all(&dir)?;
                write_boundary_csv(&bs, std::fs::File::create(dir.join("boundary.csv"))?)?;
                std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&info)? + "\n")?;
                println!("boundary nodes -> {}", dir.join("boundary.csv").display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
