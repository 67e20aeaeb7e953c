use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use stratovar::shell::{generate_mesh, load_model, meshio::write_mesh, run, Command, ModelConfig, RunReport};

#[derive(Parser)]
#[command(name = "stratovar", version, about = "Linearized elastic-gravitational deformation and rupture kernels")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Model configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the report and artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for the parallel kernels.
    #[arg(long, env = "STRATOVAR_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Sub {
    /// Symmetry, pressure-invariance and fluid closed-form checks of the constitutive tensors.
    CheckTensors(Common),
    /// Radial profiles, quadrature potential and multipole decay.
    Gravity(Common),
    /// Assembles K, M, C and checks the discrete action.
    Assemble(Common),
    /// Lowest normal modes.
    Eigen(Common),
    /// Conservative time integration from a random state.
    Evolve(Common),
    /// Spring-slider stability sweep.
    Slider(Common),
    /// Rate-and-state rupture on the FAULT faces.
    Fault(Common),
    /// Every suite.
    VerifyAll(Common),
    /// Writes the configured mesh as `mesh.txt`.
    GenerateMesh(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Sub::CheckTensors(c) => (Some(Command::CheckTensors), c),
        Sub::Gravity(c) => (Some(Command::Gravity), c),
        Sub::Assemble(c) => (Some(Command::Assemble), c),
        Sub::Eigen(c) => (Some(Command::Eigen), c),
        Sub::Evolve(c) => (Some(Command::Evolve), c),
        Sub::Slider(c) => (Some(Command::Slider), c),
        Sub::Fault(c) => (Some(Command::Fault), c),
        Sub::VerifyAll(c) => (Some(Command::VerifyAll), c),
        Sub::GenerateMesh(c) => (None, c),
    };
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    if let Err(e) = std::fs::create_dir_all(&common.out) {
        eprintln!("error: {}: {e}", common.out.display());
        return ExitCode::from(2);
    }
    match cmd {
        Some(cmd) => run_command(cmd, &common),
        None => generate(&common),
    }
}

fn run_command(cmd: Command, common: &Common) -> ExitCode {
    let mut report = RunReport::new(cmd.name());
    match load_model(&common.config) {
        Ok(loaded) => {
            // errors are recorded in the report
            let _ = run(cmd, &loaded, &common.out, &mut report);
        }
        Err(e) => {
            report.error = Some(format!("{}: {e}", common.config.display()));
            report.finish(0.0);
        }
    }
    let path = common.out.join("report.toml");
    if let Err(e) = report.write(&path) {
        eprintln!("error: writing {}: {e}", path.display());
        return ExitCode::from(2);
    }
    print!("{}", report.summary());
    if report.passed {
        return ExitCode::SUCCESS;
    }
    for c in report.failures() {
        eprintln!("failed check: {}/{}", c.suite, c.name);
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    ExitCode::FAILURE
}

fn generate(common: &Common) -> ExitCode {
    let result = std::fs::read_to_string(&common.config)
        .map_err(stratovar::Error::from)
        .and_then(|t| ModelConfig::parse(&t))
        .and_then(|cfg| generate_mesh(&cfg, common.config.parent().unwrap_or(std::path::Path::new("."))));
    match result {
        Ok(mesh) => {
            let path = common.out.join("mesh.txt");
            if let Err(e) = std::fs::write(&path, write_mesh(&mesh)) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
            println!("wrote {} ({} nodes, {} cells, {} faces)", path.display(), mesh.nodes.len(), mesh.cells.len(), mesh.faces.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
