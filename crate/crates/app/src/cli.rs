use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use monty_core::game::{DoorPolicy, HostStrategy};
use monty_core::noise::{semiclassical_noise_curve, unit_grid};
use monty_core::stats::{
    find_extrema, noise_sweep, random_expectation, surface_scan, EstimateMethod,
    ExpectationEstimate, ExtremumReport, Method, Quantity, Refiner, SweepQuantity, DEFAULT_NODES,
};
use monty_core::{GameModel, GameSession};

use crate::error::{AppError, AppResult};
use crate::io::{self as fileio, Format, SurfaceDocument};
use crate::server::{self, ServeConfig};
use crate::tables;

#[derive(Debug, Parser)]
#[command(name = "monty", version, about = "Quantum-optical Monty Hall game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Use the polarization-entangled source.
    #[arg(long)]
    pub entangled: bool,
    /// Equal-weight Pauli noise on the player's photon.
    #[arg(long, default_value_t = 0.0)]
    pub noise_p: f64,
}

impl ModelArgs {
    fn model(&self) -> AppResult<GameModel> {
        Ok(GameModel::with_noise(self.entangled, self.noise_p)?)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to the output file's extension, else CSV.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        self.format
            .or_else(|| self.out.as_deref().map(Format::from_path))
            .unwrap_or(Format::Csv)
    }

    fn write(&self, bytes: &[u8]) -> AppResult<()> {
        match &self.out {
            Some(path) => {
                let mut f = BufWriter::new(File::create(path)?);
                f.write_all(bytes)?;
                f.flush()?;
            }
            None => io::stdout().lock().write_all(bytes)?,
        }
        Ok(())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equal-amplitude game with a projector door.
    Semiclassical {
        #[arg(long, default_value_t = 0.0)]
        noise_p: f64,
        /// Box blocked by the door, 1..=3.
        #[arg(long, default_value_t = 1)]
        door: usize,
    },
    /// Expectation over random rotator and door angles.
    RandomExpectation {
        #[command(flatten)]
        model: ModelArgs,
        /// `quad:K` (K nodes per angle) or `mc:N` (N samples, needs --seed).
        #[arg(long, default_value = "quad:16", value_parser = parse_method_spec)]
        method: MethodSpec,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Strategy expectations on a grid of door angles.
    StrategySurface {
        #[command(flatten)]
        model: ModelArgs,
        /// Grid spacing in radians; accepts `pi/N`.
        #[arg(long, default_value = "pi/200", value_parser = parse_angle)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximum and minimum of a surface quantity.
    Extrema {
        /// stay, switch or imbalance.
        #[arg(long, default_value = "switch")]
        quantity: Quantity,
        /// Surface file from `strategy-surface`; computed if absent.
        #[arg(long)]
        surface: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "pi/200", value_parser = parse_angle)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        /// Report grid extrema without golden-section refinement.
        #[arg(long)]
        no_refine: bool,
    },
    /// A quantity as a function of the noise strength p.
    NoiseSweep {
        #[arg(long, value_enum, default_value_t = SweepKind::Random)]
        quantity: SweepKind,
        /// Comma-separated p values.
        #[arg(long, value_delimiter = ',', conflicts_with = "points")]
        grid: Option<Vec<f64>>,
        /// Evenly spaced p values on [0, 1].
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long)]
        entangled: bool,
        #[arg(long, default_value = "quad:16", value_parser = parse_method_spec)]
        method: MethodSpec,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "pi/20", value_parser = parse_angle)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        /// Projector door for the semiclassical curve.
        #[arg(long, default_value_t = 1)]
        door: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Play against a computer host in the terminal.
    Play {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// uniform, or a box number.
        #[arg(long, default_value = "uniform")]
        prize: String,
        #[arg(long, value_enum, default_value_t = DoorKind::RandomProjector)]
        door: DoorKind,
    },
    /// Strategy extrema against their reference values.
    Table2 {
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
    },
    /// Imbalance extrema against their reference values.
    Table3 {
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, default_value = "pi/20", value_parser = parse_angle)]
        step: f64,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "MONTY_PORT", default_value_t = 8080)]
        port: u16,
        /// Concurrent simulation jobs.
        #[arg(long, default_value_t = 2)]
        workers: usize,
        /// Sessions are restored from and saved to this file.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    Random,
    Semiclassical,
    StayExtrema,
    SwitchExtrema,
    ImbalanceExtrema,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DoorKind {
    RandomProjector,
    HelpAlice,
    HurtAlice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSpec {
    MonteCarlo(usize),
    Quadrature(usize),
}

impl MethodSpec {
    fn method(self, seed: Option<u64>) -> AppResult<Method> {
        let method = match self {
            MethodSpec::Quadrature(nodes) => Method::Quadrature { nodes },
            MethodSpec::MonteCarlo(samples) => Method::MonteCarlo {
                samples,
                seed: seed.ok_or_else(|| AppError::Usage("Monte Carlo runs need --seed".into()))?,
            },
        };
        method.validate()?;
        Ok(method)
    }
}

pub fn parse_method_spec(s: &str) -> Result<MethodSpec, String> {
    let (kind, n) = s
        .split_once(':')
        .ok_or_else(|| format!("expected mc:N or quad:K, got {s:?}"))?;
    let n: usize = n.parse().map_err(|_| format!("not a count: {n:?}"))?;
    match kind {
        "mc" => Ok(MethodSpec::MonteCarlo(n)),
        "quad" => Ok(MethodSpec::Quadrature(n)),
        _ => Err(format!("unknown method {kind:?}")),
    }
}

/// Radians, `pi`, or `pi/N`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    match t.split_once('/') {
        None if t == "pi" => Ok(PI),
        Some(("pi", d)) => d
            .parse::<f64>()
            .map(|d| PI / d)
            .map_err(|_| format!("not an angle: {s:?}")),
        _ => Err(format!("not an angle: {s:?}")),
    }
}

fn estimate_line(label: &str, e: &ExpectationEstimate) -> String {
    let how = match e.method {
        EstimateMethod::Quadrature => format!("quadrature, {} nodes", e.count),
        EstimateMethod::MonteCarlo => format!("Monte Carlo, {} samples", e.count),
    };
    format!(
        "{label} = {:.6} +- {:.1e} ({how})\n",
        e.value, e.uncertainty
    )
}

fn extremum_line(r: &ExtremumReport) -> String {
    format!(
        "{:?} {} = {:.6} at phi1 = {:.6}, phi2 = {:.6}\n",
        r.kind,
        r.quantity.name(),
        r.value,
        r.phi1,
        r.phi2
    )
    .to_lowercase()
}

fn print(text: &str) -> AppResult<()> {
    io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn load_surface(path: &Path) -> AppResult<monty_core::stats::SurfaceGrid> {
    fileio::read_surface(File::open(path)?, Format::from_path(path))
}

pub fn run(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::Semiclassical { noise_p, door } => {
            let pt = semiclassical_noise_curve(&[noise_p], door)?[0];
            print(&format!(
                "P_ns = {:.6}\nP_s = {:.6}\nP_s/P_ns = {:.6}\n",
                pt.stay,
                pt.switch,
                pt.switch / pt.stay
            ))
        }
        Command::RandomExpectation {
            model,
            method,
            seed,
            json,
        } => {
            let pair = random_expectation(&model.model()?, &method.method(seed)?)?;
            if json {
                let mut buf = Vec::new();
                fileio::write_json(&pair, &mut buf)?;
                io::stdout().lock().write_all(&buf)?;
                Ok(())
            } else {
                print(
                    &(estimate_line("<P_ns>", &pair.stay) + &estimate_line("<P_s>", &pair.switch)),
                )
            }
        }
        Command::StrategySurface {
            model,
            step,
            nodes,
            output,
        } => {
            let grid = surface_scan(step, &model.model()?, nodes)?;
            let mut buf = Vec::new();
            match output.format() {
                Format::Csv => fileio::write_surface_csv(&grid, &mut buf)?,
                Format::Json => fileio::write_json(
                    &SurfaceDocument {
                        entangled: model.entangled,
                        noise_p: model.noise_p,
                        nodes,
                        grid,
                    },
                    &mut buf,
                )?,
            }
            output.write(&buf)
        }
        Command::Extrema {
            quantity,
            surface,
            model,
            step,
            nodes,
            no_refine,
        } => {
            let m = model.model()?;
            let grid = match surface {
                Some(path) => load_surface(&path)?,
                None => surface_scan(step, &m, nodes)?,
            };
            let refiner = (!no_refine).then(|| Refiner::new(m, nodes));
            let (max, min) = find_extrema(&grid, quantity, refiner.as_ref())
                .ok_or_else(|| AppError::Usage("the surface has no valid cells".into()))?;
            print(&(extremum_line(&max) + &extremum_line(&min)))
        }
        Command::NoiseSweep {
            quantity,
            grid,
            points,
            entangled,
            method,
            seed,
            step,
            nodes,
            door,
            output,
        } => {
            let p_grid = grid.unwrap_or_else(|| unit_grid(points));
            let mut buf = Vec::new();
            let json = output.format() == Format::Json;
            if quantity == SweepKind::Semiclassical {
                let curve = semiclassical_noise_curve(&p_grid, door)?;
                if json {
                    fileio::write_json(&curve, &mut buf)?;
                } else {
                    fileio::write_curve_csv(&curve, &mut buf)?;
                }
            } else {
                let q = match quantity {
                    SweepKind::Random => SweepQuantity::RandomExpectation {
                        method: method.method(seed)?,
                    },
                    kind => SweepQuantity::StrategyExtrema {
                        quantity: match kind {
                            SweepKind::StayExtrema => Quantity::Stay,
                            SweepKind::SwitchExtrema => Quantity::Switch,
                            _ => Quantity::Imbalance,
                        },
                        grid_step: step,
                        nodes,
                        refine: true,
                    },
                };
                let series = noise_sweep(&q, &p_grid, entangled)?;
                if json {
                    fileio::write_json(&series, &mut buf)?;
                } else {
                    fileio::write_sweep_csv(&series, &mut buf)?;
                }
            }
            output.write(&buf)
        }
        Command::Play {
            model,
            seed,
            prize,
            door,
        } => {
            let prize = crate::play::prize_from_name(&prize)
                .ok_or_else(|| AppError::Usage(format!("unknown prize preset {prize:?}")))?;
            let door_policy = match door {
                DoorKind::RandomProjector => DoorPolicy::RandomProjector,
                DoorKind::HelpAlice => DoorPolicy::HelpAlice,
                DoorKind::HurtAlice => DoorPolicy::HurtAlice,
            };
            let mut session = GameSession::new(
                "terminal",
                model.entangled,
                model.noise_p,
                seed.unwrap_or_else(rand::random),
            )?;
            crate::play::run(
                &mut session,
                HostStrategy { prize, door_policy },
                io::stdin().lock(),
                io::stdout().lock(),
            )
        }
        Command::Table2 { nodes } => print(&tables::render(&tables::table_two(nodes)?)),
        Command::Table3 { nodes, step } => {
            print(&tables::render(&tables::table_three(nodes, step)?))
        }
        Command::Serve {
            host,
            port,
            workers,
            snapshot,
        } => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(ServeConfig {
                host,
                port,
                workers,
                snapshot,
            }))
        }
    }
}
