use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use noisy_lstar::experiment::{
    bucketing_csv, eld_sweep, generate_target, records_csv, run_experiment_with_trajectories,
    run_single, summary_csv, sweep_epsdelta, sweep_mu, write_experiment_outputs, ExperimentConfig,
    NoiseKind, Profile, SweepCell, EPSDELTA_GRID, MU_GRID,
};
use noisy_lstar::lstar::learn;
use noisy_lstar::structure::{eld_bruteforce, is_equal_length_distinguishing};
use noisy_lstar::{
    estimate_distance, CounterDfaOracle, Dfa, LanguageOracle, LearnerConfig, MuDistribution,
    NoisyInputOracle, NoisyOutputOracle, RngKey,
};

#[derive(Parser)]
#[command(
    name = "noisy-lstar",
    version,
    about = "PAC L* learning over noisy DFA devices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random target DFAs into --out.
    Gen(Common),
    /// Learn one noisy device and report the three distances.
    Learn {
        #[command(flatten)]
        common: Common,
        /// DFA file to learn; defaults to generated DFA number --dfa-id.
        #[arg(long)]
        dfa: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        dfa_id: usize,
    },
    /// Full pipeline: records.csv, summary.csv, config.json and DFA files.
    Experiment(Common),
    /// Equal-length-distinguishing check on a DFA file.
    Eld {
        dfa: PathBuf,
        /// Also run the brute-force enumeration up to this word length.
        #[arg(long)]
        brute_force: Option<usize>,
    },
    /// Average gain for each (p, mu) pair.
    SweepMu {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        mus: Option<Vec<f64>>,
    },
    /// Average gain for each (p, epsilon = delta) pair.
    SweepEpsdelta {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
    /// Noisy-input experiment over 3-letter DFAs, split by the ELD flag.
    EldSweep(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Output,
    Input,
    Counter,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Paper,
    Desk,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, value_enum, default_value = "output")]
    noise: NoiseArg,
    /// Comma-separated noise probabilities.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long)]
    num_dfas: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    maxround: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "desk")]
    profile: ProfileArg,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Record the distance every 20 rounds into trajectory.csv.
    #[arg(long)]
    trajectory: bool,
    /// Add the ELD flag to each record.
    #[arg(long)]
    eld: bool,
    /// Write wall_ms = 0 so that outputs are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let kind = match self.noise {
            NoiseArg::Output => NoiseKind::NoisyOutput,
            NoiseArg::Input => NoiseKind::NoisyInput,
            NoiseArg::Counter => NoiseKind::Counter,
        };
        let profile = match self.profile {
            ProfileArg::Paper => Profile::Paper,
            ProfileArg::Desk => Profile::Desk,
        };
        let mut c = ExperimentConfig::new(kind, profile);
        if let Some(p) = &self.p {
            c.p_values = p.clone();
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { c.$f = v; })* };
        }
        set!(num_dfas, mu, alpha, gamma, epsilon, delta, maxround);
        c.master_seed = self.seed;
        c.trajectory = self.trajectory;
        c.eld_partition = self.eld;
        c.record_timing = !self.no_timing;
        c.validate()?;
        Ok(c)
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(common) => gen(&common),
        Command::Learn {
            common,
            dfa,
            dfa_id,
        } => learn_one(&common, dfa.as_deref(), dfa_id),
        Command::Experiment(common) => experiment(&common),
        Command::Eld { dfa, brute_force } => eld(&dfa, brute_force),
        Command::SweepMu { common, mus } => {
            let cfg = common.config()?;
            let cells = sweep_mu(&cfg, mus.as_deref().unwrap_or(&MU_GRID))?;
            emit_sweep(&common.out, "sweep_mu.csv", "mu", &cells)
        }
        Command::SweepEpsdelta { common, values } => {
            let cfg = common.config()?;
            let cells = sweep_epsdelta(&cfg, values.as_deref().unwrap_or(&EPSDELTA_GRID))?;
            emit_sweep(&common.out, "sweep_epsdelta.csv", "epsilon_delta", &cells)
        }
        Command::EldSweep(common) => eld_sweep_cmd(&common),
    }
}

fn gen(common: &Common) -> Result<()> {
    let cfg = common.config()?;
    fs::create_dir_all(&common.out)?;
    for id in 0..cfg.num_dfas {
        let dfa = generate_target(&cfg, id)?;
        let path = common.out.join(format!("dfa_{id:03}.txt"));
        fs::write(&path, dfa.to_text())?;
        println!(
            "{}: {} states, {} letters",
            path.display(),
            dfa.num_states(),
            dfa.alphabet().size()
        );
    }
    Ok(())
}

fn learn_one(common: &Common, file: Option<&Path>, dfa_id: usize) -> Result<()> {
    let cfg = common.config()?;
    let p = cfg.noise_levels()[0];
    let Some(path) = file else {
        let dfa = generate_target(&cfg, dfa_id)?;
        let (r, _) = run_single(&cfg, dfa_id, &dfa, 0, p)?;
        println!("rounds: {} ({})", r.rounds, r.terminated_by.as_str());
        println!("d(A, M_N) = {}", r.d_a_mn);
        println!("d(A, A_E) = {}", r.d_a_ae);
        println!("d(M_N, A_E) = {}", r.d_mn_ae);
        println!("gain = {} ({})", r.gain, r.gain_class.as_str());
        return Ok(());
    };

    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let root = RngKey::new(cfg.master_seed);
    let noise_key = root.derive("noise").language(cfg.noise_kind.as_str());
    let p = p.unwrap_or(0.0);
    let (dfa, noisy): (Dfa, Box<dyn LanguageOracle>) = match cfg.noise_kind {
        NoiseKind::Counter => {
            let o = CounterDfaOracle::parse(&text)?;
            (o.base().clone(), Box::new(o))
        }
        NoiseKind::NoisyOutput => {
            let d = Dfa::parse(&text)?;
            (
                d.clone(),
                Box::new(NoisyOutputOracle::new(d, p, noise_key)?),
            )
        }
        NoiseKind::NoisyInput => {
            let d = Dfa::parse(&text)?;
            (d.clone(), Box::new(NoisyInputOracle::new(d, p, noise_key)?))
        }
    };
    let dist = MuDistribution::new(cfg.mu, dfa.alphabet())?;
    let lc = LearnerConfig::new(
        cfg.epsilon,
        cfg.delta,
        cfg.maxround,
        dist,
        root.derive("learner-sampling"),
    )?;
    let result = learn(&*noisy, &lc)?;
    let h = &result.hypothesis;
    let d = |a: &dyn LanguageOracle, b: &dyn LanguageOracle, role: &str| {
        estimate_distance(a, b, &dist, cfg.alpha, cfg.gamma, root.derive(role)).map(|e| e.value)
    };
    println!(
        "rounds: {} ({}), {} states, {} membership queries",
        result.rounds_used,
        result.terminated_by.as_str(),
        h.num_states(),
        result.membership_query_count
    );
    println!("d(A, M_N) = {}", d(&dfa, &*noisy, "distance-A-MN")?);
    println!("d(A, A_E) = {}", d(&dfa, h, "distance-A-AE")?);
    println!("d(M_N, A_E) = {}", d(&*noisy, h, "distance-MN-AE")?);
    fs::create_dir_all(&common.out)?;
    fs::write(common.out.join("hypothesis.txt"), h.to_text())?;
    Ok(())
}

fn experiment(common: &Common) -> Result<()> {
    let cfg = common.config()?;
    let (records, trajectories) = run_experiment_with_trajectories(&cfg)?;
    write_experiment_outputs(&common.out, &cfg, &records, &trajectories)?;
    print!("{}", summary_csv(cfg.noise_kind, &records)?);
    eprintln!(
        "{} records written to {}",
        records.len(),
        common.out.display()
    );
    Ok(())
}

fn eld(path: &Path, brute_force: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let dfa = Dfa::parse(&text)?;
    match is_equal_length_distinguishing(&dfa) {
        Some(w) => {
            println!("ELD: yes");
            println!("q1 = {} (final), w = {}", w.q1, w.w);
            println!("q2 = {} (non-final), w' = {}", w.q2, w.w_prime);
        }
        None => println!("ELD: no"),
    }
    if let Some(max_len) = brute_force {
        let b = eld_bruteforce(&dfa, max_len).is_some();
        println!(
            "brute force (len <= {max_len}): {}",
            if b { "yes" } else { "no" }
        );
    }
    Ok(())
}

fn emit_sweep(out: &Path, file: &str, param: &str, cells: &[SweepCell]) -> Result<()> {
    let mut csv = format!("p,{param},gain,count\n");
    for c in cells {
        csv.push_str(&format!("{},{},{},{}\n", c.p, c.param, c.gain, c.count));
    }
    fs::create_dir_all(out)?;
    fs::write(out.join(file), &csv)?;
    print!("{csv}");
    Ok(())
}

fn eld_sweep_cmd(common: &Common) -> Result<()> {
    let cfg = common.config()?;
    if cfg.noise_kind != NoiseKind::NoisyInput {
        bail!("eld-sweep needs --noise input");
    }
    let s = eld_sweep(&cfg)?;
    fs::create_dir_all(&common.out)?;
    fs::write(common.out.join("records.csv"), records_csv(&s.records))?;
    let (eld, non_eld) = (bucketing_csv(&s.eld), bucketing_csv(&s.non_eld));
    fs::write(common.out.join("eld.csv"), &eld)?;
    fs::write(common.out.join("non_eld.csv"), &non_eld)?;
    println!("ELD DFAs\n{eld}");
    println!("non-ELD DFAs\n{non_eld}");
    Ok(())
}
