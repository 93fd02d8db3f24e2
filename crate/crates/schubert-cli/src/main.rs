use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use schubert::equations::{
    count_solutions, minor_system, pillar_sufficiency, Scope, Semantics, DEFAULT_POINT_BUDGET,
};
use schubert::pillar::{truncate, PillarSet, RotheDiagram, RotheFlavor};
use schubert::rank::{essential_entries, pillar_entries, PillarEntry, RankMatrix};
use schubert::tables::{classification_cached, codim1_report, codim2_count, DimensionTable};
use schubert::transpose::{cone_class, known_gaps, DEFAULT_CLASSIFY_CAP};
use schubert::{Error, Permutation};

#[derive(Parser)]
#[command(name = "schubert", version, about = "Rank matrices, pillar entries and tangent-cone classes")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Classification cache file (read when it matches, written otherwise).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Point budget for finite-field sweeps.
    #[arg(long, global = true, default_value_t = DEFAULT_POINT_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Pillar,
    All,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Scope {
        match s {
            ScopeArg::Pillar => Scope::Pillar,
            ScopeArg::All => Scope::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Cell,
    Variety,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Semantics {
        match s {
            SemanticsArg::Cell => Semantics::Cell,
            SemanticsArg::Variety => Semantics::Variety,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Standard,
    Opposite,
}

#[derive(Subcommand)]
enum Command {
    /// Print the rank matrix of a permutation, with pillar and essential
    /// entries marked.
    Rank { perm: String },
    /// List the pillar entries of a permutation.
    Pillars { perm: String },
    /// List the essential entries of a permutation.
    Essential { perm: String },
    /// Render the dot diagram (standard or opposite shading).
    Rothe {
        perm: String,
        #[arg(long, value_enum, default_value_t = FlavorArg::Standard)]
        flavor: FlavorArg,
    },
    /// Rebuild the permutation from a pillar set like "n=5; 1,3=1; 2,4=2".
    Reconstruct { pillars: String },
    /// Codimension of the cell with the given pillar set.
    Codim { pillars: String },
    /// Truncation trc_t: keep only the first t linked pillar classes.
    Truncate {
        perm: String,
        #[arg(long)]
        t: usize,
    },
    /// All permutations sharing the tangent cone of the given one (closure
    /// under admissible partial transpositions).
    ConeClass { perm: String },
    /// Partition S_n into tangent-cone classes.
    Classify {
        #[arg(long)]
        n: usize,
        /// Break the class count down by dimension.
        #[arg(long)]
        by_dim: bool,
        /// Report class sizes that are not powers of two.
        #[arg(long)]
        check_pow2: bool,
        /// Report equal-pillar transposed classes the closure did not merge.
        #[arg(long)]
        known_gaps: bool,
    },
    /// Dimension table: Schubert varieties vs cone classes per dimension.
    Tables {
        #[arg(long)]
        n: usize,
    },
    /// Polynomial rank-condition systems for a permutation.
    Equations {
        perm: String,
        #[arg(long, value_enum, default_value_t = ScopeArg::Pillar)]
        scope: ScopeArg,
    },
    /// Count F_q points satisfying the rank conditions.
    Count {
        perm: String,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = ScopeArg::Pillar)]
        scope: ScopeArg,
        #[arg(long, value_enum, default_value_t = SemanticsArg::Variety)]
        semantics: SemanticsArg,
    },
    /// Check that pillar-only and all-entries systems cut the same set
    /// over F_q, for every permutation of S_n.
    VerifyPillarSufficiency {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
    },
    /// Probe the power-of-two conjecture on class sizes.
    CheckPow2 {
        #[arg(long)]
        n: usize,
    },
    /// Classes with identical pillar data (up to transposition) that the
    /// closure keeps apart.
    KnownGaps {
        #[arg(long)]
        n: usize,
    },
}

fn parse_perm(s: &str) -> Result<Permutation, Error> {
    s.parse()
}

fn entries_out(entries: &[PillarEntry], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(entries).unwrap(),
        Format::Csv => {
            let mut out = String::from("row,col,value\n");
            for e in entries {
                out.push_str(&format!("{},{},{}\n", e.row, e.col, e.value));
            }
            out
        }
        Format::Text => entries
            .iter()
            .map(|e| format!("({},{}) = {}", e.row, e.col, e.value))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Rank { perm } => {
            let w = parse_perm(&perm)?;
            let r = RankMatrix::from_permutation(&w);
            match cli.format {
                Format::Json => {
                    let n = r.n();
                    let rows: Vec<Vec<i16>> = (0..=n)
                        .map(|i| (0..=n).map(|j| r.get(i, j)).collect())
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "permutation": w,
                            "entries": rows,
                            "pillars": r.pillar_entries(),
                            "essential": r.essential_entries(),
                        }))
                        .unwrap()
                    );
                }
                _ => print!("{}", r.render()),
            }
        }
        Command::Pillars { perm } => {
            let w = parse_perm(&perm)?;
            println!("{}", entries_out(&pillar_entries(&w), cli.format));
        }
        Command::Essential { perm } => {
            let w = parse_perm(&perm)?;
            println!("{}", entries_out(&essential_entries(&w), cli.format));
        }
        Command::Rothe { perm, flavor } => {
            let w = parse_perm(&perm)?;
            let flavor = match flavor {
                FlavorArg::Standard => RotheFlavor::Standard,
                FlavorArg::Opposite => RotheFlavor::Opposite,
            };
            let d = RotheDiagram::new(&w, flavor);
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "permutation": w,
                        "frontier": d.frontier_cells(),
                        "white_cells": d.white_count(),
                        "diagram": d.render(),
                    }))
                    .unwrap()
                ),
                _ => print!("{}", d.render()),
            }
        }
        Command::Reconstruct { pillars } => {
            let set: PillarSet = pillars.parse()?;
            let w = set.reconstruct()?;
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string(&w).unwrap()),
                _ => println!("{w}"),
            }
        }
        Command::Codim { pillars } => {
            let set: PillarSet = pillars.parse()?;
            println!("{}", set.codim()?);
        }
        Command::Truncate { perm, t } => {
            let w = parse_perm(&perm)?;
            let result = truncate(&w, t)?;
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string(&result).unwrap()),
                _ => println!("{result}"),
            }
        }
        Command::ConeClass { perm } => {
            let w = parse_perm(&perm)?;
            let class = cone_class(&w);
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&class).unwrap()),
                _ => {
                    for v in class {
                        println!("{v}");
                    }
                }
            }
        }
        Command::Classify {
            n,
            by_dim,
            check_pow2,
            known_gaps: report_gaps,
        } => {
            let c = classification_cached(n, DEFAULT_CLASSIFY_CAP, cli.cache.as_deref())?;
            match cli.format {
                Format::Json => {
                    let mut body = json!({
                        "n": n,
                        "total": c.total(),
                    });
                    if by_dim {
                        body["by_dimension"] = json!(c.count_by_dimension());
                    }
                    if check_pow2 {
                        let bad: Vec<_> = c
                            .non_power_of_two_classes()
                            .iter()
                            .map(|cl| json!({"size": cl.len(), "representative": cl[0]}))
                            .collect();
                        body["non_power_of_two"] = json!(bad);
                    }
                    if report_gaps {
                        body["known_gaps"] = json!(known_gaps(&c));
                    }
                    println!("{}", serde_json::to_string_pretty(&body).unwrap());
                }
                format => {
                    if by_dim && format == Format::Csv {
                        print!("{}", DimensionTable::from_classification(&c).render_csv());
                    } else if by_dim {
                        print!("{}", DimensionTable::from_classification(&c).render_text());
                    } else {
                        println!("n = {n}: {} classes", c.total());
                    }
                    if check_pow2 {
                        let bad = c.non_power_of_two_classes();
                        if bad.is_empty() {
                            println!("all class sizes are powers of 2");
                        } else {
                            for cl in bad {
                                println!("size {} class led by {}", cl.len(), cl[0]);
                            }
                        }
                    }
                    if report_gaps {
                        for gap in known_gaps(&c) {
                            let reps: Vec<String> =
                                gap.representatives.iter().map(|r| r.to_string()).collect();
                            println!("colength {}: {}", gap.colength, reps.join(" | "));
                        }
                    }
                }
            }
        }
        Command::Tables { n } => {
            let c = classification_cached(n, DEFAULT_CLASSIFY_CAP, cli.cache.as_deref())?;
            let t = DimensionTable::from_classification(&c);
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&t).unwrap()),
                Format::Csv => print!("{}", t.render_csv()),
                Format::Text => {
                    print!("{}", t.render_text());
                    if n >= 4 {
                        let (v1, c1) = codim1_report(n);
                        println!("codim 1: {v1} varieties, {c1} cones");
                        println!("codim 2 closed form: {}", codim2_count(n)?);
                    }
                }
            }
        }
        Command::Equations { perm, scope } => {
            let w = parse_perm(&perm)?;
            let sys = minor_system(&w, scope.into());
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&sys).unwrap()),
                _ => {
                    for cond in &sys.conditions {
                        println!(
                            "position ({},{}) rank <= {}:",
                            cond.position.0, cond.position.1, cond.bound
                        );
                        if cond.generators.is_empty() {
                            println!("  (no constraint)");
                        }
                        for g in &cond.generators {
                            println!("  {g} = 0");
                        }
                    }
                }
            }
        }
        Command::Count {
            perm,
            q,
            scope,
            semantics,
        } => {
            let w = parse_perm(&perm)?;
            let count = count_solutions(&w, q, scope.into(), semantics.into(), cli.budget)?;
            match cli.format {
                Format::Json => println!(
                    "{}",
                    json!({"permutation": w, "q": q, "count": count})
                ),
                _ => println!("{count}"),
            }
        }
        Command::VerifyPillarSufficiency { n, q } => {
            let count: u64 = (1..=n as u64).product();
            for r in 0..count {
                let w = Permutation::from_lehmer_rank(n, r);
                let report = pillar_sufficiency(&w, q, cli.budget)?;
                if !report.agree {
                    println!(
                        "MISMATCH w={w} q={q} first divergence at point {}",
                        report.first_divergence.unwrap()
                    );
                    return Ok(4);
                }
            }
            println!("pillar systems match all-entries systems for all of S_{n} over F_{q}");
        }
        Command::CheckPow2 { n } => {
            let c = classification_cached(n, DEFAULT_CLASSIFY_CAP, cli.cache.as_deref())?;
            let bad = c.non_power_of_two_classes();
            if bad.is_empty() {
                println!("n = {n}: all {} class sizes are powers of 2", c.total());
            } else {
                for cl in &bad {
                    println!("size {} class led by {}", cl.len(), cl[0]);
                }
                println!("n = {n}: {} classes break the power-of-2 pattern", bad.len());
            }
        }
        Command::KnownGaps { n } => {
            let c = classification_cached(n, DEFAULT_CLASSIFY_CAP, cli.cache.as_deref())?;
            let gaps = known_gaps(&c);
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&gaps).unwrap()),
                _ => {
                    if gaps.is_empty() {
                        println!("no equal-pillar transposed classes left unmerged for n = {n}");
                    }
                    for gap in gaps {
                        let reps: Vec<String> =
                            gap.representatives.iter().map(|r| r.to_string()).collect();
                        println!("colength {}: {}", gap.colength, reps.join(" | "));
                    }
                }
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot size thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::ResourceLimit(_) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
