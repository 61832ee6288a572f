use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use symgrass::bases::{random_collineation, PointMap, PointMapJson};
use symgrass::cache::{cache_dir, load_geometry, write_atomic};
use symgrass::grassmannian::Geometry;
use symgrass::reconstruction::{induce, reconstruct, sample_bases, GrassmannianMap, MapJson};
use symgrass::space::SymplecticSpace;
use symgrass::suites::{count_table, in_grid, run, Context, Suite};
use symgrass::Error;

const GRID: &str = "\
Feasibility grid: n ∈ {2, 3}, p ∈ {2, 3, 5}.
Suites using the exactness oracle or clique enumeration need (n, p) ∈ {(2,2), (2,3), (3,2)};
elsewhere they are reported as skipped.
Exit codes: 0 pass, 1 mathematical failure, 2 usage or feasibility error.
The cache directory defaults to $SYMGRASS_CACHE when --cache is absent.";

#[derive(Parser)]
#[command(name = "symgrass", version, about = "Isotropic Grassmannians, base subsets and reconstruction over GF(p)", after_help = GRID)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpaceArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: u32,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grassmannian cache directory.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate every G_k, write the caches and a CSV of |G_k|.
    #[command(after_help = GRID)]
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite and write a JSON report and CSV summary.
    #[command(after_help = GRID)]
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Grassmannian map to test instead of seeded collineations.
        #[arg(long)]
        map: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Write the point map of a seeded random symplectic collineation.
    #[command(after_help = GRID)]
    RandomCollineation {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Write the map induced on G_k by a point embedding.
    #[command(after_help = GRID)]
    Induce {
        embedding: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Recover the point embedding of a Grassmannian map, with a certificate.
    #[command(after_help = GRID)]
    Reconstruct {
        map: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotEmbedding(_) | Error::Defect(_) => Failure::Math(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Enumerate { space, common } => enumerate(&space, &common),
        Command::Verify {
            space,
            suite,
            k,
            seed,
            trials,
            map,
            common,
        } => verify(&space, &suite, k, seed, trials, map.as_deref(), &common),
        Command::RandomCollineation { space, seed, common } => random(&space, seed, &common),
        Command::Induce { embedding, k, common } => induce_cmd(&embedding, k, &common),
        Command::Reconstruct { map, seed, common } => reconstruct_cmd(&map, seed, &common),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn space_of(a: &SpaceArgs) -> Result<SymplecticSpace, Failure> {
    if !in_grid(a.n, a.p) {
        return Err(Failure::Usage(format!(
            "(n, p) = ({}, {}) is outside the feasibility grid n ∈ {{2, 3}}, p ∈ {{2, 3, 5}}",
            a.n, a.p
        )));
    }
    Ok(SymplecticSpace::standard(a.n, a.p)?)
}

fn check_grid(space: &SymplecticSpace) -> Result<(), Failure> {
    space_of(&SpaceArgs {
        n: space.n(),
        p: space.p().into(),
    })
    .map(|_| ())
}

fn geometry(space: &SymplecticSpace, common: &Common) -> Result<Geometry, Failure> {
    let dir = cache_dir(common.cache.as_deref());
    Ok(load_geometry(space, dir.as_deref())?.0)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

/// Writes to `<out>/<name>` or, without `--out`, prints to stdout.
fn emit(common: &Common, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    match &common.out {
        Some(dir) => {
            let path = dir.join(name);
            write_atomic(&path, bytes)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", String::from_utf8_lossy(bytes)),
    }
    Ok(())
}

fn enumerate(args: &SpaceArgs, common: &Common) -> Outcome {
    let space = space_of(args)?;
    let dir = cache_dir(common.cache.as_deref()).or_else(|| common.out.as_ref().map(|o| o.join("cache")));
    let (geo, stats) = load_geometry(&space, dir.as_deref())?;
    if let Some(d) = &dir {
        eprintln!("cache {}: {} levels reused, {} written", d.display(), stats.hits, stats.writes);
    }
    let table = count_table(&geo);
    emit(common, &format!("counts_n{}_p{}.csv", space.n(), space.p()), table.as_bytes())?;
    if common.out.is_some() {
        print!("{table}");
    }
    Ok(true)
}

fn verify(args: &SpaceArgs, suite: &str, k: Option<usize>, seed: u64, trials: usize, map: Option<&Path>, common: &Common) -> Outcome {
    let space = space_of(args)?;
    let suite: Suite = suite.parse()?;
    if let Some(k) = k {
        if k >= space.n() {
            return Err(Failure::Usage(format!("k = {k} is out of range 0..={}", space.n() - 1)));
        }
    }
    let geo = geometry(&space, common)?;
    let map = match map {
        Some(path) => Some(GrassmannianMap::from_json(&read_json::<MapJson>(path)?, &geo, &geo)?),
        None => None,
    };
    let ctx = Context::new(geo, seed, trials, k, map);
    let report = run(&ctx, suite);
    for e in &report.entries {
        println!(
            "{} {} {} expected={} actual={}",
            if e.pass { "PASS" } else { "FAIL" },
            e.lemma,
            e.params,
            e.expected,
            e.actual
        );
    }
    for s in &report.skipped {
        println!("SKIP {} {}", s.suite, s.reason);
    }
    if let Some(dir) = &common.out {
        let stem = format!("report_{}_n{}_p{}", suite.name(), space.n(), space.p());
        write_atomic(&dir.join(format!("{stem}.json")), &to_bytes(&report))?;
        write_atomic(&dir.join(format!("{stem}.csv")), report.to_csv().as_bytes())?;
    }
    if !report.pass {
        return Ok(false);
    }
    if suite != Suite::All && !report.skipped.is_empty() {
        return Err(Failure::Usage(report.skipped[0].reason.clone()));
    }
    Ok(true)
}

fn random(args: &SpaceArgs, seed: u64, common: &Common) -> Outcome {
    let space = space_of(args)?;
    let geo = geometry(&space, common)?;
    let h = random_collineation(&space, seed).to_point_map(&geo);
    let name = format!("embedding_n{}_p{}_seed{}.json", space.n(), space.p(), seed);
    emit(common, &name, &to_bytes(&h.to_json(&geo, &geo)))?;
    Ok(true)
}

fn induce_cmd(path: &Path, k: usize, common: &Common) -> Outcome {
    let j: PointMapJson = read_json(path)?;
    let source = SymplecticSpace::from_header(&j.space)?;
    let target = SymplecticSpace::from_header(&j.target_space)?;
    check_grid(&source)?;
    check_grid(&target)?;
    if source != target {
        return Err(Failure::Usage("source and target spaces must share n and p".into()));
    }
    if k >= source.n() {
        return Err(Failure::Usage(format!("k = {k} is out of range 0..={}", source.n() - 1)));
    }
    let geo = geometry(&source, common)?;
    let h = PointMap::from_json(&j, &geo, &geo)?;
    let f = induce(&h, &geo, &geo, k)?;
    let name = format!("map_n{}_p{}_k{}.json", source.n(), source.p(), k);
    emit(common, &name, &to_bytes(&f.to_json()))?;
    Ok(true)
}

fn reconstruct_cmd(path: &Path, seed: u64, common: &Common) -> Outcome {
    let j: MapJson = read_json(path)?;
    let source = SymplecticSpace::from_header(&j.source.space)?;
    let target = SymplecticSpace::from_header(&j.target.space)?;
    check_grid(&source)?;
    check_grid(&target)?;
    if source != target {
        return Err(Failure::Usage("source and target spaces must share n and p".into()));
    }
    let geo = geometry(&source, common)?;
    let f = GrassmannianMap::from_json(&j, &geo, &geo)?;
    let rec = reconstruct(&f, &geo, &geo, &sample_bases(&source, 8, seed))?;
    if let Some((level, c)) = rec.certificate.first_failure() {
        eprintln!("reconstruction failed at level {level}: {}", c.name);
    }
    match &common.out {
        Some(dir) => {
            write_atomic(&dir.join("certificate.json"), &to_bytes(&rec.certificate))?;
            if let Some(h) = &rec.point_map {
                write_atomic(&dir.join("embedding.json"), &to_bytes(&h.to_json(&geo, &geo)))?;
            }
        }
        None => {
            print!("{}", String::from_utf8_lossy(&to_bytes(&rec.certificate)));
            if let Some(h) = &rec.point_map {
                print!("{}", String::from_utf8_lossy(&to_bytes(&h.to_json(&geo, &geo))));
            }
        }
    }
    Ok(rec.certificate.pass)
}
