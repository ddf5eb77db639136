//! The `sandlab` command-line interface. Subcommands communicate through
//! the text document formats on stdin/stdout, so they compose in pipes:
//!
//! ```text
//! sandlab gen grid-wired 128 | sandlab identity | sandlab render --palette grid4 --out id.ppm
//! ```
//!
//! `--in`/`--out` file flags are equivalent to the pipe ends. Usage errors
//! exit 2 (clap's convention); engine errors print to stderr and exit 1.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use sandlab_core::format::{
    parse_stream, serialize_chips, serialize_graph, serialize_stacks, DocStream,
};
use sandlab_core::graph::{generate, Family};
use sandlab_core::sandpile::{self, AggregateParams, ChipConfig, Policy};
use sandlab_core::stacks::StackConfig;
use sandlab_core::{rotor, Digraph, RotorConfig, SingleChipState};

use crate::figures;
use crate::render::{render_aggregate, render_config, Palette};
use crate::suite;

#[derive(Parser)]
#[command(name = "sandlab", version, about = "Abelian sandpile and rotor-router laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph from a built-in family.
    Gen {
        /// grid-wired | torus | disk-wired | complete | complete-sink | path | bidirected
        family: String,
        /// Size parameter, or `u-v` edges for `bidirected`.
        args: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stabilize a chip configuration (graph + chips in, graph + chips out).
    Stabilize {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// bulk | fifo | lifo | random | sweep
        #[arg(long, default_value = "bulk")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Step cap; defaults to SANDLAB_MAXSTEPS on sink-free graphs.
        #[arg(long)]
        cap: Option<u64>,
        /// Extra chips, e.g. --drop 100000@8320 (count@vertex).
        #[arg(long)]
        drop: Vec<String>,
    },
    /// Identity element of the sandpile group.
    Identity {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group inverse of a recurrent configuration.
    Inverse {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sandpile group order and invariant factors.
    Group {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
    },
    /// Recurrence test for a stable configuration.
    Recurrent {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        /// eps | burning | peeling
        #[arg(long, default_value = "eps")]
        method: String,
    },
    /// Unique superstable configuration of the class (Eulerian with sink).
    Superstabilize {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotor-router orbit of a single-chip state on a sink-free graph.
    RotorOrbit {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        chip: usize,
    },
    /// Eulerian tour traced by the rotor walk.
    Tour {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        /// Starting edge id; the rotor at its tail is set to its cyclic
        /// predecessor.
        #[arg(long, default_value_t = 0)]
        edge: usize,
    },
    /// Recurrent-configuration/spanning-tree bijection table.
    Bijection {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
    },
    /// Rotor-router vs random-walk hitting bound report.
    HittingBound {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        /// Absorbing set Z, e.g. --targets 0,3,7
        #[arg(long)]
        targets: String,
        /// Counted subset Y of Z.
        #[arg(long)]
        subset: String,
    },
    /// Stack operations: to-acyclic | add <v> | add-inverse <v>.
    Stacks {
        action: String,
        vertex: Option<usize>,
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregation of n chips at the origin over a constant background.
    Aggregate {
        #[arg(long)]
        chips: u64,
        /// Hole depth H (background height is -H).
        #[arg(long, default_value_t = 0)]
        hole: i64,
        #[arg(long, default_value_t = 64)]
        window: usize,
        #[arg(long, default_value_t = 4096)]
        window_cap: usize,
        /// Write a PPM image of the window.
        #[arg(long)]
        render: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        cell: usize,
    },
    /// Render a chip configuration on an embedded graph to PPM.
    Render {
        #[arg(long, name = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        palette: Palette,
        #[arg(long, default_value_t = 1)]
        cell: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance suite; exits nonzero on any failure.
    Verify {
        /// Include the opt-in large-grid performance check.
        #[arg(long)]
        full: bool,
    },
    /// Wall-clock comparison of the stabilization backends.
    Bench {
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 20_000)]
        agg_chips: u64,
    },
    /// Reproduce the identity and aggregation figures.
    Figures {
        #[arg(long, default_value = "figures")]
        outdir: PathBuf,
        /// Also produce the large, slow figures.
        #[arg(long)]
        full: bool,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {}", msg);
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, String> {
    match cmd {
        Command::Gen { family, args, out } => {
            let g = parse_family(&family, &args)?;
            write_out(out.as_deref(), &serialize_graph(&g))?;
            Ok(0)
        }
        Command::Stabilize {
            input,
            out,
            policy,
            seed,
            cap,
            drop,
        } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let mut sigma = stream.chips.clone().unwrap_or_else(|| ChipConfig::zeros(g));
            for d in &drop {
                let (count, vertex) = parse_drop(d)?;
                if vertex >= g.vertex_count() {
                    return Err(format!("drop vertex {} out of range", vertex));
                }
                sigma.add_at(vertex, count);
            }
            let cap = cap.or_else(|| {
                if g.has_global_sink() {
                    None
                } else {
                    Some(max_steps_from_env())
                }
            });
            let policy = parse_policy(&policy, seed)?;
            let (stab, od) = sandpile::stabilize(g, &sigma, policy, cap).map_err(stringify)?;
            eprintln!(
                "stabilized: {} chips in, {} remain, {} firings, {} chip moves",
                sigma.total(),
                stab.total(),
                od.counts.iter().sum::<u64>(),
                od.total_chip_moves
            );
            write_out(
                out.as_deref(),
                &format!("{}{}", serialize_graph(g), serialize_chips(&stab)),
            )?;
            Ok(0)
        }
        Command::Identity { input, out } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let ident = sandpile::identity(g).map_err(stringify)?;
            write_out(
                out.as_deref(),
                &format!("{}{}", serialize_graph(g), serialize_chips(&ident)),
            )?;
            Ok(0)
        }
        Command::Inverse { input, out } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let sigma = need_chips(&stream)?;
            let inv = sandpile::inverse(g, sigma).map_err(stringify)?;
            write_out(
                out.as_deref(),
                &format!("{}{}", serialize_graph(g), serialize_chips(&inv)),
            )?;
            Ok(0)
        }
        Command::Group { input } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let s = sandpile::group_structure(g).map_err(stringify)?;
            println!("{}", s);
            Ok(0)
        }
        Command::Recurrent { input, method } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let sigma = need_chips(&stream)?;
            let test = match method.as_str() {
                "eps" => sandpile::RecurrenceTest::Epsilon,
                "burning" => sandpile::RecurrenceTest::Burning,
                "peeling" => sandpile::RecurrenceTest::Peeling,
                other => return Err(format!("unknown method `{}`", other)),
            };
            let rec = sandpile::is_recurrent_with(g, sigma, test).map_err(stringify)?;
            println!("recurrent: {}", rec);
            Ok(0)
        }
        Command::Superstabilize { input, out } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let sigma = need_chips(&stream)?;
            let sup = sandpile::superstabilize(g, sigma).map_err(stringify)?;
            write_out(
                out.as_deref(),
                &format!("{}{}", serialize_graph(g), serialize_chips(&sup)),
            )?;
            Ok(0)
        }
        Command::RotorOrbit { input, chip } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let rotors = stream
                .rotors
                .clone()
                .unwrap_or_else(|| RotorConfig::initial(g));
            let state = SingleChipState::new(chip, rotors);
            match rotor::unicycle_certificate(g, &state).map_err(stringify)? {
                Some(cycle) => println!("unicycle: cycle {:?}", cycle),
                None => println!("not a unicycle"),
            }
            let orbit = rotor::unicycle_orbit(g, &state).map_err(stringify)?;
            println!("orbit length: {}", orbit.len());
            Ok(0)
        }
        Command::Tour { input, edge } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            if edge >= g.edge_count() {
                return Err(format!("edge {} out of range", edge));
            }
            let mut rotors = stream
                .rotors
                .clone()
                .unwrap_or_else(|| RotorConfig::initial(g));
            let w = g.tail(edge);
            rotors = set_rotor(g, &rotors, g.prev_edge(edge));
            let state = SingleChipState::new(w, rotors);
            let tour = rotor::eulerian_tour(g, &state, edge).map_err(stringify)?;
            println!("tour length: {}", tour.len());
            let pretty: Vec<String> = tour
                .iter()
                .map(|&e| format!("{}->{}", g.tail(e), g.head(e)))
                .collect();
            println!("{}", pretty.join(" "));
            Ok(0)
        }
        Command::Bijection { input } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let base = match stream.rotors.clone() {
                Some(r) => r,
                None => rotor::acyclic_rotor_configs(g, g.sink().ok_or("graph has no sink")?)
                    .map_err(stringify)?
                    .into_iter()
                    .next()
                    .ok_or("graph has no spanning tree")?,
            };
            let pairs = rotor::tree_bijection(g, &base).map_err(stringify)?;
            println!("{} recurrent configurations <-> spanning trees", pairs.len());
            for (sigma, tree) in pairs {
                println!("{:?} -> {:?}", sigma.counts(), tree.positions());
            }
            Ok(0)
        }
        Command::HittingBound {
            input,
            targets,
            subset,
        } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let sigma = need_chips(&stream)?;
            let rotors = stream
                .rotors
                .clone()
                .unwrap_or_else(|| RotorConfig::initial(g));
            let z = parse_vertex_list(&targets)?;
            let y = parse_vertex_list(&subset)?;
            let rep = rotor::hitting_bound_check(g, &y, &z, sigma, &rotors).map_err(stringify)?;
            println!("rotor hits in Y: {}", rep.rotor_hits);
            println!("expected hits:  {}", rep.expected);
            println!("deviation:      {}", rep.lhs);
            println!("bound:          {}", rep.rhs);
            println!("ok: {}", rep.ok);
            Ok(0)
        }
        Command::Stacks {
            action,
            vertex,
            input,
            out,
        } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let stack = match stream.stacks.clone() {
                Some(s) => s,
                None => {
                    let rotors = stream
                        .rotors
                        .clone()
                        .unwrap_or_else(|| RotorConfig::initial(g));
                    StackConfig::from_rotor(g, &rotors)
                }
            };
            let result = match action.as_str() {
                "to-acyclic" => {
                    let (next, popped) =
                        sandlab_core::stacks::pop_to_acyclic(g, &stack).map_err(stringify)?;
                    eprintln!("popped {} cycles", popped.len());
                    next
                }
                "add" => {
                    let v = vertex.ok_or("stacks add needs a vertex")?;
                    let (next, path) =
                        sandlab_core::stacks::stack_chip_add(g, &stack, v).map_err(stringify)?;
                    eprintln!("walk: {:?}", path);
                    next
                }
                "add-inverse" => {
                    let v = vertex.ok_or("stacks add-inverse needs a vertex")?;
                    sandlab_core::stacks::stack_chip_add_inverse(g, &stack, v).map_err(stringify)?
                }
                other => return Err(format!("unknown stacks action `{}`", other)),
            };
            write_out(
                out.as_deref(),
                &format!("{}{}", serialize_graph(g), serialize_stacks(g, &result)),
            )?;
            Ok(0)
        }
        Command::Aggregate {
            chips,
            hole,
            window,
            window_cap,
            render,
            cell,
        } => {
            let params = AggregateParams {
                chips,
                hole_depth: hole,
                window,
                window_cap,
            };
            let res = sandpile::aggregate(&params).map_err(stringify)?;
            println!("window radius: {}", res.radius);
            println!("fired sites:   {}", res.fired_count());
            println!("total firings: {}", res.total_firings);
            println!("passes:        {}", res.passes);
            if let Some((x0, x1, y0, y1)) = res.fired_bbox() {
                println!("fired bbox:    x [{}, {}], y [{}, {}]", x0, x1, y0, y1);
            }
            match res.exact_square_radius() {
                Some(r) => println!("exact square:  radius {}", r),
                None => println!("exact square:  no"),
            }
            if let Some(path) = render {
                let img = render_aggregate(&res, cell, 2);
                img.write_ppm(&path).map_err(stringify)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Render {
            input,
            palette,
            cell,
            out,
        } => {
            let stream = read_stream(input.as_deref())?;
            let g = need_graph(&stream)?;
            let sigma = need_chips(&stream)?;
            let img = render_config(g, sigma, palette, cell)?;
            img.write_ppm(&out).map_err(stringify)?;
            eprintln!("wrote {} ({}x{})", out.display(), img.width, img.height);
            Ok(0)
        }
        Command::Verify { full } => {
            let ok = suite::run_and_print(full);
            Ok(if ok { 0 } else { 1 })
        }
        Command::Bench { size, agg_chips } => {
            bench(size, agg_chips);
            Ok(0)
        }
        Command::Figures { outdir, full } => {
            figures::reproduce(&outdir, full).map_err(stringify)?;
            Ok(0)
        }
    }
}

fn parse_family(family: &str, args: &[String]) -> Result<Digraph, String> {
    let size = |idx: usize| -> Result<usize, String> {
        args.get(idx)
            .ok_or_else(|| format!("{} needs a size argument", family))?
            .parse::<usize>()
            .map_err(|e| e.to_string())
    };
    let fam = match family {
        "grid-wired" => Family::GridWired(size(0)?),
        "torus" => Family::DirectedTorus(size(0)?),
        "disk-wired" => Family::DiskWired(size(0)?),
        "complete" => Family::Complete(size(0)?),
        "complete-sink" => Family::CompleteWithSink(size(0)?),
        "path" => Family::PathBidirected(size(0)?),
        "bidirected" => {
            let mut edges = Vec::new();
            for a in args {
                let (u, v) = a
                    .split_once('-')
                    .ok_or_else(|| format!("bad edge `{}` (expected u-v)", a))?;
                edges.push((
                    u.parse::<usize>().map_err(|e| e.to_string())?,
                    v.parse::<usize>().map_err(|e| e.to_string())?,
                ));
            }
            if edges.is_empty() {
                return Err("bidirected needs at least one u-v edge".into());
            }
            Family::Bidirected(edges)
        }
        other => return Err(format!("unknown family `{}`", other)),
    };
    Ok(generate(&fam))
}

fn parse_policy(name: &str, seed: u64) -> Result<Policy, String> {
    Ok(match name {
        "bulk" => Policy::Bulk,
        "fifo" => Policy::Fifo,
        "lifo" => Policy::Lifo,
        "random" => Policy::Random(seed),
        "sweep" => Policy::Sweep,
        other => return Err(format!("unknown policy `{}`", other)),
    })
}

fn parse_drop(spec: &str) -> Result<(u64, usize), String> {
    let (count, vertex) = spec
        .split_once('@')
        .ok_or_else(|| format!("bad drop `{}` (expected count@vertex)", spec))?;
    Ok((
        count.parse().map_err(|e: std::num::ParseIntError| e.to_string())?,
        vertex.parse().map_err(|e: std::num::ParseIntError| e.to_string())?,
    ))
}

fn parse_vertex_list(s: &str) -> Result<Vec<usize>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}

fn set_rotor(g: &Digraph, rotors: &RotorConfig, e: usize) -> RotorConfig {
    let mut positions = rotors.positions().to_vec();
    positions[g.tail(e)] = g.edge_position(e);
    RotorConfig::from_positions(g, positions).expect("valid rotor position")
}

fn max_steps_from_env() -> u64 {
    std::env::var("SANDLAB_MAXSTEPS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(10_000_000)
}

fn read_stream(path: Option<&std::path::Path>) -> Result<DocStream, String> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(stringify)?,
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).map_err(stringify)?;
            buf
        }
    };
    parse_stream(&text).map_err(stringify)
}

fn need_graph(stream: &DocStream) -> Result<&Digraph, String> {
    stream.graph.as_ref().ok_or_else(|| "input has no sandgraph document".into())
}

fn need_chips(stream: &DocStream) -> Result<&ChipConfig, String> {
    stream.chips.as_ref().ok_or_else(|| "input has no chips document".into())
}

fn write_out(path: Option<&std::path::Path>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(stringify),
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(stringify)
        }
    }
}

fn stringify<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn bench(size: usize, agg_chips: u64) {
    use std::time::Instant;
    let g = generate(&Family::GridWired(size));
    let counts: Vec<u64> = (0..g.vertex_count())
        .map(|v| {
            if Some(v) == g.sink() {
                0
            } else {
                (2 * g.outdeg(v) as u64).saturating_sub(2)
            }
        })
        .collect();
    let sigma = ChipConfig::from_counts(&g, counts).unwrap();
    println!("grid_wired({}) stabilization of 2*delta - 2:", size);
    let mut reference: Option<u64> = None;
    let mut run = |name: &str, policy: Policy| {
        let t = Instant::now();
        let (_, od) = sandpile::stabilize(&g, &sigma, policy, None).unwrap();
        let dt = t.elapsed().as_secs_f64();
        println!("  {:<12} {:>8.3}s  {} chip moves", name, dt, od.total_chip_moves);
        match reference {
            Some(r) => assert_eq!(r, od.total_chip_moves),
            None => reference = Some(od.total_chip_moves),
        }
    };
    run("bulk queue", Policy::Bulk);
    run("sweep", Policy::Sweep);

    println!("aggregate of {} chips on background 2:", agg_chips);
    let params = AggregateParams::new(agg_chips, -2);
    let t = Instant::now();
    let seq = sandpile::aggregate_sequential(&params).unwrap();
    println!(
        "  {:<12} {:>8.3}s  {} firings",
        "passes seq",
        t.elapsed().as_secs_f64(),
        seq.total_firings
    );
    #[cfg(feature = "parallel")]
    {
        let t = Instant::now();
        let par = sandlab_core::sandpile::aggregate_parallel(&params).unwrap();
        println!(
            "  {:<12} {:>8.3}s  {} firings",
            "passes par",
            t.elapsed().as_secs_f64(),
            par.total_firings
        );
        assert_eq!(seq.heights, par.heights);
    }
}
