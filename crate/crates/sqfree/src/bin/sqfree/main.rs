//! Command-line front end. All mathematics lives in the library; this layer
//! parses arguments, applies budgets, runs one command, and serializes the
//! report. Exit codes: 0 success, 1 verification/consistency failure,
//! 2 usage error, 3 budget refusal.

mod report;

use clap::{Parser, Subcommand, ValueEnum};
use report::{Item, Meta, Report};
use sqfree::checks::{run_all, CheckConfig};
use sqfree::circle::{
    cq, lattice_count, lattice_main_term, singular_integral, singular_series, singular_series_p,
    selberg_quantities, BoxSpec, CqMethod, SingularIntegralMethod, VSlice,
};
use sqfree::density::{euler_product, rho};
use sqfree::orbits::{count_dp, crt_double_root, group_order_fp, shifted_coeffs, sigma_m, DpMethod};
use sqfree::sieve::{
    count_n, count_nm, enumerate_w, moebius_identity_check, tail_sum, BoxMode, DivKind,
};
use sqfree::{Budget, Error};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "sqfree",
    version,
    about = "Squarefree values of beta*a^4 + alpha*b^3: local densities, exact counts, \
             orbit counts over F_p, and circle-method quantities for the invariant \
             quadratic form on the symmetric-matrix slice."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads (default: all cores, or RAYON_NUM_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 1729)]
    seed: u64,

    /// Open the long-run gates (Moebius at X=3, brute orbits at p=7, wider boxes).
    #[arg(long, global = true)]
    long: bool,

    /// Override the largest modulus for local density enumeration.
    #[arg(long = "budget-rho-modulus", global = true)]
    budget_rho_modulus: Option<u64>,

    /// Override the largest X for exhaustive squarefree counts.
    #[arg(long = "budget-count-x", global = true)]
    budget_count_x: Option<u32>,

    /// Override the largest p for brute-force orbit counts.
    #[arg(long = "budget-dp-brute", global = true)]
    budget_dp_brute: Option<u32>,

    /// Override the largest half-width for exact lattice counts.
    #[arg(long = "budget-lattice-x", global = true)]
    budget_lattice_x: Option<i64>,

    /// Override the largest modulus for brute-force exponential sums.
    #[arg(long = "budget-cq-brute", global = true)]
    budget_cq_brute: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Height max(|a|^(1/3), |b|^(1/4)) strictly below X.
    HeightLt,
    /// Closed box |a| <= X^3, |b| <= X^4.
    Closed,
}

impl From<Mode> for BoxMode {
    fn from(m: Mode) -> BoxMode {
        match m {
            Mode::HeightLt => BoxMode::HeightLt,
            Mode::Closed => BoxMode::ClosedBox,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DpHow {
    Formula,
    Brute,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Euler product for the squarefree density, with a per-prime factor table.
    Density {
        #[arg(long, default_value_t = 256, allow_negative_numbers = true)]
        alpha: i64,
        #[arg(long, default_value_t = -27, allow_negative_numbers = true)]
        beta: i64,
        #[arg(long, default_value_t = 100_000)]
        pmax: u64,
        /// How many leading Euler factors to tabulate.
        #[arg(long, default_value_t = 15)]
        factors: usize,
    },
    /// Exact squarefree count over a height box, optionally with the Moebius
    /// identity check and a single N_m.
    Count {
        #[arg(long = "X")]
        x: u32,
        #[arg(long, default_value_t = 256, allow_negative_numbers = true)]
        alpha: i64,
        #[arg(long, default_value_t = -27, allow_negative_numbers = true)]
        beta: i64,
        #[arg(long, value_enum, default_value_t = Mode::HeightLt)]
        mode: Mode,
        /// Also count pairs with m^2 dividing the value.
        #[arg(long)]
        m: Option<u64>,
        /// Verify count_N = sum_m mu(m) count_Nm exactly (exhaustive X only).
        #[arg(long)]
        check_moebius: bool,
    },
    /// Exact tail sum of count_Nm over m > m_min.
    Tail {
        #[arg(long = "X")]
        x: u32,
        #[arg(long)]
        m_min: u64,
        #[arg(long, default_value_t = 256, allow_negative_numbers = true)]
        alpha: i64,
        #[arg(long, default_value_t = -27, allow_negative_numbers = true)]
        beta: i64,
        #[arg(long, value_enum, default_value_t = Mode::HeightLt)]
        mode: Mode,
    },
    /// Strong/weak divisibility tables over a box, per prime of m.
    Classify {
        #[arg(long = "X")]
        x: u32,
        #[arg(long)]
        m: u64,
        /// Include the first few pairs of each enumeration.
        #[arg(long, default_value_t = 0)]
        list: usize,
    },
    /// Lift a weak pair (a, b) to a symmetric matrix with (1,3)-entry m.
    Embed {
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long, allow_negative_numbers = true)]
        b: i64,
        #[arg(long)]
        m: u64,
    },
    /// Orbit count d_p over F_p, by the stabilizer formula and/or brute force.
    Dp {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = DpHow::Formula)]
        method: DpHow,
    },
    /// Exponential sums C_q(r), the singular series and its local factors,
    /// and the archimedean density of a standard box.
    Singular {
        /// Tabulate C_q(r) for r up to this bound.
        #[arg(long, default_value_t = 20)]
        rmax: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Local factors S(q; p) for these primes.
        #[arg(long, default_value = "2,3,5,7")]
        primes: String,
        /// Standard box half-width for the singular integral.
        #[arg(long = "X", default_value_t = 100.0)]
        x: f64,
        /// Monte-carlo sample count for the cross-check.
        #[arg(long, default_value_t = 2_000_000)]
        samples: u64,
    },
    /// Exact congruence-class lattice count on a standard box vs the
    /// circle-method main term.
    Lattice {
        #[arg(long = "X", default_value_t = 500.0)]
        x: f64,
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// Base point as nine comma-separated integers
        /// b11,b12,b13,b14,b22,b24,b33,b34,b44 (default: 0 for m = 1,
        /// b11=1, b44=m otherwise).
        #[arg(long, allow_hyphen_values = true)]
        b0: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Sieve weights g(p), h(p) and the truncated normalizer H.
    Selberg {
        #[arg(long, default_value_t = 7)]
        p_lo: u64,
        #[arg(long, default_value_t = 101)]
        p_hi: u64,
        /// Level bound D; H sums h(m) over squarefree m < sqrt(D).
        #[arg(long, default_value_t = 1e6)]
        d: f64,
    },
    /// Run the acceptance suite; nonzero exit if any criterion fails.
    Verify {
        /// Skip the many-minute criteria and trim brute orbit counts.
        #[arg(long)]
        quick: bool,
    },
}

fn parse_i64_list(s: &str, want: usize, what: &str) -> Result<Vec<i64>, Error> {
    let vals: Result<Vec<i64>, _> = s.split(',').map(|t| t.trim().parse::<i64>()).collect();
    match vals {
        Ok(v) if v.len() == want => Ok(v),
        Ok(v) => Err(Error::Domain(format!(
            "{what}: expected {want} comma-separated integers, got {}",
            v.len()
        ))),
        Err(e) => Err(Error::Domain(format!("{what}: {e}"))),
    }
}

fn run_command(cli: &Cli, budget: &Budget) -> Result<(Vec<Item>, bool), Error> {
    let mut failed = false;
    let items = match &cli.command {
        Command::Density {
            alpha,
            beta,
            pmax,
            factors,
        } => {
            let ev = euler_product(*alpha, *beta, *pmax)?;
            let mut items = vec![Item::interval("density", ev.interval(), &ev.description)];
            for &p in sqfree::arith::primes_upto(1000).iter().take(*factors) {
                let ld = rho(p * p, *alpha, *beta)?;
                let mut it = Item::value(
                    format!("euler_factor_{p}"),
                    1.0 - ld.fraction(),
                    format!("1 - rho({p}^2)/{p}^4 with rho by closed form"),
                );
                it.count = Some(ld.count);
                items.push(it);
            }
            items
        }
        Command::Count {
            x,
            alpha,
            beta,
            mode,
            m,
            check_moebius,
        } => {
            let c = count_n(*x, *alpha, *beta, (*mode).into(), budget)?;
            let mut items = vec![
                Item::count(
                    "squarefree_count",
                    c.count as u128,
                    "exhaustive count, hybrid residue sieve + trial division",
                ),
                Item::count("pairs", c.pairs as u128, "box size"),
                Item::value("fraction", c.fraction(), "squarefree_count / pairs"),
            ];
            if let Some(m) = m {
                let nm = count_nm(*x, *alpha, *beta, *m, (*mode).into())?;
                items.push(Item::count(
                    format!("count_m_{m}"),
                    nm,
                    format!("pairs with {m}^2 dividing the value, exact"),
                ));
            }
            if *check_moebius {
                let id = moebius_identity_check(*x, *alpha, *beta, (*mode).into())?;
                if !id.holds() {
                    return Err(Error::Consistency(format!(
                        "moebius identity fails at X = {x}: count {} vs sum {} - {}*{}",
                        id.count, id.moebius_sum, id.zero_pairs, id.mertens
                    )));
                }
                items.push(Item::text(
                    "moebius_identity",
                    format!(
                        "exact: {} = {} - {}*{} over m <= {}",
                        id.count, id.moebius_sum, id.zero_pairs, id.mertens, id.m_max
                    ),
                    "inclusion-exclusion over squarefree m with the zero-pair correction",
                ));
            }
            items
        }
        Command::Tail {
            x,
            m_min,
            alpha,
            beta,
            mode,
        } => {
            let t = tail_sum(*x, *m_min, *alpha, *beta, (*mode).into())?;
            vec![Item::count(
                format!("tail_sum_beyond_{m_min}"),
                t,
                "exact sum of count_Nm over squarefree m in (m_min, sqrt(max value)]",
            )]
        }
        Command::Classify { x, m, list } => {
            let fac = sqfree::arith::factor_u64(*m)?;
            let mut items = Vec::new();
            let mut scopes: Vec<u64> = fac.iter().map(|&(p, _)| p).collect();
            if scopes.len() > 1 {
                scopes.push(*m);
            }
            for scope in scopes {
                for kind in [DivKind::Strong, DivKind::Weak] {
                    let pairs = enumerate_w(*x, scope, kind, budget)?;
                    let label = match kind {
                        DivKind::Strong => "strong",
                        _ => "weak",
                    };
                    items.push(Item::count(
                        format!("{label}_pairs_mod_{scope}"),
                        pairs.len() as u128,
                        format!("pairs with height < {x} with {label} square divisibility at every p | {scope}"),
                    ));
                    for pair in pairs.iter().take(*list) {
                        items.push(Item::text(
                            format!("{label}_pair_mod_{scope}"),
                            format!("({}, {})", pair.a, pair.b),
                            "enumeration sample",
                        ));
                    }
                }
            }
            items
        }
        Command::Embed { a, b, m } => {
            let s = sigma_m(*a, *b, *m)?;
            let r = crt_double_root(*a, *b, *m)?;
            let [c1, c2, c3, c4] = shifted_coeffs(*a, *b, r as i64);
            let rows: Vec<String> = s
                .to_mat4()
                .iter()
                .map(|row| format!("[{}, {}, {}, {}]", row[0], row[1], row[2], row[3]))
                .collect();
            vec![
                Item::text(
                    "matrix_times_4",
                    rows.join(" "),
                    "entries of 4B; invariant polynomial re-verified on construction",
                ),
                Item::text(
                    "invariant_poly",
                    format!("x^4 + {a}x + {b}"),
                    "det(A0 x - B) recomputed exactly",
                ),
                Item::value("entry_13", s.get4(0, 2) as f64 / 4.0, "must equal m"),
                Item::count("double_root", r as u128, "CRT of the double root mod each p | m"),
                Item::text(
                    "shifted_coeffs",
                    format!("[{c1}, {c2}, {c3}, {c4}]"),
                    "coefficients of f(x + r); m | c3 and m^2 | c4 by construction",
                ),
            ]
        }
        Command::Dp { p, method } => {
            let mut items = vec![Item::count(
                "group_order",
                group_order_fp(*p),
                "p^2 (p^2 - 1)^2",
            )];
            let runs: Vec<(&str, DpMethod)> = match method {
                DpHow::Formula => vec![("formula", DpMethod::OrbitFormula)],
                DpHow::Brute => vec![("brute", DpMethod::Brute)],
                DpHow::Both => vec![
                    ("formula", DpMethod::OrbitFormula),
                    ("brute", DpMethod::Brute),
                ],
            };
            let mut seen = Vec::new();
            for (label, m) in runs {
                let v = count_dp(*p, m, budget)?;
                seen.push(v);
                items.push(Item::count(
                    format!("d_p_{label}"),
                    v,
                    match m {
                        DpMethod::OrbitFormula => {
                            "sum over trinomial invariants of orbit sizes from stabilizers"
                        }
                        DpMethod::Brute => "enumeration of all matrices over F_p",
                    },
                ));
                items.push(Item::value(
                    format!("d_p_{label}_over_p8"),
                    v as f64 / (*p as f64).powi(8),
                    "density of the counted set in V(F_p)",
                ));
            }
            if seen.len() == 2 && seen[0] != seen[1] {
                return Err(Error::Consistency(format!(
                    "d_p methods disagree at p = {p}: {} vs {}",
                    seen[0], seen[1]
                )));
            }
            items
        }
        Command::Singular {
            rmax,
            tol,
            primes,
            x,
            samples,
        } => {
            let mut items = Vec::new();
            for r in 1..=*rmax {
                items.push(Item::value(
                    format!("cq_{r}"),
                    cq(r, CqMethod::Factored, budget)?,
                    "hyperbolic-pair factorization with one quadratic Gauss sum",
                ));
            }
            items.push(Item::interval(
                "singular_series",
                singular_series(*tol)?,
                "sum of C_q(r) with the 4 r^{-7/2} tail bound",
            ));
            for tok in primes.split(',') {
                let p: u64 = tok
                    .trim()
                    .parse()
                    .map_err(|e| Error::Domain(format!("--primes: {e}")))?;
                items.push(Item::interval(
                    format!("singular_series_{p}"),
                    singular_series_p(p, *tol)?,
                    "sum of C_q(p^l) with the geometric tail bound",
                ));
            }
            let bx = BoxSpec::standard(*x);
            let slab = singular_integral(&bx, SingularIntegralMethod::Slab)?;
            let mc = singular_integral(
                &bx,
                SingularIntegralMethod::MonteCarlo {
                    samples: *samples,
                    seed: cli.seed,
                },
            )?;
            items.push(Item::interval(
                "singular_integral_slab",
                slab,
                "exact pair-product distributions convolved on a grid, window extrapolated",
            ));
            items.push(Item::interval(
                "singular_integral_mc",
                mc,
                format!("monte-carlo, {samples} samples, 3-sigma band"),
            ));
            if !slab.intersects(&mc) {
                return Err(Error::Consistency(
                    "slab and monte-carlo singular integrals are disjoint".into(),
                ));
            }
            items
        }
        Command::Lattice { x, m, b0, tol } => {
            let bx = BoxSpec::standard(*x);
            let base = match b0 {
                Some(s) => {
                    let v = parse_i64_list(s, 9, "--b0")?;
                    VSlice::from_coords([
                        v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8],
                    ])
                }
                None if *m == 1 => VSlice::default(),
                None => VSlice {
                    b11: 1,
                    b44: *m as i64,
                    ..VSlice::default()
                },
            };
            let count = lattice_count(&bx, *m, &base, budget)?;
            let main = lattice_main_term(&bx, *m, *tol)?;
            let rel = (count as f64 - main.midpoint()).abs() / main.midpoint();
            vec![
                Item::count(
                    "lattice_count",
                    count,
                    "exact convolution count of the congruence class on the zero locus",
                ),
                Item::interval(
                    "main_term",
                    main,
                    "m^{-8} (prod_p S(q;p)^{-1}) S(q) S_inf over the box",
                ),
                Item::value("relative_deviation", rel, "|count - midpoint| / midpoint"),
            ]
        }
        Command::Selberg { p_lo, p_hi, d } => {
            let rep = selberg_quantities(*p_lo, *p_hi, *d, budget)?;
            let mut items = Vec::new();
            for e in &rep.entries {
                let mut it = Item::value(
                    format!("g_{}", e.p),
                    e.g,
                    "d_p S(q;p)^{-1} / p^8 with d_p from the orbit formula",
                );
                it.count = Some(e.dp);
                it.text = Some(if e.in_band {
                    "in [1/32, 7/8]".into()
                } else {
                    "outside [1/32, 7/8]".into()
                });
                items.push(it);
                items.push(Item::value(
                    format!("h_{}", e.p),
                    e.h,
                    "g / (1 - g)",
                ));
            }
            items.push(Item::value(
                "h_sum",
                rep.h_sum,
                format!("sum of h(m) over squarefree m < sqrt({d}) built from these primes"),
            ));
            items.push(Item::value(
                "band_pass_fraction",
                rep.band_pass_fraction,
                "share of primes with g in the band",
            ));
            items
        }
        Command::Verify { quick } => {
            let cfg = CheckConfig {
                budget: *budget,
                seed: cli.seed,
                long: cli.long,
                quick: *quick,
            };
            let reports = run_all(&cfg);
            let mut items = Vec::new();
            for r in &reports {
                eprintln!("{}", r.line());
                if !r.passed {
                    failed = true;
                }
                let mut it = Item::text(
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.detail.clone(),
                );
                it.value = Some(r.seconds);
                items.push(it);
            }
            items
        }
    };
    Ok((items, failed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .is_err()
        {
            eprintln!("sqfree: thread pool already initialized");
        }
    }
    let mut budget = if cli.long {
        Budget::long()
    } else {
        Budget::default()
    };
    if let Some(v) = cli.budget_rho_modulus {
        budget.max_rho_modulus = v;
    }
    if let Some(v) = cli.budget_count_x {
        budget.max_count_x = v;
    }
    if let Some(v) = cli.budget_dp_brute {
        budget.max_dp_brute = v;
    }
    if let Some(v) = cli.budget_lattice_x {
        budget.max_lattice_x = v;
    }
    if let Some(v) = cli.budget_cq_brute {
        budget.max_cq_brute = v;
    }

    let start = Instant::now();
    match run_command(&cli, &budget) {
        Ok((items, failed)) => {
            let report = Report {
                command: command_name(&cli.command).to_string(),
                items,
                meta: Meta {
                    seconds: start.elapsed().as_secs_f64(),
                    threads: rayon::current_num_threads(),
                    seed: cli.seed,
                    version: env!("CARGO_PKG_VERSION"),
                },
            };
            match cli.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Csv => print!("{}", report.to_csv()),
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("sqfree: {e}");
            match e {
                Error::Domain(_) => ExitCode::from(2),
                Error::Budget(_) => ExitCode::from(3),
                Error::Range(_) | Error::Consistency(_) => ExitCode::from(1),
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Density { .. } => "density",
        Command::Count { .. } => "count",
        Command::Tail { .. } => "tail",
        Command::Classify { .. } => "classify",
        Command::Embed { .. } => "embed",
        Command::Dp { .. } => "dp",
        Command::Singular { .. } => "singular",
        Command::Lattice { .. } => "lattice",
        Command::Selberg { .. } => "selberg",
        Command::Verify { .. } => "verify",
    }
}
