use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use adelic_core::global_galois::{
    construct_conjugation, equivalence_exponent, galois_equivalent, ram_tuple, Character, CyclicSubgroup,
    GlobalAutomorphism,
};
use adelic_core::harrison::{
    algebra_isomorphic, classify, conjugate, equivariant_isomorphic, kummer_map, valuation_class, ExtensionClass,
};
use adelic_core::local_algebra::{kummer_pair, oracle_pair};
use adelic_core::p1_ingest::{classify_superelliptic, classify_superelliptic_unchecked, RationalFunction};
use adelic_core::{FieldCtx, Idele, IdeleRepr, LocalField, ValuationVector};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

mod selftest;

#[derive(Parser, Debug)]
#[command(name = "adelic", version, about = "Kummer theory of the adele ring of a curve over a finite-field tower")]
struct Cli {
    /// Characteristic of the coefficient field.
    #[arg(long, global = true, default_value_t = 7)]
    ell: u64,
    /// The prime p (order of the cyclic group).
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Retained coefficients per Laurent series; ADELIC_PREC overrides it.
    #[arg(long, global = true, default_value_t = 32)]
    prec: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Pair {
    /// First input (JSON file, `-` for stdin).
    #[arg(long)]
    a: PathBuf,
    /// Second input (JSON file, `-` for stdin).
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args, Debug)]
struct Action {
    /// Parameter idele.
    #[arg(long)]
    t: PathBuf,
    /// Generator of the subgroup; the Kummer action `T ↦ ζT` when absent.
    #[arg(long)]
    g: Option<PathBuf>,
    /// Character exponent s, with χ(g) = ζˢ.
    #[arg(long, default_value_t = 1)]
    chi: i64,
}

#[derive(Args, Debug)]
struct TwoActions {
    #[arg(long)]
    t: PathBuf,
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    g2: PathBuf,
    #[arg(long, default_value_t = 1)]
    chi: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Valuation vector and class of the extension `𝔸_X{t}` under `(G, χ)`.
    Classify(Action),
    /// Equivariant isomorphism of two classes (vectors or ideles); `--algebra` compares
    /// the plain algebras instead.
    Isom {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        algebra: bool,
    },
    /// Conjugacy of two classes.
    Conjugate(Pair),
    /// Harrison product of two classes.
    Product(Pair),
    /// Local Kummer pairing `⟨g, λ⟩` for `g(T) = ζᵃT` in `K{t}`.
    Pairing {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        t: String,
    },
    /// The tuple `x ↦ log_ζ⟨gₓ, zₓ⟩ₓ` on the ramification locus.
    Tuple {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Galois equivalence of two pointwise transitive subgroups.
    Equivalent(TwoActions),
    /// An explicit conjugation between two equivalent subgroups.
    Conjugation(TwoActions),
    /// Classify the cover `y^p = f(x)` of the projective line.
    Superelliptic {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        allow_nonadmissible: bool,
    },
    /// Run the built-in invariant suite.
    Selftest,
}

/// A failure, split by exit code.
enum Failure {
    Input(String),
    Domain(adelic_core::Error),
}

impl From<adelic_core::Error> for Failure {
    fn from(e: adelic_core::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Domain(e)
        }
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn read_input(path: &PathBuf) -> std::result::Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> std::result::Result<T, Failure> {
    serde_json::from_str(&read_input(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

struct Config {
    ctx: FieldCtx,
    prec: usize,
}

impl Config {
    fn field(&self) -> LocalField<'_> {
        LocalField::new(&self.ctx, self.prec)
    }

    fn p(&self) -> u64 {
        self.ctx.p()
    }

    fn idele(&self, path: &PathBuf) -> std::result::Result<Idele, Failure> {
        let r: IdeleRepr = read_json(path)?;
        if let Some(q) = r.p {
            if q != self.p() {
                return Err(Failure::Domain(adelic_core::Error::PrimeMismatch(self.p(), q)));
            }
        }
        Ok(Idele::from_repr(&self.field(), &r)?)
    }

    /// A class given either as a valuation-vector map or as an idele (through the Kummer map).
    fn class(&self, path: &PathBuf) -> std::result::Result<ExtensionClass, Failure> {
        let v: Value = read_json(path)?;
        let is_idele = v.as_object().is_some_and(|o| o.contains_key("points") || o.contains_key("default"));
        if is_idele {
            let r: IdeleRepr = serde_json::from_value(v).map_err(|e| Failure::Input(e.to_string()))?;
            return Ok(kummer_map(&Idele::from_repr(&self.field(), &r)?, self.p()));
        }
        let map: BTreeMap<String, i64> = serde_json::from_value(v)
            .map_err(|e| Failure::Input(format!("{}: expected a valuation vector: {e}", path.display())))?;
        Ok(ExtensionClass::from_vector(ValuationVector::from_map(self.p(), &map)?))
    }

    fn subgroup(&self, t: &Idele, g: &Option<PathBuf>) -> std::result::Result<CyclicSubgroup, Failure> {
        match g {
            Some(path) => self.subgroup_from(t, path),
            None => Ok(CyclicSubgroup::kummer(t, self.p(), 1)?),
        }
    }

    fn subgroup_from(&self, t: &Idele, path: &PathBuf) -> std::result::Result<CyclicSubgroup, Failure> {
        let g: GlobalAutomorphism = read_json(path)?;
        Ok(CyclicSubgroup::new(&g, t, self.p())?)
    }
}

fn class_json(c: &ExtensionClass) -> Value {
    json!({ "vector": to_value(&c.vec), "class": to_value(&valuation_class(c)) })
}

fn run(cfg: &Config, cmd: &Command) -> Outcome {
    let p = cfg.p();
    let k = cfg.field();
    match cmd {
        Command::Classify(a) => {
            let t = cfg.idele(&a.t)?;
            let g = cfg.subgroup(&t, &a.g)?;
            let c = classify(&k, &t, &g, Character::new(a.chi, p)?)?;
            Ok(class_json(&c))
        }
        Command::Isom { pair, algebra: true } => {
            let (t1, t2) = (cfg.idele(&pair.a)?, cfg.idele(&pair.b)?);
            Ok(json!({
                "verdict": algebra_isomorphic(&t1, &t2, p),
                "profiles": [to_value(&t1.ram_profile(p).entries), to_value(&t2.ram_profile(p).entries)],
            }))
        }
        Command::Isom { pair, algebra: false } => {
            let (c1, c2) = (cfg.class(&pair.a)?, cfg.class(&pair.b)?);
            Ok(json!({ "verdict": equivariant_isomorphic(&c1, &c2)? }))
        }
        Command::Conjugate(pair) => {
            let (c1, c2) = (cfg.class(&pair.a)?, cfg.class(&pair.b)?);
            Ok(match conjugate(&c1, &c2)? {
                Some(b) => json!({ "verdict": true, "b": b }),
                None => json!({ "verdict": false }),
            })
        }
        Command::Product(pair) => {
            let (c1, c2) = (cfg.class(&pair.a)?, cfg.class(&pair.b)?);
            Ok(class_json(&c1.product(&c2)?))
        }
        Command::Pairing { a, lambda, t } => {
            let lambda = k.parse(lambda)?;
            let t = k.parse(t)?;
            let closed = kummer_pair(&cfg.ctx, *a, k.valuation(&lambda)?, k.valuation(&t)?)?;
            let oracle = oracle_pair(&k, *a, &lambda, &t)?;
            if closed != oracle {
                return Err(Failure::Domain(adelic_core::Error::Inconsistent(
                    "closed form and root adjunction disagree".into(),
                )));
            }
            Ok(json!({ "value": closed.to_string(), "log": cfg.ctx.log_zeta(&closed)? }))
        }
        Command::Tuple { t, g } => {
            let t = cfg.idele(t)?;
            let g = cfg.subgroup_from(&t, g)?;
            Ok(json!({ "tuple": to_value(&ram_tuple(&cfg.ctx, &g, &t)?) }))
        }
        Command::Equivalent(a) => {
            let t = cfg.idele(&a.t)?;
            let (g1, g2) = (cfg.subgroup_from(&t, &a.g1)?, cfg.subgroup_from(&t, &a.g2)?);
            let verdict = galois_equivalent(&g1, &g2, &t)?;
            Ok(match equivalence_exponent(&g1, &g2, &t)? {
                Some(j) if verdict => json!({ "verdict": true, "j": j }),
                _ => json!({ "verdict": false }),
            })
        }
        Command::Conjugation(a) => {
            let t = cfg.idele(&a.t)?;
            let (g1, g2) = (cfg.subgroup_from(&t, &a.g1)?, cfg.subgroup_from(&t, &a.g2)?);
            let chi = Character::new(a.chi, p)?;
            let c = construct_conjugation(&k, &g1, &g2, &t, chi)?;
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let verified = c.verify(&k, &g1, &g2, &t, 2, &mut rng)?;
            Ok(json!({
                "phi": to_value(&c.phi),
                "tau_exp": c.tau_exp,
                "u": to_value(&c.u.to_repr(&k, p)),
                "verified": verified,
            }))
        }
        Command::Superelliptic { f, allow_nonadmissible } => {
            let repr = read_json(f)?;
            let f = RationalFunction::from_repr(&cfg.ctx, &repr)?;
            let c = if *allow_nonadmissible {
                classify_superelliptic_unchecked(&k, &f)?
            } else {
                classify_superelliptic(&k, &f)?
            };
            Ok(to_value(&c))
        }
        Command::Selftest => unreachable!("dispatched separately"),
    }
}

fn error_json(kind: &str, message: &str) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("values serialize"));
}

fn precision(flag: usize) -> std::result::Result<usize, String> {
    match std::env::var("ADELIC_PREC") {
        Ok(s) => s.trim().parse().map_err(|_| format!("ADELIC_PREC is not a precision: {s:?}")),
        Err(_) => Ok(flag),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let prec = match precision(cli.prec) {
        Ok(0) => {
            emit(&error_json("Usage", "precision must be positive"));
            return ExitCode::from(1);
        }
        Ok(n) => n,
        Err(m) => {
            emit(&error_json("Usage", &m));
            return ExitCode::from(1);
        }
    };
    if let Command::Selftest = cli.command {
        let report = selftest::run(cli.ell, cli.p, prec);
        emit(&to_value(&report));
        return if report.failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) };
    }
    let Some(p) = cli.p else {
        emit(&error_json("Usage", "--p is required"));
        return ExitCode::from(1);
    };
    let ctx = match FieldCtx::new(cli.ell, p) {
        Ok(c) => c,
        Err(e) => {
            emit(&error_json(e.kind(), &e.to_string()));
            return ExitCode::from(1);
        }
    };
    match run(&Config { ctx, prec }, &cli.command) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            emit(&error_json("MalformedInput", &m));
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            emit(&error_json(e.kind(), &e.to_string()));
            ExitCode::from(2)
        }
    }
}
