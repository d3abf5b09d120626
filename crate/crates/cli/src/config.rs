use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use soergel_core::cache::DiskCache;
use soergel_core::coxeter::{region_up_to_length, w_circle, CoxeterDatum, CoxeterGroup, Element, Word};
use soergel_core::poly::is_prime;

#[derive(Parser, Debug)]
#[command(name = "soergel", version, about = "Kazhdan-Lusztig data, light leaves and favorite projectors of Soergel bimodules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Named Cartan type: A2, B2, G2, A1xA1, A3, A1~ (affine A1), ...
    #[arg(long = "type", global = true, value_name = "TYPE")]
    pub cartan_type: Option<String>,

    /// File with an explicit Cartan matrix, one row per line.
    #[arg(long, global = true, value_name = "PATH")]
    pub cartan_file: Option<PathBuf>,

    /// Coefficient characteristic: 0 for the rationals or an odd prime.
    #[arg(long = "char", global = true, default_value_t = 0, value_name = "P")]
    pub characteristic: u64,

    /// Top element of the region, as a word such as s1.s2.s1.
    #[arg(long, global = true, value_name = "WORD")]
    pub top: Option<String>,

    /// Restrict the region to elements of at most this length.
    #[arg(long, global = true, value_name = "N")]
    pub region_max_length: Option<usize>,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Directory of the content-addressed report cache.
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads for region sweeps.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Text,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Kazhdan-Lusztig basis elements of the region.
    Kl,
    /// Light leaves of a word: i, j, target and degree.
    Leaves {
        #[arg(long)]
        word: String,
    },
    /// Favorite projector of a reduced word.
    Projector {
        #[arg(long)]
        word: String,
        /// Include the double leaves coefficients.
        #[arg(long)]
        dlb: bool,
    },
    /// Graded character of the image of the favorite projector.
    Character {
        #[arg(long)]
        word: String,
    },
    /// Determinants of intersection forms and the resulting bad primes.
    Badprimes,
    /// Invariant suite over the region.
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kl => "kl",
            Command::Leaves { .. } => "leaves",
            Command::Projector { .. } => "projector",
            Command::Character { .. } => "character",
            Command::Badprimes => "badprimes",
            Command::Verify => "verify",
        }
    }

    pub fn word(&self) -> Option<&str> {
        match self {
            Command::Leaves { word } | Command::Projector { word, .. } | Command::Character { word } => Some(word),
            _ => None,
        }
    }

    fn needs_region(&self) -> bool {
        matches!(self, Command::Kl | Command::Badprimes | Command::Verify)
    }
}

/// Validated configuration: datum, group, region and options.
pub struct Setup {
    pub datum: CoxeterDatum,
    pub group: Arc<CoxeterGroup>,
    pub region: Vec<Element>,
    pub top: Option<Element>,
    pub word: Option<Word>,
    pub characteristic: Option<u64>,
    pub format: Format,
    pub cache: Option<DiskCache>,
    pub key_args: Vec<String>,
}

impl Setup {
    pub fn new(cli: &Cli) -> anyhow::Result<Self> {
        let datum = match (&cli.cartan_type, &cli.cartan_file) {
            (Some(t), None) => CoxeterDatum::from_label(t)?,
            (None, Some(p)) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                CoxeterDatum::from_cartan_text(&text)?
            }
            _ => bail!("give exactly one of --type and --cartan-file"),
        };
        let characteristic = match cli.characteristic {
            0 => None,
            p if p == 2 || !is_prime(p) => bail!("--char must be 0 or an odd prime, got {p}"),
            p => Some(p),
        };
        let parser = CoxeterGroup::new(datum.clone(), Some(0))?;
        let top_word = cli.top.as_deref().map(|t| parser.parse_word(t)).transpose()?;
        let word = cli.command.word().map(|w| parser.parse_word(w)).transpose()?;
        let lengths = [top_word.as_ref().map(Vec::len), cli.region_max_length, word.as_ref().map(Vec::len)];
        let bound = if datum.is_finite() {
            None
        } else {
            let b = lengths.iter().flatten().max().copied();
            if b.is_none() || (cli.command.needs_region() && cli.top.is_none() && cli.region_max_length.is_none()) {
                bail!("affine type {} needs --top or --region-max-length", datum.label());
            }
            // Trace formulas for Hom(B_x, B_x) run over words of twice the length.
            b.map(|b| 2 * b)
        };
        let group = Arc::new(CoxeterGroup::new(datum.clone(), bound)?);
        let top = top_word.as_ref().map(|w| group.element_of(w)).transpose()?;
        if let (Some(t), Some(w)) = (top, &top_word) {
            if group.length(t) != w.len() {
                bail!("--top {} is not a reduced word", CoxeterGroup::format_word(w));
            }
        }
        let mut region = match (top, cli.region_max_length) {
            (Some(t), _) => w_circle(&group, Some(t))?,
            (None, Some(n)) => region_up_to_length(&group, n)?,
            (None, None) => group.elements().collect(),
        };
        if let Some(n) = cli.region_max_length {
            region.retain(|&x| group.length(x) <= n);
        }
        let cache = cli.cache_dir.as_ref().map(DiskCache::open).transpose().context("opening the cache directory")?;
        let key_args = vec![
            format!("{:?}", cli.command),
            format!("{:?}", cli.format),
            cli.characteristic.to_string(),
            top_word.as_deref().map(CoxeterGroup::format_word).unwrap_or_default(),
            cli.region_max_length.map(|n| n.to_string()).unwrap_or_default(),
        ];
        Ok(Setup { datum, group, region, top, word, characteristic, format: cli.format, cache, key_args })
    }
}
